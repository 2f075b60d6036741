// Internal numerical helpers shared by the kernel modules.
#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp::detail {

// Pairwise summation in index order; the result does not depend on how the
// terms were produced, only on their order.
inline cplx pairwise_sum(const cplx* v, std::size_t n)
{
    if (n == 0) return 0.0;
    if (n <= 8) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline cplx pairwise_sum(const std::vector<cplx>& v) { return pairwise_sum(v.data(), v.size()); }

struct Panel {
    double a, b;
    cplx value;
    double error;
};

struct QuadResult {
    cplx value = 0.0;
    double error = 0.0;
    long nodes = 0;
};

template <class F>
Panel gk15(F& f, double a, double b)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx f0 = f(c);
    cplx kron = wk[0] * f0, gauss = wg[0] * f0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        cplx fp = f(c + h * xk[i]), fm = f(c - h * xk[i]);
        kron += wk[i] * (fp + fm);
        if (i % 2 == 0) gauss += wg[i / 2] * (fp + fm);
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

// Globally adaptive Gauss-Kronrod over the given breakpoints.  Refines the
// worst panel until the summed error estimate is below
// max(abs_tol, rel_tol |value|).
template <class F>
QuadResult integrate(F&& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                     long max_nodes)
{
    QuadResult out;
    if (breaks.size() < 2) return out;
    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) panels.push_back(gk15(f, breaks[i], breaks[i + 1]));
    out.nodes = 15 * static_cast<long>(panels.size());
    auto worse = [&](std::size_t i, std::size_t j) { return panels[i].error < panels[j].error; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
    double err = 0.0;
    cplx total = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        heap.push(i);
        err += panels[i].error;
        total += panels[i].value;
    }
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && !heap.empty()) {
        if (out.nodes > max_nodes) break;
        std::size_t i = heap.top();
        heap.pop();
        Panel p = panels[i];
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) continue;
        Panel l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
        out.nodes += 30;
        err += l.error + r.error - p.error;
        total += l.value + r.value - p.value;
        panels[i] = l;
        panels.push_back(r);
        heap.push(i);
        heap.push(panels.size() - 1);
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    std::vector<cplx> vals;
    vals.reserve(panels.size());
    out.error = 0.0;
    for (const auto& p : panels) {
        vals.push_back(p.value);
        out.error += p.error;
    }
    out.value = pairwise_sum(vals);
    return out;
}

// Wynn epsilon extrapolation of a sequence of partial sums.  Returns the
// last diagonal estimate and the change from the previous one.
inline std::pair<cplx, double> wynn_epsilon(const std::vector<cplx>& s)
{
    std::size_t n = s.size();
    if (n < 3) return {n ? s.back() : cplx(0.0), n > 1 ? std::abs(s[n - 1] - s[n - 2]) : 0.0};
    std::vector<std::vector<cplx>> e(n + 1, std::vector<cplx>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) e[i][1] = s[i];
    cplx best = s.back(), prev = s[n - 2];
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t i = 0; i + k <= n; ++i) {
            cplx diff = e[i + 1][k - 1] - e[i][k - 1];
            if (std::abs(diff) == 0.0) return {best, std::abs(best - prev)};
            e[i][k] = e[i + 1][k - 2] + 1.0 / diff;
        }
        if (k % 2 == 1) {
            prev = best;
            best = e[n - k][k];
        }
    }
    return {best, std::abs(best - prev)};
}

}  // namespace cusp::detail
