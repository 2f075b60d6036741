#include "cusp/resolvent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mode_sum.hpp"
#include "quadrature.hpp"

namespace cusp {

namespace {

constexpr double kPi = std::numbers::pi;

double polar_split(const Vec& y, Vec& omega)
{
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    double r = std::sqrt(r2);
    omega.assign(y.size(), 0.0);
    if (r > 0.0)
        for (std::size_t i = 0; i < y.size(); ++i) omega[i] = y[i] / r;
    else if (!omega.empty())
        omega[0] = 1.0;  // direction is irrelevant: only m = 0 survives at r = 0
    return r;
}

// Smallest b with delta*b - p*log(1+b) >= L.
double decay_cut(double delta, double p, double L)
{
    double b = L / delta;
    for (int i = 0; i < 60; ++i) b = (L + p * std::log1p(b)) / delta;
    return b;
}

// Exact integral over [0, T] of the small-t expansion of a b = 0 mode,
//   t^{d-1+2m} [E1(t^2) + t^{2 lambda} E2(t^2)],
// which continues the mode integral in s past its convergence abscissa.
cplx series_head(const detail::ModeIntegralSpec& sp, cplx lambda, double T)
{
    const int K = 48;
    double X = std::max(sp.x, sp.xp), xs = std::min(sp.x, sp.xp);
    double nu = 0.5 * (sp.d - 2) + sp.m;
    cplx sn = std::sin(kPi * lambda);
    if (std::abs(sn) < 1e-6)
        throw CapabilityError("mode resolvent: continuation at integer order lambda = s - n/2 needs logarithmic terms");
    std::vector<cplx> A(K), B(K), C(K);
    std::vector<double> S1(K), S2(K);
    A[0] = rgamma(1.0 - lambda);
    B[0] = rgamma(1.0 + lambda);
    C[0] = B[0];
    S1[0] = S2[0] = 1.0 / std::tgamma(nu + 1.0);
    for (int k = 1; k < K; ++k) {
        double dk = k;
        A[k] = A[k - 1] * (0.25 * X * X) / (dk * (dk - lambda));
        B[k] = B[k - 1] * (0.25 * xs * xs) / (dk * (dk + lambda));
        C[k] = C[k - 1] * (0.25 * X * X) / (dk * (dk + lambda));
        S1[k] = -S1[k - 1] * (0.25 * sp.r * sp.r) / (dk * (nu + dk));
        S2[k] = -S2[k - 1] * (0.25 * sp.rp * sp.rp) / (dk * (nu + dk));
    }
    std::vector<double> S(K, 0.0);
    for (int i = 0; i < K; ++i)
        for (int j = 0; i + j < K; ++j) S[i + j] += S1[i] * S2[j];
    std::vector<cplx> AB(K, 0.0), CB(K, 0.0), E1(K, 0.0), E2(K, 0.0);
    for (int i = 0; i < K; ++i)
        for (int j = 0; i + j < K; ++j) {
            AB[i + j] += A[i] * B[j];
            CB[i + j] += C[i] * B[j];
        }
    for (int i = 0; i < K; ++i)
        for (int j = 0; i + j < K; ++j) {
            E1[i + j] += AB[i] * S[j];
            E2[i + j] += CB[i] * S[j];
        }
    cplx pre = std::pow(sp.x * sp.xp, 0.5 * sp.n) * std::pow(sp.r * sp.rp, sp.m) * std::pow(2.0, -2.0 * nu) *
               (kPi / (2.0 * sn));
    cplx coef1 = std::exp(lambda * std::log(xs / X));
    cplx coef2 = std::exp(lambda * std::log(0.25 * X * xs));
    double a1 = sp.d - 1 + 2 * sp.m;
    cplx beta = a1 + 2.0 * lambda;
    double lT = std::log(T);
    cplx sum1 = 0.0, sum2 = 0.0;
    for (int k = 0; k < K; ++k) {
        double e1 = a1 + 2.0 * k + 1.0;
        sum1 += E1[k] * std::exp(e1 * lT) / e1;
        cplx e2 = beta + (2.0 * k + 1.0);
        if (std::abs(e2) < 1e-10)
            throw PoleError("mode resolvent: s lies on a pole k/2 - j of the continued kernel", k);
        sum2 += E2[k] * std::exp(e2 * lT) / e2;
    }
    return pre * (coef1 * sum1 - coef2 * sum2);
}

// Magnitude of the radial factor at its smallest argument tau = b, padded
// for the mild growth complex orders can show; used only for cutoffs.
cplx f_envelope(const detail::ModeIntegralSpec& sp, cplx lambda, cplx pref, double X, double xs, double delta)
{
    double tau = std::max(sp.b, 1e-3);
    cplx v;
    if (sp.kind == detail::Radial::Poisson)
        v = std::exp(lambda * std::log(tau)) * bessel_K_scaled(lambda, X * tau) * std::exp(-X * tau);
    else
        v = bessel_K_scaled(lambda, X * tau) * bessel_I_scaled(lambda, xs * tau) * std::exp(-delta * tau);
    return 10.0 * std::abs(pref * v);
}

}  // namespace

void TruncationPolicy::validate() const
{
    if (M < 1 || V < 1 || N < 1) throw InputError("policy: M, V, N must be positive");
    if (!(t_max > 0.0)) throw InputError("policy: t_max must be positive");
    if (!(tol > 0.0 && tol < 1.0)) throw InputError("policy: tol must lie in (0, 1)");
}

cplx radial_factor(const ComplexSpectral& s, double x, double xp, double tau)
{
    if (!(x > 0.0) || !(xp > 0.0) || !(tau > 0.0)) throw InputError("radial_factor: x, x', tau must be positive");
    double X = std::max(x, xp), xs = std::min(x, xp);
    cplx lam = s.lambda();
    return bessel_K_scaled(lam, X * tau) * bessel_I_scaled(lam, xs * tau) * std::exp(-(X - xs) * tau);
}

namespace detail {

KernelResult mode_integral(const ModeIntegralSpec& sp, double abs_tol, const TruncationPolicy& policy)
{
    KernelResult out;
    out.method = "modes";
    const cplx lambda = sp.s - 0.5 * sp.n;
    const bool poisson = sp.kind == Radial::Poisson;
    const double X = poisson ? sp.x : std::max(sp.x, sp.xp);
    const double xs = poisson ? 0.0 : std::min(sp.x, sp.xp);
    const double delta = X - xs;
    cplx pref;
    if (poisson) {
        double lr = std::round(lambda.real());
        if (lambda.imag() == 0.0 && lr == lambda.real() && lr >= 0.0)
            throw PoleError("poisson: lambda = s - n/2 must not be a nonnegative integer", static_cast<long>(lr));
        pref = 2.0 * std::exp(-lambda * std::log(2.0)) * rgamma(lambda) * std::pow(sp.x, 0.5 * sp.n);
    } else {
        pref = std::pow(sp.x * sp.xp, 0.5 * sp.n);
    }
    if (delta == 0.0 && sp.r == sp.rp)
        throw InputError("mode resolvent: (x, r) = (x', r') is the mode diagonal");

    auto f = [&](double t) -> cplx {
        double tau = std::hypot(t, sp.b);
        double dens = spectral_density(sp.d, sp.m, t, sp.r, sp.rp);
        if (dens == 0.0 || !(tau > 0.0)) return 0.0;
        cplx v;
        if (poisson)
            v = std::exp(lambda * std::log(tau)) * bessel_K_scaled(lambda, X * tau) * std::exp(-X * tau);
        else
            v = bessel_K_scaled(lambda, X * tau) * bessel_I_scaled(lambda, xs * tau) * std::exp(-delta * tau);
        return pref * v * dens;
    };

    const double rel = policy.tol;
    const double L = -std::log(rel) + 3.0;
    double t_end = policy.t_max;
    if (delta > 0.0) {
        double te = decay_cut(delta, sp.d + 1.0, L);
        t_end = std::sqrt(te * (te + 2.0 * sp.b));
    }
    const bool oscillatory = delta == 0.0 || t_end > policy.t_max;
    const double T = std::min(t_end, policy.t_max);

    double rr = sp.r + sp.rp;
    double w0 = rr > 0.0 ? kPi / rr : 1e300;
    w0 = std::min(w0, 4.0 / std::max(delta, 0.25 / X));
    w0 = std::max(w0, T / 20000.0);

    // Below t_lo the Bessel factors J_nu(r t) J_nu(r' t) are too small to
    // matter: |u^{-(d-2)/2} J_nu(u)| <= u^m 2^{-nu} / Gamma(nu + 1).
    double t_lo = 0.0;
    if (sp.m >= 2 && sp.b > 0.0 && abs_tol > 0.0) {
        double nu = 0.5 * (sp.d - 2) + sp.m;
        double p = sp.d + 2.0 * sp.m;
        cplx k0 = f_envelope(sp, lambda, pref, X, xs, delta);
        double lc = std::log(std::abs(k0) * 4.0) + sp.m * std::log(sp.r * sp.rp) - 2.0 * nu * std::log(2.0) -
                    2.0 * std::lgamma(nu + 1.0) - std::log(p);
        // lc + p log t_lo = log(0.1 abs_tol)
        double lt = (std::log(0.1 * abs_tol) - lc) / p;
        if (std::isfinite(lt)) t_lo = std::exp(lt);
        if (t_lo >= T) {
            out.value = 0.0;
            out.tail = std::exp(lc + p * std::log(T));
            out.error_bound = out.tail;
            out.modes = 1;
            return out;
        }
    }

    std::vector<double> breaks;
    cplx head = 0.0;
    double start = 0.0;
    cplx beta = static_cast<double>(sp.d - 1 + 2 * sp.m) + 2.0 * lambda;
    if (sp.b == 0.0 && !poisson && beta.real() <= -0.5) {
        start = std::min(0.5 / std::max({X, sp.r, sp.rp}), 0.5 * T);
        head = series_head(sp, lambda, start);
        breaks.push_back(start);
    } else if (sp.b == 0.0 && beta.real() < 1.0) {
        if (beta.real() <= -1.0)
            throw CapabilityError("poisson synthesis: zero-threshold mode is not integrable at this s");
        double g = std::min(w0, T);
        breaks.push_back(0.0);
        for (int j = 40; j >= 1; --j) breaks.push_back(g * std::ldexp(1.0, -j));
        start = g;
    } else if (t_lo > 0.0) {
        breaks.push_back(t_lo);
        start = t_lo;
        out.tail += 0.1 * abs_tol;
    } else {
        breaks.push_back(0.0);
        if (sp.b > 0.0)
            for (double g = sp.b / 8.0; g < std::min(w0, T); g *= 2.0) breaks.push_back(g);
        start = breaks.back();
    }
    if (breaks.back() < start) breaks.push_back(start);
    double a = breaks.back();
    if (T > a) {
        long panels = std::max(1L, static_cast<long>(std::ceil((T - a) / w0)));
        for (long i = 1; i <= panels; ++i) breaks.push_back(a + (T - a) * static_cast<double>(i) / panels);
    }
    const long max_nodes = 2000000;
    auto q = detail::integrate(f, breaks, abs_tol, rel, max_nodes);
    out.nodes = q.nodes;
    out.quad_error = q.error;
    cplx value = head + q.value;
    if (q.error > 50.0 * std::max(abs_tol, rel * std::abs(value)))
        throw AccuracyError("mode resolvent: quadrature did not reach tolerance", value, q.error);
    out.t_max = T;

    if (!oscillatory) {
        out.tail += std::abs(f(T)) / std::max(delta, 1e-300);
    } else {
        // Conditionally convergent tail: integrate chunk by chunk over the
        // slow beat period and extrapolate the partial sums.
        double beat = std::abs(sp.r - sp.rp);
        double P = kPi / std::max(beat, 1e-3 * std::max(rr, 1e-300));
        std::vector<cplx> partial{value};
        double t0 = T;
        double change = std::abs(value);
        cplx est = value;
        for (int j = 0; j < 80; ++j) {
            std::vector<double> br;
            int sub = std::max(1, static_cast<int>(std::ceil(P / w0)));
            for (int i = 0; i <= sub; ++i) br.push_back(t0 + P * i / sub);
            auto c = detail::integrate(f, br, 0.1 * abs_tol, rel, max_nodes);
            out.nodes += c.nodes;
            out.quad_error += c.error;
            partial.push_back(partial.back() + c.value);
            t0 += P;
            if (partial.size() >= 7) {
                auto [e, ch] = detail::wynn_epsilon(partial);
                est = e;
                change = ch;
                if (change <= std::max(abs_tol, rel * std::abs(est))) break;
            }
        }
        value = est;
        out.tail = change;
        out.t_max = t0;
        if (change > 1e3 * std::max(abs_tol, rel * std::abs(est)))
            throw AccuracyError("mode resolvent: oscillatory tail did not converge", value, change);
    }
    out.value = value;
    out.error_bound = out.quad_error + out.tail;
    out.modes = 1;
    return out;
}

KernelResult mode_sum(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp,
                      const TruncationPolicy& policy, Radial kind)
{
    policy.validate();
    const int d = model.fibre_dim();
    if (d < 1 || d > 3)
        throw CapabilityError("cusp kernel: mode summation implemented for n - k in {1, 2, 3} only, got " +
                              std::to_string(d));
    validate_point(model, w);
    if (static_cast<int>(wp.y.size()) != d || static_cast<int>(wp.z.size()) != model.k())
        throw InputError("cusp kernel: second point has wrong dimensions");
    const bool poisson = kind == Radial::Poisson;
    if (!poisson) validate_point(model, wp);
    const int n = model.n();
    const double delta = poisson ? w.x : std::abs(w.x - wp.x);
    if (!poisson && delta <= 1e-9 * std::max(w.x, wp.x))
        throw CapabilityError("cusp kernel: mode summation needs x != x' (use images_kernel on the slice x = x')");

    KernelResult out;
    out.method = poisson ? "poisson-modes" : "modes";
    Vec om, omp;
    double r = polar_split(w.y, om), rp = polar_split(wp.y, omp);
    Vec dz(model.k());
    for (int i = 0; i < model.k(); ++i) dz[i] = w.z[i] - wp.z[i];
    Vec zd(model.k(), 0.0);  // <dz, v_j^*>
    for (int j = 0; j < model.k(); ++j)
        for (int i = 0; i < model.k(); ++i) zd[j] += dz[i] * model.dual_basis()[j][i];

    // Reference magnitude for absolute quadrature targets.
    double scale;
    {
        double q2 = 0.0;
        for (int i = 0; i < d; ++i) q2 += (w.y[i] - wp.y[i]) * (w.y[i] - wp.y[i]);
        for (int i = 0; i < model.k(); ++i) q2 += dz[i] * dz[i];
        if (poisson) {
            double c = std::abs(free_kernel_leading(n, s)) * std::abs(2.0 * s - static_cast<double>(n));
            scale = c * std::pow(w.x / (w.x * w.x + q2), s.real());
        } else {
            scale = std::abs(free_kernel(n, s, cosh_dist(w, wp)));
        }
        if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
    }

    const double L = -std::log(policy.tol) + 3.0;
    const double b_cut = decay_cut(delta, d + 1.0, L);
    Eigen::MatrixXd D(model.k(), model.k());
    for (int i = 0; i < model.k(); ++i)
        for (int j = 0; j < model.k(); ++j) D(i, j) = model.dual_basis()[i][j];
    double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues().minCoeff();
    int Rq = static_cast<int>(std::ceil(b_cut / (2.0 * kPi * smin))) + 1;
    if (Rq > policy.V) {
        out.warnings.push_back("dual-lattice cutoff capped at V = " + std::to_string(policy.V));
        Rq = policy.V;
    }
    const double rmax = std::max(r, rp);
    const int M_est = static_cast<int>(std::ceil(0.5 * std::exp(1.0) * rmax * b_cut)) + 4;

    struct Term {
        double b;
        int m;
        IVec c, q;
        cplx v;
    };
    std::vector<Term> terms;
    cplx running = 0.0;
    int quiet = 0;
    double last_block = 0.0;
    bool converged = false, exhausted = false;
    const double vol = model.covolume();
    for (int m = 0; m <= policy.M; ++m) {
        if ((d == 1 && m > 1) || (m > 0 && (r == 0.0 || rp == 0.0))) {
            converged = exhausted = true;
            break;
        }
        double block = 0.0;
        for (const auto& [c, mult] : weight_multiplicities(model.trivial_dim(), model.blocks(), m)) {
            cplx hy = harmonic(d, m, c, om) * std::conj(harmonic(d, m, c, omp)) * (static_cast<double>(mult) / vol);
            if (hy == 0.0) continue;
            IVec center(model.k());
            for (int j = 0; j < model.k(); ++j) {
                double t = 0.0;
                for (int l = 0; l < model.blocks(); ++l) t += c[l] * model.angles_turns()[l][j];
                center[j] = -static_cast<long>(std::lround(t));
            }
            IVec q(model.k());
            std::function<void(int)> visit = [&](int j) {
                if (j == model.k()) {
                    double b = threshold(model, c, q);
                    if (b > b_cut) return;
                    Vec fw = mode_frequency(model, c, q);
                    double ph = 0.0;
                    for (int i = 0; i < model.k(); ++i) ph += fw[i] * zd[i];
                    ph -= std::round(ph);
                    cplx H = hy * std::polar(1.0, 2.0 * kPi * ph);
                    ModeIntegralSpec sp;
                    sp.kind = kind;
                    sp.s = s;
                    sp.n = n;
                    sp.d = d;
                    sp.m = m;
                    sp.b = b;
                    sp.x = w.x;
                    sp.xp = wp.x;
                    sp.r = r;
                    sp.rp = rp;
                    double target = std::max(0.02 * policy.tol * std::max(scale, std::abs(running)), 1e-300) /
                                    std::abs(H);
                    KernelResult mi = mode_integral(sp, target, policy);
                    cplx v = H * mi.value;
                    out.nodes += mi.nodes;
                    out.modes += 1;
                    out.quad_error += std::abs(H) * mi.quad_error;
                    out.tail += std::abs(H) * mi.tail;
                    out.t_max = std::max(out.t_max, mi.t_max);
                    block += std::abs(v);
                    running += v;
                    for (long e : q) out.V = std::max(out.V, static_cast<int>(std::labs(e)));
                    terms.push_back({b, m, c, q, v});
                    return;
                }
                for (long e = center[j] - Rq; e <= center[j] + Rq; ++e) {
                    q[j] = e;
                    visit(j + 1);
                }
            };
            visit(0);
        }
        out.M = m;
        last_block = block;
        if (m >= M_est && block <= 0.01 * policy.tol * std::abs(running)) {
            if (++quiet >= 2) {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (!converged) {
        out.warnings.push_back("harmonic cutoff M = " + std::to_string(policy.M) + " reached before convergence");
        out.tail += 3.0 * last_block;
    } else if (!exhausted) {
        out.tail += 2.0 * last_block;
    }
    // Modes beyond b_cut are damped by e^{-delta b}.
    out.tail += std::exp(-L) * scale;

    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        if (a.b != b.b) return a.b < b.b;
        if (a.m != b.m) return a.m < b.m;
        if (a.c != b.c) return a.c < b.c;
        return a.q < b.q;
    });
    std::vector<cplx> vals;
    vals.reserve(terms.size());
    for (const auto& t : terms) vals.push_back(t.v);
    out.value = detail::pairwise_sum(vals);
    out.error_bound = out.quad_error + out.tail;
    return out;
}

}  // namespace detail

KernelResult mode_resolvent(const ComplexSpectral& s, int d, int m, double b, double x, double r,
                            double xp, double rp, const TruncationPolicy& policy)
{
    policy.validate();
    if (d < 1) throw InputError("mode_resolvent: fibre dimension must be positive");
    if (d == 1 && m > 1) throw InputError("mode_resolvent: S^0 carries only degrees 0 and 1");
    if (!(x > 0.0) || !(xp > 0.0)) throw InputError("mode_resolvent: heights must be positive");
    if (!(r >= 0.0) || !(rp >= 0.0) || !(b >= 0.0)) throw InputError("mode_resolvent: r, r', b must be nonnegative");
    detail::ModeIntegralSpec sp;
    sp.kind = detail::Radial::Resolvent;
    sp.s = s.s;
    sp.n = s.n;
    sp.d = d;
    sp.m = m;
    sp.b = b;
    sp.x = x;
    sp.xp = xp;
    sp.r = r;
    sp.rp = rp;
    return detail::mode_integral(sp, 0.0, policy);
}

KernelResult cusp_kernel(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp,
                         const TruncationPolicy& policy)
{
    return detail::mode_sum(model, s, w, wp, policy, detail::Radial::Resolvent);
}

KernelResult images_kernel(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp, int N,
                           bool skip_identity)
{
    validate_point(model, w);
    validate_point(model, wp);
    if (N < 0) throw InputError("images_kernel: N must be nonnegative");
    const int n = model.n(), k = model.k();
    KernelResult out;
    out.method = "images";
    out.N = N;
    if (s.real() <= 0.5 * k)
        out.warnings.push_back("divergent: Re s <= k/2, image sum is a fixed-N partial sum");

    std::vector<cplx> vals;
    for (const auto& g : enumerate(model, N)) {
        bool ident = std::all_of(g.a.begin(), g.a.end(), [](long v) { return v == 0; });
        if (ident && skip_identity) continue;
        double ch = cosh_dist(w, apply(model, g, wp));
        if (!(ch - 1.0 > 1e-13)) throw InputError("images_kernel: w lies on the orbit of w' (diagonal)");
        vals.push_back(free_kernel(n, s, ch));
    }
    out.value = detail::pairwise_sum(vals);

    const double sig = s.real();
    double xx = w.x * wp.x;
    double y2 = 0.0, yp2 = 0.0;
    for (double v : w.y) y2 += v * v;
    for (double v : wp.y) yp2 += v * v;
    double yy = std::sqrt(y2 * yp2);
    cplx C = free_kernel_leading(n, s);
    // Rank one: the remaining images are summed by expanding in
    // rho^2 / (L (j +- delta))^2, which needs the first dropped shell to be
    // well outside rho.  Otherwise only the shell bound below is used.
    bool asymptotic = false;
    double Lv = 0.0, Ll = 0.0, delta = 0.0, rho2 = 0.0;
    if (k == 1) {
        Lv = model.basis()[0][0];
        Ll = std::abs(Lv);
        delta = (w.z[0] - wp.z[0]) / Lv;
        rho2 = (w.x - wp.x) * (w.x - wp.x) + y2 + yp2 + 2.0 * xx;
        asymptotic = (N + 1.0 - std::abs(delta)) * Ll > 2.0 * std::sqrt(rho2 + 2.0 * yy);
    }
    if (sig <= 0.5 * k) {
        out.tail = std::numeric_limits<double>::infinity();
    } else if (asymptotic) {
        auto Z = [&](cplx e) {
            return hurwitz_zeta(e, N + 1.0 - delta) + hurwitz_zeta(e, N + 1.0 + delta);
        };
        auto Zr = [&](double e) { return std::abs(Z(cplx(e, 0.0))); };
        cplx pre = C * std::exp(s * std::log(xx)) * std::exp(-2.0 * s * std::log(Ll));
        cplx corr = Z(2.0 * s) - s * rho2 / (Ll * Ll) * Z(2.0 * s + 2.0) +
                    0.5 * s * (s + 1.0) * rho2 * rho2 / std::pow(Ll, 4) * Z(2.0 * s + 4.0);
        out.value += pre * corr;
        double apre = std::abs(C) * std::pow(xx, sig) * std::pow(Ll, -2.0 * sig);
        double as = std::abs(s);
        double big = rho2 + 2.0 * yy;
        out.tail = apre * (2.0 * as * yy / (Ll * Ll) * Zr(2.0 * sig + 2.0) +
                           std::abs(s * (s + 1.0) * (s + 2.0)) / 6.0 * std::pow(big / (Ll * Ll), 3) *
                               Zr(2.0 * sig + 6.0) +
                           (1.0 + as + n) * (as + 1.0) * xx * xx * std::pow(Ll, -4.0) * Zr(2.0 * sig + 4.0));
    } else {
        // |e^{-s d}| <= (2 cosh d)^{-sigma} <= (xx' / |dz - v_a|^2)^{sigma}; shells bounded below
        // by sigma_min(B) |a|_inf - |dz|.
        Eigen::MatrixXd B(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) B(i, j) = model.basis()[i][j];
        double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues().minCoeff();
        double dz = 0.0;
        for (int i = 0; i < k; ++i) dz += (w.z[i] - wp.z[i]) * (w.z[i] - wp.z[i]);
        dz = std::sqrt(dz);
        double C0 = std::abs(C) * 2.0 * std::pow(xx, sig);  // allows for the 2F1 factor
        double tail = 0.0;
        long j = N + 1;
        bool ok = smin * j > dz;
        if (ok) {
            for (; j <= 64L * (N + 1); ++j) {
                double cnt = std::pow(2.0 * j + 1.0, k) - std::pow(2.0 * j - 1.0, k);
                tail += cnt * std::pow(smin * j - dz, -2.0 * sig);
            }
            double u = static_cast<double>(j);
            if (smin * u > 2.0 * dz)
                tail += 2.0 * k * std::pow(3.0, k - 1) * std::pow(0.5 * smin, -2.0 * sig) *
                        std::pow(u, k - 2.0 * sig) / (2.0 * sig - k);
            else
                ok = false;
        }
        out.tail = ok ? C0 * tail : std::numeric_limits<double>::infinity();
    }
    out.error_bound = out.tail + 1e-15 * std::abs(out.value) * std::sqrt(static_cast<double>(vals.size()));
    return out;
}

double pde_residual(const std::function<cplx(const HPoint&)>& u, cplx s, int n, const HPoint& w, double h)
{
    if (!(h > 0.0)) throw InputError("pde_residual: step must be positive");
    if (!(w.x - h > 0.0)) throw InputError("pde_residual: stencil leaves the half-space (x - h <= 0)");
    cplx u0 = u(w);
    auto shifted = [&](int which, int idx, double dh) {
        HPoint p = w;
        if (which == 0)
            p.x += dh;
        else if (which == 1)
            p.y[idx] += dh;
        else
            p.z[idx] += dh;
        return u(p);
    };
    cplx up = shifted(0, 0, h), um = shifted(0, 0, -h);
    cplx uxx = (up - 2.0 * u0 + um) / (h * h);
    cplx ux = (up - um) / (2.0 * h);
    cplx lap = 0.0;
    for (std::size_t i = 0; i < w.y.size(); ++i)
        lap += (shifted(1, static_cast<int>(i), h) - 2.0 * u0 + shifted(1, static_cast<int>(i), -h)) / (h * h);
    for (std::size_t i = 0; i < w.z.size(); ++i)
        lap += (shifted(2, static_cast<int>(i), h) - 2.0 * u0 + shifted(2, static_cast<int>(i), -h)) / (h * h);
    double x = w.x;
    cplx res = -x * x * uxx + static_cast<double>(n - 1) * x * ux - x * x * lap - s * (static_cast<double>(n) - s) * u0;
    double a = std::abs(u0);
    if (a == 0.0) return std::abs(res);
    return std::abs(res) / a;
}

}  // namespace cusp
