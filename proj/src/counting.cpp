#include "cusp/counting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "quadrature.hpp"

namespace cusp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long long kMaxBrute = 50'000'000;

double min_singular_value(const std::vector<Vec>& rows)
{
    const int k = static_cast<int>(rows.size());
    Eigen::MatrixXd B(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) B(i, j) = rows[i][j];
    return Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues().minCoeff();
}

double z_offset(const HPoint& m, const HPoint& mp)
{
    double q = 0.0;
    for (std::size_t i = 0; i < m.z.size(); ++i) q += (m.z[i] - mp.z[i]) * (m.z[i] - mp.z[i]);
    return std::sqrt(q);
}

// Bound on sum_{|a|_inf > N} (2 x x' / |dz - v_a|^2)^sigma, which dominates
// sum |e^{-s d(m, a m')}| since e^{d} >= cosh d >= |dz - v_a|^2 / (2 x x').
double lattice_tail(const CuspModel& model, const HPoint& m, const HPoint& mp, double sigma, int N)
{
    const int k = model.k();
    if (sigma <= 0.5 * k) return kInf;
    const double D = z_offset(m, mp);
    const double c = std::pow(2.0 * m.x * mp.x, sigma);
    if (k == 1) {
        double L = std::abs(model.basis()[0][0]);
        double base = N * L - D;
        if (base <= 0.0) return kInf;
        return 2.0 * c / L * std::pow(base, 1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
    }
    const double smin = min_singular_value(model.basis());
    long j = N + 1;
    if (!(smin * j > D)) return kInf;
    double tail = 0.0;
    for (; j <= 64L * (N + 1); ++j) {
        double cnt = std::pow(2.0 * j + 1.0, k) - std::pow(2.0 * j - 1.0, k);
        tail += cnt * std::pow(smin * j - D, -2.0 * sigma);
    }
    double u = static_cast<double>(j);
    if (!(smin * u > 2.0 * D)) return kInf;
    tail += 2.0 * k * std::pow(3.0, k - 1) * std::pow(0.5 * smin, -2.0 * sigma) * std::pow(u, k - 2.0 * sigma) /
            (2.0 * sigma - k);
    return c * tail;
}

bool is_identity(const IVec& a)
{
    return std::all_of(a.begin(), a.end(), [](long v) { return v == 0; });
}

// True when the holonomy can move the fibre component of m'.
bool rotation_matters(const CuspModel& model, const HPoint& mp)
{
    const int r = model.trivial_dim();
    for (int l = 0; l < model.blocks(); ++l) {
        double y0 = mp.y[r + 2 * l], y1 = mp.y[r + 2 * l + 1];
        if (y0 == 0.0 && y1 == 0.0) continue;
        for (int j = 0; j < model.k(); ++j)
            if (model.angles_turns()[l][j] != 0.0) return true;
    }
    return false;
}

}  // namespace

PoincareSum poincare_direct(const CuspModel& model, cplx s, const HPoint& m, const HPoint& mp, int N)
{
    validate_point(model, m);
    validate_point(model, mp);
    if (N < 1) throw InputError("poincare_direct: N must be at least 1");
    PoincareSum out;
    out.N = N;
    std::vector<cplx> shells;
    shells.reserve(N);
    for (int A = 1; A <= N; ++A) {
        std::vector<cplx> vals;
        for (const auto& g : shell(model.k(), A)) {
            double d = dist(m, apply(model, g, mp));
            vals.push_back(std::exp(-s * d));
        }
        out.terms += static_cast<long>(vals.size());
        shells.push_back(detail::pairwise_sum(vals));
    }
    out.value = detail::pairwise_sum(shells);
    out.tail_bound = lattice_tail(model, m, mp, s.real(), N);
    if (s.real() <= 0.5 * model.k())
        out.warnings.push_back("divergent: Re s <= k/2, fixed-N partial sum without a tail bound");
    return out;
}

CountProfile orbit_count(const CuspModel& model, const HPoint& m, const HPoint& mp,
                         const std::vector<double>& radii)
{
    validate_point(model, m);
    validate_point(model, mp);
    if (radii.empty()) throw InputError("orbit_count: empty radius grid");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0) || !std::isfinite(radii[i]))
            throw InputError("orbit_count: radii must be finite and nonnegative");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InputError("orbit_count: radii must be strictly increasing");
    }
    const int k = model.k();
    CountProfile out;
    out.radii = radii;
    out.m = m;
    out.mp = mp;
    out.counts.assign(radii.size(), 0);

    std::vector<double> ch(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) ch[i] = std::cosh(radii[i]);
    const double xx2 = 2.0 * m.x * mp.x;
    // Every counted image has |dz - v_a| <= sqrt(2 x x' cosh R); a_j = <v_a, v_j^*>.
    const double reach = std::sqrt(xx2 * ch.back()) + z_offset(m, mp);
    std::vector<long> box(k);
    double cells = 1.0;
    for (int j = 0; j < k; ++j) {
        double nv = 0.0;
        for (double v : model.dual_basis()[j]) nv += v * v;
        box[j] = static_cast<long>(std::ceil(reach * std::sqrt(nv))) + 1;
        cells *= 2.0 * box[j] + 1.0;
    }
    auto cosh_at = [&](const IVec& a) { return cosh_dist(m, apply(model, GroupElement{a}, mp)); };

    if (k <= 2 && !rotation_matters(model, mp)) {
        // Row sweep: with the fibre offset fixed, the admissible last exponent
        // forms an interval for each choice of the others.
        if (k == 2 && 2.0 * box[0] + 1.0 > static_cast<double>(kMaxBrute))
            throw ResourceError("orbit_count: radius too large for the row sweep");
        HPoint base = apply(model, GroupElement{IVec(k, 0)}, mp);
        double y2 = 0.0;
        for (std::size_t i = 0; i < m.y.size(); ++i) y2 += (m.y[i] - base.y[i]) * (m.y[i] - base.y[i]);
        const double h2 = m.x * m.x + mp.x * mp.x + y2;
        const Vec& vl = model.basis()[k - 1];
        double vv = 0.0;
        for (double v : vl) vv += v * v;
        // Same arithmetic as cosh_dist for images of m' with no fibre rotation.
        auto cosh_row = [&](const Vec& u, long a) {
            double q = h2;
            for (int i = 0; i < k; ++i) {
                double t = u[i] - a * vl[i];
                q += t * t;
            }
            return q / xx2;
        };
        const long rows = k == 2 ? box[0] : 0;
        Vec u(k);
        for (long a1 = -rows; a1 <= rows; ++a1) {
            for (int i = 0; i < k; ++i) u[i] = m.z[i] - mp.z[i] - (k == 2 ? a1 * model.basis()[0][i] : 0.0);
            double uv = 0.0, uu = 0.0;
            for (int i = 0; i < k; ++i) {
                uv += u[i] * vl[i];
                uu += u[i] * u[i];
            }
            for (std::size_t i = 0; i < ch.size(); ++i) {
                double C = xx2 * ch[i] - h2;
                double disc = uv * uv - vv * (uu - C);
                if (disc < 0.0) disc = 0.0;
                double sq = std::sqrt(disc);
                long lo = static_cast<long>(std::ceil((uv - sq) / vv));
                long hi = static_cast<long>(std::floor((uv + sq) / vv));
                auto inside = [&](long a) { return cosh_row(u, a) <= ch[i]; };
                while (inside(hi + 1)) ++hi;
                while (hi >= lo && !inside(hi)) --hi;
                while (inside(lo - 1)) --lo;
                while (lo <= hi && !inside(lo)) ++lo;
                if (hi >= lo) out.counts[i] += hi - lo + 1;
            }
        }
        double c0 = cosh_dist(m, base);
        for (std::size_t i = 0; i < ch.size(); ++i)
            if (c0 <= ch[i]) --out.counts[i];
        return out;
    }

    if (cells > static_cast<double>(kMaxBrute))
        throw ResourceError("orbit_count: enumeration box exceeds " + std::to_string(kMaxBrute) + " elements");
    std::vector<double> vals;
    IVec a(k);
    std::function<void(int)> visit = [&](int j) {
        if (j == k) {
            if (is_identity(a)) return;
            double c = cosh_at(a);
            if (c <= ch.back()) vals.push_back(c);
            return;
        }
        for (long v = -box[j]; v <= box[j]; ++v) {
            a[j] = v;
            visit(j + 1);
        }
    };
    visit(0);
    std::sort(vals.begin(), vals.end());
    for (std::size_t i = 0; i < ch.size(); ++i)
        out.counts[i] = std::upper_bound(vals.begin(), vals.end(), ch[i]) - vals.begin();
    return out;
}

DeltaFit delta_fit(const CountProfile& profile, double R_lo, double R_hi)
{
    if (profile.radii.size() != profile.counts.size()) throw InputError("delta_fit: radii and counts differ in length");
    std::vector<double> X, Y;
    for (std::size_t i = 0; i < profile.radii.size(); ++i) {
        double R = profile.radii[i];
        if (R >= R_lo && R <= R_hi && profile.counts[i] > 0) {
            X.push_back(R);
            Y.push_back(std::log(static_cast<double>(profile.counts[i])));
        }
    }
    if (X.size() < 5) throw InputError("delta_fit: fewer than 5 radii with positive counts in the window");
    const double nn = static_cast<double>(X.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= nn;
    my /= nn;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
        syy += (Y[i] - my) * (Y[i] - my);
    }
    if (!(sxx > 0.0)) throw InputError("delta_fit: degenerate window");
    DeltaFit out;
    out.delta = sxy / sxx;
    out.intercept = my - out.delta * mx;
    out.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    out.points = static_cast<int>(X.size());
    return out;
}

ExpansionCoeffs expansion_coeffs(int n, cplx s, int J)
{
    if (n != 1 && n != 2) throw CapabilityError("expansion_coeffs: n in {1, 2} only");
    if (J < 0 || J > 20) throw InputError("expansion_coeffs: J must lie in [0, 20]");
    const int P = std::max(J, 20);
    const double Qmax = 0.25;
    const int rows = 3 * (P + 1);

    auto F = [&](double Q) {
        double coshd = 0.5 * (1.0 / Q + Q);
        return free_kernel(n, s, coshd) * std::exp(-s * std::log(Q));
    };
    // Chebyshev basis in q = Q / Qmax on (0, 1).
    Eigen::MatrixXd A(rows, P + 1);
    Eigen::VectorXcd b(rows);
    double fmax = 0.0;
    for (int i = 0; i < rows; ++i) {
        double u = std::cos(std::numbers::pi * (i + 0.5) / rows);
        double q = 0.5 * (u + 1.0);
        double t0 = 1.0, t1 = u;
        A(i, 0) = 1.0;
        if (P >= 1) A(i, 1) = u;
        for (int j = 2; j <= P; ++j) {
            double t2 = 2.0 * u * t1 - t0;
            A(i, j) = t2;
            t0 = t1;
            t1 = t2;
        }
        b(i) = F(q * Qmax);
        fmax = std::max(fmax, std::abs(b(i)));
    }
    Eigen::MatrixXcd Ac = A.cast<cplx>();
    Eigen::VectorXcd a = Ac.colPivHouseholderQr().solve(b);
    double resid = (Ac * a - b).cwiseAbs().maxCoeff() / fmax;

    // Monomial coefficients of T_j(2q - 1) by the three-term recurrence.
    std::vector<std::vector<double>> T(P + 1, std::vector<double>(P + 1, 0.0));
    T[0][0] = 1.0;
    if (P >= 1) {
        T[1][0] = -1.0;
        T[1][1] = 2.0;
    }
    for (int j = 2; j <= P; ++j)
        for (int i = 0; i <= j; ++i) {
            double v = -2.0 * T[j - 1][i] - T[j - 2][i];
            if (i > 0) v += 4.0 * T[j - 1][i - 1];
            T[j][i] = v;
        }
    std::vector<cplx> mono(P + 1, 0.0);
    for (int j = 0; j <= P; ++j)
        for (int i = 0; i <= j; ++i) mono[i] += a(j) * T[j][i];
    for (int i = 0; i <= P; ++i) mono[i] /= std::pow(Qmax, i);

    ExpansionCoeffs out;
    out.n = n;
    out.s = s;
    out.c.assign(mono.begin(), mono.begin() + J + 1);
    out.remainder_order = J + 1;
    out.fit_residual = resid;
    if (resid > 1e-10)
        throw AccuracyError("expansion_coeffs: polynomial fit residual above 1e-10", out.c[0], resid);
    if (std::abs(out.c[0]) == 0.0) throw AccuracyError("expansion_coeffs: leading coefficient vanished", 0.0, resid);
    // L_s is sampled on d in [2, d_hi], where Q^{J+1} >= 1e-12 keeps it above rounding noise.
    const double d_hi = std::clamp(27.6 / (J + 1), 2.0, 10.0);
    for (int i = 0; i <= 64; ++i) {
        double d = 2.0 + (d_hi - 2.0) * i / 64.0;
        double Q = std::exp(-d);
        cplx f = F(Q), sum = 0.0, qj = 1.0;
        for (int j = 0; j <= J; ++j, qj *= Q) sum += out.c[j] * qj;
        double diff = std::max(std::abs(f - sum), 1e3 * (J + 1) * 2.2e-16 * std::abs(f));
        out.remainder_constant = std::max(out.remainder_constant, diff / std::pow(Q, J + 1));
    }
    if (n == 2) {
        const double c0 = 0.5 / std::numbers::pi;
        for (int j = 0; j <= std::min(J, 4); ++j)
            if (std::abs(out.c[j] - (j % 2 == 0 ? c0 : 0.0)) > 1e-6)
                throw AccuracyError("expansion_coeffs: n = 2 coefficients miss the 1/(2 pi) pattern", out.c[j],
                                    std::abs(out.c[j]));
    }
    return out;
}

ContinuationResult poincare_continue(const CuspModel& model, cplx s, const HPoint& m, const HPoint& mp, int depth,
                                     const TruncationPolicy& policy)
{
    policy.validate();
    validate_point(model, m);
    validate_point(model, mp);
    const int n = model.n(), k = model.k();
    if (n != 2) throw CapabilityError("poincare_continue: n = 2 only");
    if (k != 1 && k != 2) throw CapabilityError("poincare_continue: rank 1 or 2 only");
    if (depth < 1 || 2 * depth > 20) throw InputError("poincare_continue: depth must lie in [1, 10]");
    if (cosh_dist(m, mp) - 1.0 < 1e-13) throw InputError("poincare_continue: m and m' coincide");
    const int J = 2 * depth;
    const double half_k = 0.5 * k;
    const int N_direct = k == 1 ? policy.N : std::max(8, static_cast<int>(std::sqrt(static_cast<double>(policy.N))) * 8);
    const int N_cap = k == 1 ? policy.N : std::max(8, policy.N / 20);

    ContinuationResult out;
    out.depth = depth;
    struct Value {
        cplx v;
        double err;
    };
    std::map<int, Value> memo;

    // Exact remainder sum_{a != 0} [R_H(s; d_a) - sum_{j <= J} c_j Q_a^{s+j}], shell by shell.
    auto remainder = [&](cplx sj, const ExpansionCoeffs& ec, double scale) -> Value {
        const double sig = sj.real() + J + 1.0;
        std::vector<cplx> shells;
        int A = 1;
        double bound = kInf;
        for (; A <= N_cap; ++A) {
            std::vector<cplx> vals;
            for (const auto& g : shell(k, A)) {
                double ch = cosh_dist(m, apply(model, g, mp));
                double d = std::acosh(ch);
                double Q = std::exp(-d);
                cplx poly = 0.0, qj = 1.0;
                for (int j = 0; j <= J; ++j, qj *= Q) poly += ec.c[j] * qj;
                vals.push_back(free_kernel(n, sj, ch) - poly * std::exp(-sj * d));
            }
            shells.push_back(detail::pairwise_sum(vals));
            if (A >= 4) {
                bound = std::max(ec.remainder_constant, 1e-300) * lattice_tail(model, m, mp, sig, A);
                if (bound <= 1e-3 * policy.tol * std::max(scale, 1e-300)) break;
            }
        }
        return {detail::pairwise_sum(shells), bound};
    };

    std::function<Value(int)> P = [&](int j) -> Value {
        if (auto it = memo.find(j); it != memo.end()) return it->second;
        const cplx sj = s + static_cast<double>(j);
        Value res;
        if (j > 0 && sj.real() > half_k + 1.0) {
            PoincareSum ps = poincare_direct(model, sj, m, mp, N_direct);
            res = {ps.value, ps.tail_bound};
        } else {
            for (int q = 0; q <= 64; ++q)
                if (std::abs(sj - (half_k - q)) < 1e-10)
                    throw PoleError("poincare_continue: s + j hits the resolvent pole set k/2 - N0", q);
            Value Rt;
            if (sj.real() > half_k + 0.25) {
                KernelResult kr = images_kernel(model, sj, m, mp, N_cap, true);
                Rt = {kr.value, kr.error_bound};
            } else {
                if (m.x == mp.x)
                    throw CapabilityError("poincare_continue: continuation below Re s = k/2 + 1/4 needs x != x'");
                KernelResult kr = cusp_kernel(model, sj, m, mp, policy);
                for (const auto& wmsg : kr.warnings) out.warnings.push_back(wmsg);
                cplx free = free_kernel(n, sj, cosh_dist(m, mp));
                Rt = {kr.value - free, kr.error_bound};
                if (!(kr.error_bound <= 1e3 * policy.tol * std::max(std::abs(kr.value), std::abs(free))))
                    throw AccuracyError("poincare_continue: continued resolvent is outside its validated accuracy",
                                        kr.value, kr.error_bound);
            }
            ExpansionCoeffs ec = expansion_coeffs(n, sj, J);
            cplx acc = Rt.v;
            double err = Rt.err;
            for (int i = 1; i <= J; ++i) {
                if (ec.c[i] == 0.0) continue;
                Value Pi = P(j + i);
                acc -= ec.c[i] * Pi.v;
                err += std::abs(ec.c[i]) * Pi.err;
            }
            Value E = remainder(sj, ec, std::abs(Rt.v));
            acc -= E.v;
            err += E.err;
            res = {acc / ec.c[0], err / std::abs(ec.c[0])};
        }
        memo[j] = res;
        return res;
    };
    Value top = P(0);
    out.value = top.v;
    out.error_bound = top.err;
    return out;
}

}  // namespace cusp
