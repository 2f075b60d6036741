#include "cusp/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cusp/specfun.hpp"

namespace cusp {

namespace {

constexpr double kPi = std::numbers::pi;

long binom(long n, long k)
{
    if (k < 0 || n < k) return 0;
    k = std::min(k, n - k);
    long v = 1;
    for (long i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// Degree-e monomials in r weight-zero variables.
long trivial_count(int r, long e)
{
    if (e < 0) return 0;
    if (r == 0) return e == 0 ? 1 : 0;
    return binom(e + r - 1, r - 1);
}

// Ways to give each pair l a degree d_l >= |c_l| with d_l = |c_l| mod 2 and
// sum d_l = D.  Each pair then contributes exactly one monomial z^a zbar^b.
long pair_count(const IVec& c, long D)
{
    long base = 0;
    for (long cl : c) base += std::labs(cl);
    long rest = D - base;
    if (rest < 0 || rest % 2 != 0) return 0;
    if (c.empty()) return rest == 0 ? 1 : 0;
    long J = rest / 2;
    return binom(J + static_cast<long>(c.size()) - 1, static_cast<long>(c.size()) - 1);
}

long monomials(int r, const IVec& c, long m)
{
    if (m < 0) return 0;
    long total = 0;
    for (long e = 0; e <= m; ++e) total += trivial_count(r, e) * pair_count(c, m - e);
    return total;
}

void weights_rec(int blocks, int budget, IVec& prefix, std::vector<IVec>& out)
{
    if (static_cast<int>(prefix.size()) == blocks) {
        out.push_back(prefix);
        return;
    }
    for (long v = -budget; v <= budget; ++v) {
        prefix.push_back(v);
        weights_rec(blocks, budget - static_cast<int>(std::labs(v)), prefix, out);
        prefix.pop_back();
    }
}

void box_rec(int k, int V, IVec& prefix, std::vector<IVec>& out)
{
    if (static_cast<int>(prefix.size()) == k) {
        out.push_back(prefix);
        return;
    }
    for (long v = -V; v <= V; ++v) {
        prefix.push_back(v);
        box_rec(k, V, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

WeightTable weight_multiplicities(int trivial_dim, int blocks, int m)
{
    if (trivial_dim < 0 || blocks < 0 || trivial_dim + 2 * blocks < 1)
        throw InputError("weight_multiplicities: need r >= 0, blocks >= 0, r + 2 blocks >= 1");
    if (m < 0) throw InputError("weight_multiplicities: degree m must be nonnegative");
    std::vector<IVec> ws;
    IVec prefix;
    weights_rec(blocks, m, prefix, ws);
    WeightTable out;
    for (const auto& c : ws) {
        long mult = monomials(trivial_dim, c, m) - monomials(trivial_dim, c, m - 2);
        if (mult > 0) out[c] = mult;
    }
    return out;
}

WeightTable weight_multiplicities(int n_minus_k, int m)
{
    if (n_minus_k < 1) throw InputError("weight_multiplicities: n - k must be at least 1");
    return weight_multiplicities(n_minus_k % 2, n_minus_k / 2, m);
}

long harmonic_dimension(int d, int m)
{
    if (d < 1 || m < 0) throw InputError("harmonic_dimension: need d >= 1, m >= 0");
    return binom(m + d - 1, d - 1) - binom(m + d - 3, d - 1);
}

Vec mode_frequency(const CuspModel& model, const IVec& c, const IVec& vstar)
{
    if (static_cast<int>(c.size()) != model.blocks())
        throw InputError("mode: weight vector needs one entry per rotation block (" +
                         std::to_string(model.blocks()) + ")");
    if (static_cast<int>(vstar.size()) != model.k())
        throw InputError("mode: dual vector needs k = " + std::to_string(model.k()) + " entries");
    Vec w(model.k(), 0.0);
    for (int j = 0; j < model.k(); ++j) {
        double t = 0.0;
        for (int l = 0; l < model.blocks(); ++l)
            t += static_cast<double>(c[l]) * model.angles_turns()[l][j];
        w[j] = t + static_cast<double>(vstar[j]);
    }
    return w;
}

double threshold(const CuspModel& model, const IVec& c, const IVec& vstar)
{
    Vec w = mode_frequency(model, c, vstar);
    Vec v = model.dual_vector(w);
    double s = 0.0;
    for (double e : v) s += e * e;
    return 2.0 * kPi * std::sqrt(s);
}

double threshold(const CuspModel& model, const ModeIndex& I) { return threshold(model, I.c, I.vstar); }

ModeIndex make_mode(const CuspModel& model, int m, IVec c, IVec vstar, long mult)
{
    if (m < 0) throw InputError("mode: degree m must be nonnegative");
    ModeIndex I;
    I.m = m;
    I.c = std::move(c);
    I.vstar = std::move(vstar);
    I.mult = mult;
    I.b = threshold(model, I.c, I.vstar);
    I.nu = 0.5 * (model.fibre_dim() - 2) + m;
    return I;
}

double threshold_infimum(const CuspModel& model, int M, int V)
{
    if (M < 1 || V < 1) throw InputError("threshold_infimum: M and V must be at least 1");
    double best = std::numeric_limits<double>::infinity();
    std::vector<IVec> duals;
    IVec prefix;
    box_rec(model.k(), V, prefix, duals);
    for (int m = 0; m <= M; ++m) {
        for (const auto& [c, mult] : weight_multiplicities(model.trivial_dim(), model.blocks(), m)) {
            bool czero = std::all_of(c.begin(), c.end(), [](long v) { return v == 0; });
            for (const auto& q : duals) {
                bool qzero = std::all_of(q.begin(), q.end(), [](long v) { return v == 0; });
                if (czero && qzero) continue;
                best = std::min(best, threshold(model, c, q));
            }
        }
    }
    return best;
}

std::vector<ModeIndex> enumerate_modes(const CuspModel& model, int M, int V)
{
    if (M < 0 || V < 0) throw InputError("enumerate_modes: cutoffs must be nonnegative");
    std::vector<IVec> duals;
    IVec prefix;
    box_rec(model.k(), V, prefix, duals);
    std::vector<ModeIndex> out;
    for (int m = 0; m <= M; ++m)
        for (const auto& [c, mult] : weight_multiplicities(model.trivial_dim(), model.blocks(), m))
            for (const auto& q : duals) out.push_back(make_mode(model, m, c, q, mult));
    std::stable_sort(out.begin(), out.end(), [](const ModeIndex& a, const ModeIndex& b) {
        if (a.b != b.b) return a.b < b.b;
        if (a.m != b.m) return a.m < b.m;
        if (a.c != b.c) return a.c < b.c;
        return a.vstar < b.vstar;
    });
    return out;
}

cplx harmonic(int d, int m, const IVec& c, const Vec& omega)
{
    if (static_cast<int>(omega.size()) != d) throw InputError("harmonic: omega must have length d");
    switch (d) {
    case 1:
        if (m == 0) return 1.0 / std::sqrt(2.0);
        if (m == 1) return (omega[0] >= 0.0 ? 1.0 : -1.0) / std::sqrt(2.0);
        throw InputError("harmonic: S^0 carries only degrees 0 and 1");
    case 2: {
        if (c.size() != 1 || std::labs(c[0]) != m) throw InputError("harmonic: circle weight must be +-m");
        double phi = std::atan2(omega[1], omega[0]);
        return std::polar(1.0 / std::sqrt(2.0 * kPi), -static_cast<double>(c[0]) * phi);
    }
    case 3: {
        if (c.size() != 1 || std::labs(c[0]) > m) throw InputError("harmonic: sphere weight must satisfy |c| <= m");
        double ct = std::clamp(omega[0], -1.0, 1.0);
        double theta = std::acos(ct);
        double phi = std::atan2(omega[2], omega[1]);
        double p = std::sph_legendre(static_cast<unsigned>(m), static_cast<unsigned>(std::labs(c[0])), theta);
        return p * std::polar(1.0, -static_cast<double>(c[0]) * phi);
    }
    default:
        throw CapabilityError("eigenfunction: pointwise harmonics implemented for n - k in {1, 2, 3} only, got " +
                              std::to_string(d));
    }
}

cplx eigenfunction(const CuspModel& model, const ModeIndex& I, const Vec& z, const Vec& omega)
{
    int d = model.fibre_dim();
    if (d < 1 || d > 3)
        throw CapabilityError("eigenfunction: pointwise harmonics implemented for n - k in {1, 2, 3} only, got " +
                              std::to_string(d));
    if (static_cast<int>(z.size()) != model.k()) throw InputError("eigenfunction: z must have length k");
    Vec w = mode_frequency(model, I.c, I.vstar);
    double phase = 0.0;
    for (int j = 0; j < model.k(); ++j) {
        double zj = 0.0;
        for (int i = 0; i < model.k(); ++i) zj += z[i] * model.dual_basis()[j][i];
        phase += w[j] * zj;
    }
    double turns = phase - std::round(phase);
    return std::polar(1.0 / std::sqrt(model.covolume()), 2.0 * kPi * turns) * harmonic(d, I.m, I.c, omega);
}

double radial_profile(int d, int m, double u)
{
    if (d < 1 || m < 0) throw InputError("radial_profile: need d >= 1, m >= 0");
    if (!(u >= 0.0)) throw InputError("radial_profile: argument must be nonnegative");
    if (d == 1) {
        // u^{1/2} J_{m - 1/2}(u): sqrt(2/pi) cos u for m = 0, sqrt(2/pi) sin u for m = 1.
        if (m == 0) return std::sqrt(2.0 / kPi) * std::cos(u);
        return std::sqrt(u) * std::cyl_bessel_j(m - 0.5, u);
    }
    double nu = 0.5 * (d - 2) + m;
    double h = 0.5 * (d - 2);
    if (u < 1e-8) {
        if (m > 0) return u == 0.0 ? 0.0 : std::pow(u, m) * std::pow(0.5, nu) / std::tgamma(nu + 1.0);
        return std::pow(0.5, nu) / std::tgamma(nu + 1.0);
    }
    return std::pow(u, -h) * bessel_J(nu, u);
}

double spectral_density(int d, int m, double t, double r, double rp)
{
    if (!(t >= 0.0) || !(r >= 0.0) || !(rp >= 0.0))
        throw InputError("spectral_density: t, r, r' must be nonnegative");
    // (r r')^{-(d-2)/2} J J t = t^{d-1} g(rt) g(r't)
    return std::pow(t, d - 1) * radial_profile(d, m, r * t) * radial_profile(d, m, rp * t);
}

double spectral_density(double nu, double t, double r, double rp, int n_minus_k)
{
    double mm = nu - 0.5 * (n_minus_k - 2);
    int m = static_cast<int>(std::lround(mm));
    if (std::abs(mm - m) > 1e-12 || m < 0)
        throw InputError("spectral_density: nu must equal (n-k-2)/2 + m for an integer m >= 0");
    return spectral_density(n_minus_k, m, t, r, rp);
}

}  // namespace cusp
