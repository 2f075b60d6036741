// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// gating criterion fails.  Criterion 11 only writes a diagnostic.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cusp/counting.hpp"
#include "cusp/geometry.hpp"
#include "cusp/modes.hpp"
#include "cusp/resolvent.hpp"
#include "cusp/scattering.hpp"
#include "cusp/specfun.hpp"

#ifndef CUSP_TEST_DATA_DIR
#define CUSP_TEST_DATA_DIR "tests/data"
#endif

using namespace cusp;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Running maximum that lets a NaN through as +inf instead of dropping it.
void track(double& worst, double e)
{
    if (std::isnan(e)) e = std::numeric_limits<double>::infinity();
    worst = std::max(worst, e);
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

CuspModel golden_h4() { return CuspModel(3, 1, {{1.0}}, 0, {{0.6180339887498949}}); }
CuspModel unit_h3() { return CuspModel(2, 1, {{1.0}}, 1, {}); }

// Off-diagonal pairs for the mode sum.  The cost of a mode sum grows like
// 1/|x - x'|, so the heights are kept apart.
std::vector<std::pair<HPoint, HPoint>> point_pairs(const CuspModel& model, int count, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.5, 0.5), X(0.6, 2.0);
    std::vector<std::pair<HPoint, HPoint>> out;
    while (static_cast<int>(out.size()) < count) {
        HPoint a, b;
        a.x = X(rng);
        b.x = X(rng);
        if (std::abs(a.x - b.x) < 0.45) continue;
        for (int i = 0; i < model.fibre_dim(); ++i) {
            a.y.push_back(U(rng));
            b.y.push_back(U(rng));
        }
        for (int i = 0; i < model.k(); ++i) {
            a.z.push_back(U(rng));
            b.z.push_back(U(rng));
        }
        out.emplace_back(a, b);
    }
    return out;
}

Outcome special_function_oracles()
{
    std::ifstream in(std::string(CUSP_TEST_DATA_DIR) + "/specfun_oracle.txt");
    if (!in) return {false, "oracle table not found"};
    double worst = 0.0;
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string kind;
        ss >> kind;
        double err = 0.0;
        if (kind == "gamma") {
            double a, b, re, im;
            ss >> a >> b >> re >> im;
            cplx ref(re, im);
            err = std::abs(cusp::gamma(cplx(a, b)) - ref) / std::abs(ref);
        } else if (kind == "J") {
            // relative away from zeros, absolute near them
            double nu, t, ref;
            ss >> nu >> t >> ref;
            err = std::abs(bessel_J(nu, t) - ref) / std::max(1.0, std::abs(ref));
        } else if (kind == "Is" || kind == "Ks") {
            double a, b, t, re, im;
            ss >> a >> b >> t >> re >> im;
            cplx ref(re, im);
            cplx got = kind == "Is" ? bessel_I_scaled(cplx(a, b), t) : bessel_K_scaled(cplx(a, b), t);
            err = std::abs(got - ref) / std::abs(ref);
        } else {
            continue;
        }
        track(worst, err);
        ++rows;
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double wr = 0.0, refl = 0.0;
    for (int i = 0; i < 200; ++i) {
        cplx lam(3.0 * U(rng), 3.0 * U(rng));
        double t = std::exp(3.0 * U(rng));
        BesselIK b = bessel_IK_scaled(lam, t);
        // measured against the size of the two products, which cancel to -1/t
        double scale = t * (std::abs(b.I * b.Kp) + std::abs(b.Ip * b.K));
        track(wr, std::abs((b.I * b.Kp - b.Ip * b.K) * t + 1.0) / scale);
        cplx s(0.5 + 4.0 * U(rng), 2.0 * U(rng));
        track(refl, std::abs(cusp::gamma(s) * cusp::gamma(1.0 - s) * std::sin(kPi * s) / kPi - 1.0));
    }
    bool ok = rows == 500 && worst <= 1e-10 && wr <= 1e-10 && refl <= 1e-10;
    return {ok, std::to_string(rows) + " rows, max rel err " + fmt("%.2e", worst) + ", Wronskian " +
                    fmt("%.2e", wr) + ", reflection " + fmt("%.2e", refl)};
}

Outcome free_kernel_ode()
{
    double worst = 0.0;
    const double h = 1e-3;
    for (int n : {1, 2, 3})
        for (cplx s : {cplx(0.5 * n + 0.8, 0.0), cplx(0.5 * n + 0.3, 1.1)})
            for (double d : {0.5, 1.0, 2.0}) {
                auto u = [&](double r) { return free_kernel_d(n, s, r); };
                cplx u0 = u(d), up = u(d + h), um = u(d - h), up2 = u(d + 2 * h), um2 = u(d - 2 * h);
                cplx d1 = (-up2 + 8.0 * up - 8.0 * um + um2) / (12.0 * h);
                cplx d2 = (-up2 + 16.0 * up - 30.0 * u0 + 16.0 * um - um2) / (12.0 * h * h);
                cplx res = -d2 - static_cast<double>(n) / std::tanh(d) * d1 - s * (static_cast<double>(n) - s) * u0;
                track(worst, std::abs(res) / std::abs(u0));
            }
    double d = 1e-3, norm = 0.0;
    for (cplx s : {cplx(1.5, 0.0), cplx(1.2, 0.5)})
        track(norm, std::abs(free_kernel_d(2, s, d) * 4.0 * kPi * d - 1.0));
    return {worst <= 1e-6 && norm <= 1e-3,
            "radial residual " + fmt("%.2e", worst) + ", |4 pi d G - 1| at d=1e-3 " + fmt("%.2e", norm)};
}

Outcome cross_method(const std::vector<cplx>& svals, const std::vector<CuspModel>& models, double rel_tol,
                     bool need_bound)
{
    TruncationPolicy pol;
    pol.tol = 1e-9;
    double worst_rel = 0.0, worst_ratio = 0.0;
    int evals = 0;
    unsigned seed = 11;
    for (const auto& model : models) {
        for (const auto& [a, b] : point_pairs(model, 10, seed++))
            for (cplx s : svals) {
                KernelResult km = cusp_kernel(model, s, a, b, pol);
                KernelResult ki = images_kernel(model, s, a, b, pol.N);
                double diff = std::abs(km.value - ki.value);
                track(worst_rel, diff / std::abs(ki.value));
                track(worst_ratio, diff / (km.error_bound + ki.error_bound));
                ++evals;
            }
    }
    bool ok = worst_rel <= rel_tol && (!need_bound || worst_ratio <= 1.0);
    return {ok, std::to_string(evals) + " evaluations, max rel diff " + fmt("%.2e", worst_rel) +
                    ", max diff/bound " + fmt("%.2e", worst_ratio)};
}

Outcome pde_residual_check()
{
    TruncationPolicy pol;
    pol.tol = 1e-11;
    const cplx s(2.2, 0.5);
    struct Case {
        CuspModel model;
        HPoint w, wp;
    };
    CuspModel h3 = unit_h3(), h4 = golden_h4();
    std::vector<Case> cases = {
        {h3, {1.0, {0.3}, {0.1}}, {1.6, {-0.2}, {0.45}}},
        {h3, {0.8, {-0.1}, {0.7}}, {1.4, {0.25}, {0.05}}},
        {h3, {1.5, {0.4}, {-0.3}}, {0.9, {0.0}, {0.2}}},
        {h4, {1.0, {0.3, 0.2}, {0.1}}, {1.6, {-0.2, 0.1}, {0.45}}},
        {h3, {1.2, {-0.35}, {-0.6}}, {0.7, {0.2}, {0.3}}},
    };
    double worst = 0.0, worst_ratio = 1e300;
    for (const auto& c : cases) {
        auto u = [&](const HPoint& w) { return cusp_kernel(c.model, s, w, c.wp, pol).value; };
        double r1 = pde_residual(u, s, c.model.n(), c.w, 4e-3);
        double r2 = pde_residual(u, s, c.model.n(), c.w, 2e-3);
        track(worst, r2);
        if (!(r1 / r2 >= worst_ratio)) worst_ratio = r1 / r2;
    }
    // second order: halving h divides the residual by about 4
    bool ok = worst <= 1e-4 && worst_ratio >= 3.0;
    return {ok, "max residual " + fmt("%.2e", worst) + " at h=2e-3, min ratio r(h)/r(h/2) " + fmt("%.2f", worst_ratio)};
}

Outcome thresholds()
{
    CuspModel golden = golden_h4();
    double big = threshold_infimum(golden, 100, 100), small = threshold_infimum(golden, 10, 10);
    CuspModel fifth(3, 1, {{1.0}}, 0, {{0.2}});
    double at5 = threshold(fifth, IVec{5}, IVec{-1});
    double below = threshold_infimum(fifth, 4, 4);
    bool ok = big <= 0.05 && big < small && at5 == 0.0 && below > 0.0;
    return {ok, "golden inf(100,100) " + fmt("%.3e", big) + ", inf(10,10) " + fmt("%.3e", small) +
                    ", fifth-turn b(m=5) " + fmt("%g", at5) + ", inf(4,4) " + fmt("%.3e", below)};
}

Outcome counting()
{
    std::vector<double> radii;
    for (int R = 10; R <= 30; ++R) radii.push_back(R);
    CuspModel r1 = unit_h3();
    HPoint o1{1.0, {0.0}, {0.0}};
    CountProfile p1 = orbit_count(r1, o1, o1, radii);
    DeltaFit f1 = delta_fit(p1, 10, 30);
    CuspModel r2(2, 2, {{1.0, 0.0}, {0.0, 1.0}}, 0, {});
    HPoint o2{1.0, {}, {0.0, 0.0}};
    CountProfile p2 = orbit_count(r2, o2, o2, radii);
    DeltaFit f2 = delta_fit(p2, 10, 30);
    bool ok = p1.counts.front() == 296 && std::abs(f1.delta - 0.5) <= 0.01 && std::abs(f2.delta - 1.0) <= 0.02;
    return {ok, "N(10) = " + std::to_string(p1.counts.front()) + ", delta rank 1 " + fmt("%.5f", f1.delta) +
                    ", rank 2 " + fmt("%.5f", f2.delta)};
}

Outcome continuation()
{
    CuspModel h3 = unit_h3();
    HPoint m{1.0, {0.3}, {0.1}}, mp{1.6, {-0.2}, {0.45}};
    TruncationPolicy pol;
    pol.tol = 1e-9;
    PoincareSum direct = poincare_direct(h3, 2.0, m, mp, 4000);
    ContinuationResult cont = poincare_continue(h3, 2.0, m, mp, 2, pol);
    double overlap = std::abs(cont.value - direct.value) / std::abs(direct.value);

    // For n = 2, (4 pi sinh d)^{-1} e^{-(s-1)d} = (2 pi)^{-1} sum_i e^{-(s+2i)d}.
    KernelResult quotient = cusp_kernel(h3, 2.0, m, mp, pol);
    cplx rt = quotient.value - free_kernel(2, 2.0, cosh_dist(m, mp));
    cplx series = 0.0;
    for (int i = 0; i <= 12; ++i) series += poincare_direct(h3, 2.0 + 2.0 * i, m, mp, 4000).value / (2.0 * kPi);
    double identity = std::abs(rt - series) / std::abs(rt);

    std::vector<cplx> deep;
    for (int depth : {3, 4, 5}) deep.push_back(poincare_continue(h3, 0.3, m, mp, depth, pol).value);
    double drift = 0.0;
    for (const cplx& v : deep) track(drift, std::abs(v - deep.back()) / std::abs(deep.back()));
    bool ok = overlap <= 1e-4 && identity <= 1e-6 && drift <= 1e-3;
    return {ok, "overlap " + fmt("%.2e", overlap) + ", expansion identity " + fmt("%.2e", identity) +
                    ", s=0.3 value " + fmt("%.10f", deep.back().real()) + " drift " + fmt("%.2e", drift)};
}

Outcome scattering_identities()
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double prod = 0.0, unit = 0.0;
    for (int i = 0; i < 100; ++i) {
        int n = 1 + i % 3;
        cplx s(0.5 * n + 2.3 * U(rng), 2.0 * U(rng));
        double mu = std::exp(3.0 * U(rng));
        ComplexSpectral S(s, n), Sb(static_cast<double>(n) - s, n);
        track(prod, std::abs(scattering_multiplier(S, mu) * scattering_multiplier(Sb, mu) - 1.0));
        ComplexSpectral C(cplx(0.5 * n, 0.05 + 3.0 * std::abs(U(rng))), n);
        track(unit, std::abs(std::abs(scattering_multiplier(C, mu)) - 1.0));
    }
    double fm = 0.0, fp = 0.0;
    for (cplx s : {cplx(1.4, 0.0), cplx(1.7, 0.5), cplx(0.6, 0.2)})
        for (double mu : {0.5, 2.0}) {
            ComplexSpectral S(s, 2);
            std::vector<std::pair<double, cplx>> samples;
            for (int i = 0; i < 40; ++i) {
                double x = 1e-4 * std::pow(10.0, 3.0 * i / 39.0);
                samples.emplace_back(x, poisson_mode(S, mu, x));
            }
            BoundaryExpansion e = extract_expansion(samples, S, 3);
            cplx mult = scattering_multiplier(S, mu);
            track(fm, std::abs(e.F_minus - 1.0));
            track(fp, std::abs(e.F_plus - mult) / std::abs(mult));
        }
    bool ok = prod <= 1e-12 && unit <= 1e-12 && fm <= 1e-6 && fp <= 1e-6;
    return {ok, "product " + fmt("%.2e", prod) + ", unitarity " + fmt("%.2e", unit) + ", F- err " + fmt("%.2e", fm) +
                    ", F+ rel err " + fmt("%.2e", fp)};
}

Outcome poisson_relation()
{
    CuspModel h3 = unit_h3();
    TruncationPolicy pol;
    pol.tol = 1e-9;
    HPoint w{1.0, {0.3}, {0.1}}, b{0.0, {-0.2}, {0.45}};
    PoissonEstimate pe = poisson_from_resolvent(h3, 1.4, w, b, pol);
    KernelResult ps = poisson_synthesis(h3, 1.4, w, b, pol);
    double rel = std::abs(pe.value - ps.value) / std::abs(ps.value);
    bool ok = pe.change <= 1e-3 && rel <= 1e-3;
    return {ok, "extrapolation change " + fmt("%.2e", pe.change) + ", vs synthesis " + fmt("%.2e", rel)};
}

Outcome resolvent_jump()
{
    CuspModel h3 = unit_h3();
    TruncationPolicy pol;
    pol.tol = 1e-8;
    HPoint w{1.0, {0.3}, {0.1}}, wp{1.6, {-0.2}, {0.45}};
    JumpCheck j = resolvent_jump_check(h3, cplx(1.0, 0.3), w, wp, pol);
    return {j.residual <= 5e-2, "residual " + fmt("%.2e", j.residual) + ", truncation " + fmt("%.2e", j.truncation) +
                                    ", boundary points " + std::to_string(j.boundary_points)};
}

}  // namespace

int main(int argc, char** argv)
{
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    std::string diag_path = argc > 1 ? argv[1] : "acceptance_diagnostics.txt";
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        bool gating;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria = {
        {1, "special-function oracles", 30, true, special_function_oracles},
        {2, "free-kernel radial equation", 10, true, free_kernel_ode},
        {3, "cross-method resolvent equivalence", 300, true,
         [] { return cross_method({2.2, cplx(2.2, 1.0), 3.0}, {golden_h4(), unit_h3()}, 1e-4, true); }},
        {4, "continuation strip agreement", 300, true,
         [] { return cross_method({1.2, cplx(1.0, 0.5)}, {golden_h4()}, 1e-3, false); }},
        {5, "PDE residual of the mode sum", 120, true, pde_residual_check},
        {6, "threshold accumulation", 5, true, thresholds},
        {7, "orbit counting exponent", 30, true, counting},
        {8, "Poincare series continuation", 120, true, continuation},
        {9, "scattering identities", 10, true, scattering_identities},
        {10, "Poisson kernel from the resolvent", 180, true, poisson_relation},
        {11, "resolvent jump (non-gating)", 900, false, resolvent_jump},
    };

    int failures = 0;
    std::ofstream diag;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += ", over the " + fmt("%.0f", c.budget_s) + " s budget";
        }
        std::printf("CRITERION %d %s: %s (%s; %.1f s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs);
        if (!o.pass) {
            if (c.gating) {
                ++failures;
            } else {
                if (!diag.is_open()) diag.open(diag_path);
                diag << "criterion " << c.id << " (" << c.name << "): " << o.detail << "\n";
                std::printf("  diagnostic written to %s\n", diag_path.c_str());
            }
        }
    }
    std::printf("%d gating criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
