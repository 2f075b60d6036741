#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cusp/counting.hpp"

using namespace cusp;

namespace {

long long brute_count(const CuspModel& m, const HPoint& a, const HPoint& b, double R, int N)
{
    long long c = 0;
    for (const auto& g : enumerate(m, N)) {
        if (std::all_of(g.a.begin(), g.a.end(), [](long v) { return v == 0; })) continue;
        if (dist(a, apply(m, g, b)) <= R) ++c;
    }
    return c;
}

}  // namespace

TEST_CASE("unit lattice count at radius ten")
{
    CuspModel m(2, 1, {{1.0}}, 1, {});
    HPoint o{1.0, {0.0}, {0.0}};
    CountProfile p = orbit_count(m, o, o, {1.0, 5.0, 10.0});
    CHECK(p.counts[0] == 2);  // a = +-1 at distance arccosh(1.5)
    CHECK(p.counts[2] == 296);
    CHECK_THROWS_AS(orbit_count(m, o, o, {2.0, 1.0}), InputError);
}

TEST_CASE("orbit counts match brute force")
{
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int trial = 0; trial < 6; ++trial) {
        bool rank2 = trial % 2 == 1;
        CuspModel m = rank2 ? CuspModel(3, 2, {{1.0, 0.0}, {0.3 + U(g), 1.1}}, 1, {})
                            : CuspModel(3, 1, {{0.8 + U(g)}}, 0, {{U(g)}});
        HPoint a{0.7 + U(g) + 0.5, {U(g)}, {U(g)}}, b{0.9 + U(g) + 0.5, {U(g)}, {U(g)}};
        if (!rank2) {
            a = HPoint{1.0 + U(g), {U(g), U(g)}, {U(g)}};
            b = HPoint{1.0 + U(g), {U(g), U(g)}, {U(g)}};
        } else {
            a.z.push_back(U(g));
            b.z.push_back(U(g));
        }
        std::vector<double> radii = {2.0, 4.0, 6.0};
        CountProfile p = orbit_count(m, a, b, radii);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            CHECK(p.counts[i] == brute_count(m, a, b, radii[i], rank2 ? 60 : 400));
            if (i > 0) CHECK(p.counts[i] >= p.counts[i - 1]);
        }
    }
}

TEST_CASE("delta fit on exact exponential data")
{
    CountProfile p;
    for (int i = 0; i < 10; ++i) {
        p.radii.push_back(i);
        p.counts.push_back(std::llround(std::exp(0.5 * i) * 1000.0));
    }
    DeltaFit f = delta_fit(p, 0.0, 9.0);
    CHECK(f.delta == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(f.points == 10);
    CHECK(f.r2 > 0.9999);
    CHECK_THROWS_AS(delta_fit(p, 0.0, 3.0), InputError);
}

TEST_CASE("direct Poincare sum")
{
    CuspModel m(2, 1, {{1.0}}, 1, {});
    HPoint a{1.0, {0.3}, {0.1}}, b{1.6, {-0.2}, {0.45}};
    PoincareSum p = poincare_direct(m, 2.0, a, b, 10);
    cplx by_hand = 0.0;
    for (int j = -10; j <= 10; ++j)
        if (j != 0) by_hand += std::exp(-2.0 * dist(a, apply(m, GroupElement{{j}}, b)));
    CHECK(std::abs(p.value - by_hand) < 1e-14);
    CHECK(p.terms == 20);
    PoincareSum big = poincare_direct(m, 2.0, a, b, 1000);
    CHECK(std::abs(big.value - p.value) <= p.tail_bound);
    PoincareSum slow = poincare_direct(m, 0.4, a, b, 10);
    CHECK(std::isinf(slow.tail_bound));
    CHECK(!slow.warnings.empty());
}

TEST_CASE("H^3 expansion coefficients")
{
    ExpansionCoeffs e = expansion_coeffs(2, 2.0, 8);
    REQUIRE(e.c.size() == 9);
    const double c0 = 1.0 / (2.0 * std::numbers::pi);
    CHECK(std::abs(e.c[0] - c0) < 1e-12);
    CHECK(std::abs(e.c[1]) < 1e-10);
    CHECK(std::abs(e.c[2] - c0) < 1e-8);
    CHECK(std::abs(e.c[4] - c0) < 1e-6);
    CHECK(e.remainder_order == 9);
    CHECK_THROWS_AS(expansion_coeffs(3, 2.0, 4), CapabilityError);
}

TEST_CASE("expansion reconstructs the free kernel")
{
    for (int n : {1, 2}) {
        cplx s(1.3, 0.6);
        ExpansionCoeffs e = expansion_coeffs(n, s, 20);
        for (double d : {2.0, 3.0, 6.0}) {
            double Q = std::exp(-d);
            cplx sum = 0.0;
            for (int j = 20; j >= 0; --j) sum = sum * Q + e.c[static_cast<std::size_t>(j)];
            sum *= std::exp(-s * d);
            cplx ref = free_kernel_d(n, s, d);
            CHECK(std::abs(sum - ref) < 1e-9 * std::abs(ref));
        }
    }
}

TEST_CASE("continuation agrees with the direct sum where both converge")
{
    CuspModel m(2, 1, {{1.0}}, 1, {});
    HPoint a{1.0, {0.3}, {0.1}}, b{1.6, {-0.2}, {0.45}};
    TruncationPolicy p;
    p.tol = 1e-9;
    PoincareSum d = poincare_direct(m, 2.0, a, b, 4000);
    ContinuationResult c = poincare_continue(m, 2.0, a, b, 2, p);
    CHECK(std::abs(c.value - d.value) < 1e-6 * std::abs(d.value));
    CHECK_THROWS_AS(poincare_continue(m, 0.5, a, b, 2, p), PoleError);
    CHECK_THROWS_AS(poincare_continue(m, 2.0, a, b, 0, p), InputError);
    CuspModel h4(3, 1, {{1.0}}, 0, {{0.2}});
    CHECK_THROWS_AS(poincare_continue(h4, 2.0, HPoint{1.0, {0, 0}, {0}}, HPoint{1.5, {0, 0}, {0}}, 2, p),
                    CapabilityError);
}
