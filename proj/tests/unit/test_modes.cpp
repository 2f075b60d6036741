#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cusp/modes.hpp"
#include "cusp/specfun.hpp"

using namespace cusp;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("harmonic dimensions")
{
    CHECK(harmonic_dimension(1, 0) == 1);
    CHECK(harmonic_dimension(1, 1) == 1);
    CHECK(harmonic_dimension(1, 2) == 0);
    CHECK(harmonic_dimension(2, 0) == 1);
    CHECK(harmonic_dimension(2, 5) == 2);
    CHECK(harmonic_dimension(3, 4) == 9);
    CHECK(harmonic_dimension(4, 2) == 9);
}

TEST_CASE("weight tables")
{
    WeightTable t = weight_multiplicities(0, 1, 3);
    CHECK(t.size() == 2);
    CHECK(t.at(IVec{3}) == 1);
    CHECK(t.at(IVec{-3}) == 1);
    WeightTable u = weight_multiplicities(1, 1, 2);
    CHECK(u.at(IVec{2}) == 1);
    CHECK(u.at(IVec{0}) == 1);
    CHECK(u.at(IVec{-2}) == 1);
    CHECK(u.at(IVec{1}) == 1);
    CHECK(weight_multiplicities(2, 0).begin()->first == IVec{0});
}

TEST_CASE("weight multiplicities sum to the harmonic dimension")
{
    for (int r = 0; r <= 2; ++r)
        for (int blocks = 0; blocks <= 2; ++blocks) {
            int d = r + 2 * blocks;
            if (d == 0) continue;
            for (int m = 0; m <= 7; ++m) {
                long sum = 0;
                for (const auto& [c, mult] : weight_multiplicities(r, blocks, m)) {
                    CHECK(mult > 0);
                    CHECK(static_cast<int>(c.size()) == blocks);
                    sum += mult;
                }
                CHECK(sum == harmonic_dimension(d, m));
            }
        }
}

TEST_CASE("thresholds of simple models")
{
    CuspModel unit(2, 1, {{1.0}}, 1, {});
    CHECK(threshold(unit, IVec{}, IVec{1}) == doctest::Approx(2 * kPi));
    CuspModel wide(2, 1, {{2.0}}, 1, {});
    CHECK(threshold(wide, IVec{}, IVec{1}) == doctest::Approx(kPi));
    CuspModel fifth(3, 1, {{1.0}}, 0, {{0.2}});
    CHECK(threshold(fifth, IVec{5}, IVec{-1}) == 0.0);
    CHECK(threshold(fifth, IVec{1}, IVec{0}) == doctest::Approx(2 * kPi * 0.2));
    CHECK(threshold_infimum(fifth, 4, 3) > 0.0);
    CHECK(threshold_infimum(fifth, 5, 3) == 0.0);
}

TEST_CASE("irrational holonomy thresholds accumulate at zero")
{
    CuspModel golden(3, 1, {{1.0}}, 0, {{0.6180339887498949}});
    double prev = threshold_infimum(golden, 5, 5);
    for (int M : {10, 30, 100}) {
        double cur = threshold_infimum(golden, M, M);
        CHECK(cur <= prev);
        CHECK(cur > 0.0);
        prev = cur;
    }
    CHECK(prev <= 0.05);
    CHECK(prev < threshold_infimum(golden, 10, 10));
}

TEST_CASE("mode enumeration is sorted and counted with multiplicity")
{
    CuspModel m(3, 1, {{1.0}}, 0, {{0.3}});
    auto modes = enumerate_modes(m, 4, 2);
    long total = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (i > 0) CHECK(modes[i - 1].b <= modes[i].b);
        CHECK(modes[i].b == doctest::Approx(threshold(m, modes[i])));
        CHECK(modes[i].nu == doctest::Approx(modes[i].m));
        total += modes[i].mult;
    }
    long expect = 0;
    for (int deg = 0; deg <= 4; ++deg) expect += harmonic_dimension(2, deg);
    CHECK(total == expect * 5);
}

TEST_CASE("harmonics are unit normalized")
{
    const int Nphi = 64, Nth = 48;
    for (int m = 0; m <= 3; ++m) {
        double acc = 0.0;
        for (int j = 0; j < Nphi; ++j) {
            double phi = 2 * kPi * j / Nphi;
            acc += std::norm(harmonic(2, m, IVec{m}, Vec{std::cos(phi), std::sin(phi)})) * 2 * kPi / Nphi;
        }
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int m = 0; m <= 3; ++m)
        for (const auto& [c, mult] : weight_multiplicities(1, 1, m)) {
            double acc = 0.0;
            for (int i = 0; i < Nth; ++i) {
                double th = kPi * (i + 0.5) / Nth;
                for (int j = 0; j < Nphi; ++j) {
                    double phi = 2 * kPi * j / Nphi;
                    Vec om{std::cos(th), std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi)};
                    acc += std::norm(harmonic(3, m, c, om)) * std::sin(th) * (kPi / Nth) * (2 * kPi / Nphi);
                }
            }
            CHECK(acc == doctest::Approx(1.0).epsilon(2e-3));
        }
}

TEST_CASE("eigenfunctions are quasi-periodic under the generators")
{
    CuspModel m(3, 1, {{1.3}}, 0, {{0.6180339887498949}});
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (const auto& I : enumerate_modes(m, 3, 1)) {
        double phi = kPi * U(g);
        Vec om{std::cos(phi), std::sin(phi)};
        Vec z{U(g)};
        HPoint rot = apply(m, GroupElement{{-1}}, HPoint{1.0, om, z});
        Vec zs{z[0] + 1.3};
        CHECK(std::abs(eigenfunction(m, I, zs, om) - eigenfunction(m, I, z, rot.y)) < 1e-12);
    }
}

TEST_CASE("radial profile and spectral density")
{
    for (double u : {0.0, 0.3, 2.0, 9.0}) {
        CHECK(radial_profile(2, 0, u) == doctest::Approx(bessel_J(0.0, u)));
        if (u > 0) CHECK(radial_profile(3, 1, u) == doctest::Approx(bessel_J(1.5, u) / std::sqrt(u)));
    }
    CHECK(radial_profile(3, 0, 0.0) == doctest::Approx(std::sqrt(2.0 / kPi)));
    CHECK(spectral_density(2, 1, 1.5, 0.4, 0.9) ==
          doctest::Approx(bessel_J(1.0, 0.6) * bessel_J(1.0, 1.35) * 1.5));
    CHECK(spectral_density(1.0, 1.5, 0.4, 0.9, 2) == doctest::Approx(spectral_density(2, 1, 1.5, 0.4, 0.9)));
}
