#include <doctest.h>

#include <cmath>
#include <random>

#include "cusp/scattering.hpp"

using namespace cusp;

TEST_CASE("multiplier closed form and poles")
{
    cplx v = scattering_multiplier(ComplexSpectral(1.5, 2), 1.0);
    CHECK(std::abs(v - cplx(-1.0)) < 1e-14);
    CHECK(std::abs(scattering_multiplier(ComplexSpectral(1.5, 2), 4.0) - cplx(-2.0)) < 1e-13);
    CHECK_THROWS_AS(scattering_multiplier(ComplexSpectral(2.0, 2), 1.0), PoleError);
    CHECK_THROWS_AS(scattering_multiplier(ComplexSpectral(1.0, 2), 1.0), InputError);
    CHECK_THROWS_AS(scattering_multiplier(ComplexSpectral(1.5, 2), 0.0), InputError);
}

TEST_CASE("multiplier functional equation and unitarity")
{
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        int n = 1 + i % 3;
        cplx s(0.5 * n + 2.0 * U(g), 2.0 * U(g));
        double mu = std::exp(2.0 * U(g));
        ComplexSpectral a(s, n), b(static_cast<double>(n) - s, n);
        CHECK(std::abs(scattering_multiplier(a, mu) * scattering_multiplier(b, mu) - 1.0) < 1e-12);
        ComplexSpectral c(cplx(0.5 * n, 0.1 + std::abs(U(g))), n);
        CHECK(std::abs(std::abs(scattering_multiplier(c, mu)) - 1.0) < 1e-12);
    }
}

TEST_CASE("Poisson mode normalization and decay")
{
    ComplexSpectral s(cplx(1.4, 0.3), 2);
    double x = 1e-7;
    cplx lead = poisson_mode(s, 2.0, x) / std::pow(cplx(x), 2.0 - s.s);
    CHECK(std::abs(lead - 1.0) < 1e-3);
    double mu = 4.0;
    double x1 = 20.0, x2 = 21.0;
    double slope = std::log(std::abs(poisson_mode(s, mu, x2)) / std::abs(poisson_mode(s, mu, x1)));
    // e^{-x sqrt(mu)} x^{(n-1)/2}
    CHECK(slope == doctest::Approx(-2.0 + 0.5 * std::log(x2 / x1)).epsilon(1e-2));
    CHECK_THROWS_AS(poisson_mode(ComplexSpectral(2.0, 2), 1.0, 1.0), PoleError);
    CHECK_THROWS_AS(poisson_mode(s, 0.0, 1.0), InputError);
}

TEST_CASE("expansion fit recovers synthetic coefficients")
{
    ComplexSpectral s(cplx(1.6, 0.2), 2);
    std::vector<std::pair<double, cplx>> samples;
    for (int i = 0; i < 30; ++i) {
        double x = 1e-3 * std::pow(10.0, 2.5 * i / 29.0);
        samples.emplace_back(x, 3.0 * std::pow(cplx(x), 2.0 - s.s) + 5.0 * std::pow(cplx(x), s.s));
    }
    BoundaryExpansion e = extract_expansion(samples, s, 2);
    CHECK(std::abs(e.F_minus - 3.0) < 1e-8);
    CHECK(std::abs(e.F_plus - 5.0) < 1e-6);
    CHECK(e.residual < 1e-10);
    CHECK(e.samples == 30);
    CHECK_THROWS_AS(extract_expansion(samples, ComplexSpectral(1.02, 2), 2), ConditioningError);
    samples.resize(4);
    CHECK_THROWS_AS(extract_expansion(samples, s, 2), InputError);
}

TEST_CASE("expansion of the Poisson mode gives the multiplier")
{
    for (cplx sv : {cplx(1.4, 0.0), cplx(1.7, 0.5), cplx(0.6, 0.2)}) {
        ComplexSpectral s(sv, 2);
        std::vector<std::pair<double, cplx>> samples;
        for (int i = 0; i < 40; ++i) {
            double x = 1e-4 * std::pow(10.0, 3.0 * i / 39.0);
            samples.emplace_back(x, poisson_mode(s, 2.0, x));
        }
        BoundaryExpansion e = extract_expansion(samples, s, 3);
        CHECK(std::abs(e.F_minus - 1.0) < 1e-6);
        CHECK(std::abs(e.F_plus - scattering_multiplier(s, 2.0)) < 1e-6);
    }
}

TEST_CASE("Poisson kernel by images agrees with mode synthesis")
{
    CuspModel m(2, 1, {{1.0}}, 1, {});
    TruncationPolicy p;
    p.tol = 1e-9;
    HPoint w{1.0, {0.3}, {0.1}}, b{0.0, {-0.2}, {0.45}};
    KernelResult img = poisson_images(m, 1.4, w, b, 200);
    KernelResult syn = poisson_synthesis(m, 1.4, w, b, p);
    CHECK(std::abs(img.value - syn.value) < 1e-6 * std::abs(syn.value));
    CHECK_THROWS_AS(poisson_images(m, 0.4, w, b, 10), InputError);
}
