#include <doctest.h>

#include <cmath>

#include "cusp/resolvent.hpp"

using namespace cusp;

namespace {

CuspModel unit_h3() { return CuspModel(2, 1, {{1.0}}, 1, {}); }

TruncationPolicy policy(double tol)
{
    TruncationPolicy p;
    p.tol = tol;
    return p;
}

}  // namespace

TEST_CASE("radial factor at half-integer order")
{
    ComplexSpectral s(1.5, 2);
    cplx v = radial_factor(s, 1.0, 1.0, 1.0);
    CHECK(v.real() == doctest::Approx(0.43233235838169365).epsilon(1e-13));
    CHECK(std::abs(v.imag()) < 1e-15);
    cplx a = radial_factor(ComplexSpectral(cplx(2.1, 0.4), 3), 0.7, 1.9, 2.5);
    cplx b = radial_factor(ComplexSpectral(cplx(2.1, 0.4), 3), 1.9, 0.7, 2.5);
    CHECK(std::abs(a - b) < 1e-15 * std::abs(a));
}

TEST_CASE("truncation policy validation")
{
    TruncationPolicy p;
    CHECK_NOTHROW(p.validate());
    p.tol = 0.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = TruncationPolicy{};
    p.M = -1;
    CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("images kernel with no translates is the free kernel")
{
    CuspModel m = unit_h3();
    HPoint a{1.0, {0.3}, {0.1}}, b{1.6, {-0.2}, {0.45}};
    KernelResult r = images_kernel(m, 2.0, a, b, 0);
    CHECK(std::abs(r.value - free_kernel(2, 2.0, cosh_dist(a, b))) < 1e-15);
}

TEST_CASE("images kernel is invariant under the group")
{
    CuspModel m(3, 1, {{1.0}}, 0, {{0.37}});
    HPoint a{1.0, {0.3, 0.2}, {0.1}}, b{1.6, {-0.2, 0.1}, {0.45}};
    KernelResult r = images_kernel(m, 2.5, a, b, 400);
    GroupElement g{{3}};
    KernelResult t = images_kernel(m, 2.5, apply(m, g, a), apply(m, g, b), 400);
    CHECK(std::abs(r.value - t.value) <= r.error_bound + t.error_bound + 1e-14 * std::abs(r.value));
    KernelResult swapped = images_kernel(m, 2.5, b, a, 400);
    CHECK(std::abs(r.value - swapped.value) <= 1e-12 * std::abs(r.value));
}

TEST_CASE("images kernel warns below the convergence abscissa")
{
    CuspModel m = unit_h3();
    HPoint a{1.0, {0.3}, {0.1}}, b{1.6, {-0.2}, {0.45}};
    KernelResult r = images_kernel(m, 0.4, a, b, 50);
    CHECK(!r.warnings.empty());
}

TEST_CASE("mode sum agrees with images on H^3")
{
    CuspModel m = unit_h3();
    HPoint a{1.0, {0.3}, {0.1}}, b{1.6, {-0.2}, {0.45}};
    for (cplx s : {cplx(2.0, 0.0), cplx(1.3, 0.8), cplx(0.8, 0.0)}) {
        KernelResult km = cusp_kernel(m, s, a, b, policy(1e-10));
        KernelResult ki = images_kernel(m, s, a, b, 4000);
        CHECK(std::abs(km.value - ki.value) <= km.error_bound + ki.error_bound);
        CHECK(std::abs(km.value - ki.value) <= 1e-8 * std::abs(ki.value));
        CHECK(km.M >= 0);
        CHECK(km.method == "modes");
    }
}

TEST_CASE("mode sum is periodic and rejects equal heights")
{
    CuspModel m(3, 1, {{1.0}}, 0, {{0.6180339887498949}});
    HPoint a{1.0, {0.3, 0.2}, {0.1}}, b{1.8, {-0.2, 0.1}, {0.45}};
    TruncationPolicy p = policy(1e-9);
    KernelResult base = cusp_kernel(m, 2.2, a, b, p);
    KernelResult moved = cusp_kernel(m, 2.2, apply(m, GroupElement{{1}}, a), b, p);
    CHECK(std::abs(base.value - moved.value) <= 1e-7 * std::abs(base.value));
    CHECK_THROWS_AS(cusp_kernel(m, 2.2, a, HPoint{1.0, {0.0, 0.1}, {0.2}}, p), CapabilityError);
}

TEST_CASE("finite-difference residual")
{
    cplx s(1.3, 0.4);
    HPoint w{1.2, {0.3}, {0.1}};
    double one = pde_residual([](const HPoint&) { return cplx(1.0); }, s, 2, w, 1e-2);
    CHECK(one == doctest::Approx(std::abs(s * (2.0 - s))).epsilon(1e-12));
    auto xs = [&](const HPoint& p) { return std::pow(cplx(p.x), s); };
    CHECK(pde_residual(xs, s, 2, w, 1e-3) <= 1e-5 * std::abs(s * (2.0 - s)));
    CHECK_THROWS_AS(pde_residual(xs, s, 2, HPoint{0.01, {0.0}, {0.0}}, 0.02), InputError);
}

TEST_CASE("images kernel solves the eigen-equation with second-order residual")
{
    CuspModel m = unit_h3();
    HPoint a{1.0, {0.3}, {0.1}}, b{1.6, {-0.2}, {0.45}};
    cplx s(1.7, 0.3);
    auto u = [&](const HPoint& p) { return images_kernel(m, s, p, b, 200).value; };
    double r1 = pde_residual(u, s, 2, a, 4e-3), r2 = pde_residual(u, s, 2, a, 2e-3);
    CHECK(r2 < 1e-4);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}
