#pragma once

#include <utility>
#include <vector>

#include "cusp/modes.hpp"
#include "cusp/resolvent.hpp"

namespace cusp {

// Mode-level Poisson operator for spectral value mu = t^2 + b^2 > 0:
//   2^{1-lambda} / Gamma(lambda) x^{n/2} mu^{lambda/2} K_lambda(x sqrt(mu)).
// Normalized so that x^{-(n-s)} poisson_mode -> 1 as x -> 0.
cplx poisson_mode(const ComplexSpectral& s, double mu, double x);
cplx poisson_mode(const ComplexSpectral& s, const ModeIndex& I, double t, double x);

// 2^{-2 lambda} Gamma(-lambda) / Gamma(lambda) mu^lambda, lambda = s - n/2.
cplx scattering_multiplier(const ComplexSpectral& s, double mu);

struct BoundaryExpansion {
    cplx exponent_minus, exponent_plus;  // n - s and s
    cplx F_minus, F_plus;                // leading coefficients
    std::vector<cplx> corrections_minus, corrections_plus;  // x^2, x^4, ... factors
    double residual = 0.0;                // relative l2 residual of the fit
    int samples = 0;
};

// Least-squares fit of u(x) ~ F- x^{n-s} (1 + a1 x^2 + ...) + F+ x^s (1 + b1 x^2 + ...)
// with `corrections` even correction terms on each side.
BoundaryExpansion extract_expansion(const std::vector<std::pair<double, cplx>>& samples,
                                    const ComplexSpectral& s, int corrections = 3);

struct PoissonEstimate {
    cplx value = 0.0;
    std::vector<double> heights;    // x' used
    std::vector<cplx> raw;          // (2s - n) x'^{-s} R(s; w, (x', b))
    std::vector<cplx> extrapolated; // Richardson levels, last is the estimate
    double change = 0.0;            // relative change between the last two levels
    double error_bound = 0.0;
};

// Poisson kernel P(s; w, b) at boundary point b = (y', z') as the limit
// (2s - n) x'^{-s} cusp_kernel(s; w, (x', y', z')), Richardson-extrapolated
// in x'^2 from x' = 1e-2, 5e-3, 2.5e-3.  The x field of `boundary` is ignored.
PoissonEstimate poisson_from_resolvent(const CuspModel& model, cplx s, const HPoint& w,
                                       const HPoint& boundary, const TruncationPolicy& policy);

// The same kernel synthesized directly from poisson_mode over the
// Fourier-Bessel modes.
KernelResult poisson_synthesis(const CuspModel& model, cplx s, const HPoint& w, const HPoint& boundary,
                               const TruncationPolicy& policy);

// The same kernel as a sum over images of the free Poisson kernel
//   (2s - n) C_n(s) (x / (x^2 + |y - y'|^2 + |z - z'|^2))^s,
// with C_n(s) = free_kernel_leading.  Needs Re s > k/2; for k = 1 the
// lattice tail past |a| = N is summed with Hurwitz zeta functions.
KernelResult poisson_images(const CuspModel& model, cplx s, const HPoint& w, const HPoint& boundary, int N);

struct JumpCheck {
    cplx lhs = 0.0;  // R(s; w, w') - R(n - s; w, w')
    cplx rhs = 0.0;  // boundary integral of P(s) P(n - s) / (2s - n)
    double residual = 0.0;
    double truncation = 0.0;  // estimated size of the dropped boundary region
    long boundary_points = 0;
};

struct JumpOptions {
    int y_nodes = 96;  // Gauss-Legendre nodes in the compactified fibre radius
    int z_nodes = 24;  // trapezoid nodes along the torus
    int phi_nodes = 24;  // angular nodes when n - k = 2
};

// Compares both sides of R(s) - R(n-s) = int P(s; w, b) P(n-s; w', b) db / (2s - n)
// over the boundary R^{n-k} x T with flat measure.  The left side uses
// cusp_kernel, the boundary integrand poisson_images.  Needs k = 1,
// n - k in {1, 2} and |Re s - n/2| < 1/2.
JumpCheck resolvent_jump_check(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp,
                               const TruncationPolicy& policy, const JumpOptions& opts = {});

}  // namespace cusp
