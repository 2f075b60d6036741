// Internal: Fourier-Bessel synthesis shared by the resolvent and the
// Poisson operator.
#pragma once

#include "cusp/resolvent.hpp"

namespace cusp::detail {

enum class Radial {
    Resolvent,  // (x x')^{n/2} K_lambda(x_> tau) I_lambda(x_< tau)
    Poisson,    // 2^{1-lambda}/Gamma(lambda) x^{n/2} tau^lambda K_lambda(x tau), boundary at x' = 0
};

struct ModeIntegralSpec {
    Radial kind = Radial::Resolvent;
    cplx s;
    int n = 0, d = 0, m = 0;
    double b = 0.0;
    double x = 1.0, xp = 1.0;  // xp unused for Poisson
    double r = 0.0, rp = 0.0;
};

// Integral of one mode with absolute target abs_tol (relative target from
// the policy).  quad_error and tail are filled; value excludes the angular
// and torus factors.
KernelResult mode_integral(const ModeIntegralSpec& spec, double abs_tol, const TruncationPolicy& policy);

// Sum over modes of mode_integral times phi_I(z, omega) conj(phi_I(z', omega')).
// For Radial::Poisson, wp.x is ignored and wp is the boundary point (y', z').
KernelResult mode_sum(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp,
                      const TruncationPolicy& policy, Radial kind);

}  // namespace cusp::detail
