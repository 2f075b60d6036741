#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cusp/geometry.hpp"
#include "cusp/modes.hpp"
#include "cusp/specfun.hpp"

namespace cusp {

struct TruncationPolicy {
    int M = 120;            // max harmonic degree
    int V = 400;            // max |v*|_inf
    int N = 4000;           // max image exponent norm (rank 1; higher ranks scale it down)
    double t_max = 4000.0;  // quadrature ceiling before the oscillatory tail
    double tol = 1e-10;     // target relative tolerance

    void validate() const;
};

struct KernelResult {
    cplx value = 0.0;
    std::string method;
    int M = 0, V = 0, N = 0;  // cutoffs actually used
    double t_max = 0.0;       // largest t integrated
    long nodes = 0;           // integrand evaluations
    long modes = 0;           // mode integrals performed
    double quad_error = 0.0;
    double tail = 0.0;        // truncation estimate (modes, images or t-tail)
    double error_bound = 0.0; // quad_error + tail
    std::vector<std::string> warnings;
};

// K_lambda(max(x,x') tau) I_lambda(min(x,x') tau), lambda = s - n/2.
cplx radial_factor(const ComplexSpectral& s, double x, double xp, double tau);

// One Fourier-Bessel mode of the model-cusp resolvent:
//   int_0^inf (x x')^{n/2} K_lambda(x_> tau) I_lambda(x_< tau) pi(t; r, r') dt,
//   tau = sqrt(t^2 + b^2),
// with pi the spectral density of the fibre dimension d = n - k and degree m.
// Modes with b = 0 are continued analytically below Re s = n/2 by
// integrating their small-t power series exactly.
KernelResult mode_resolvent(const ComplexSpectral& s, int d, int m, double b, double x, double r,
                            double xp, double rp, const TruncationPolicy& policy);

// Quotient resolvent kernel by Fourier-Bessel mode summation.  Needs
// n - k in {1, 2, 3} and x != x'.
KernelResult cusp_kernel(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp,
                         const TruncationPolicy& policy);

// Quotient resolvent kernel as a sum of free kernels over the images
// |a|_inf <= N.  For rank 1 the lattice tail is summed asymptotically with
// Hurwitz zeta functions; for higher rank it is only bounded.
KernelResult images_kernel(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp, int N,
                           bool skip_identity = false);

// |(Delta_X - s(n-s)) u|(w) / |u(w)| by central differences of step h in
// x, y and z.  Delta_X = -x^2 d_x^2 + (n-1) x d_x - x^2 (d_y^2 + d_z^2).
double pde_residual(const std::function<cplx(const HPoint&)>& u, cplx s, int n, const HPoint& w,
                    double h);

}  // namespace cusp
