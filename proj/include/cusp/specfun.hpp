#pragma once

#include <complex>

#include "cusp/errors.hpp"

namespace cusp {

// Spectral parameter s on H^{n+1}; lambda and the eigenvalue are always
// derived from (s, n).
struct ComplexSpectral {
    cplx s;
    int n;

    ComplexSpectral(cplx s_, int n_) : s(s_), n(n_) {}
    cplx lambda() const { return s - 0.5 * static_cast<double>(n); }
    cplx eigenvalue() const { return s * (static_cast<double>(n) - s); }
};

cplx gamma(cplx s);
cplx rgamma(cplx s);   // 1/Gamma, entire
cplx lgamma(cplx s);   // a logarithm of Gamma (not branch-continuous in Im)
// Gamma(a) / Gamma(b); throws PoleError when a is a pole and b is not.
cplx gamma_ratio(cplx a, cplx b);

// Bessel function of the first kind, real order nu >= 0 and t >= 0.
double bessel_J(double nu, double t);

// Modified Bessel functions of complex order and positive argument.
// For t > 700 the unscaled values leave double range; use the scaled forms
//   bessel_I_scaled = e^{-t} I_lambda(t),  bessel_K_scaled = e^{t} K_lambda(t).
cplx bessel_I(cplx lambda, double t);
cplx bessel_K(cplx lambda, double t);
cplx bessel_I_scaled(cplx lambda, double t);
cplx bessel_K_scaled(cplx lambda, double t);

struct BesselIK {
    cplx I, K;    // scaled: e^{-t} I_lambda(t), e^{t} K_lambda(t)
    cplx Ip, Kp;  // scaled derivatives: e^{-t} I'_lambda(t), e^{t} K'_lambda(t)
};
BesselIK bessel_IK_scaled(cplx lambda, double t);

// Legendre function of the second kind Q_nu(z), z > 1, complex degree.
cplx legendre_Q(cplx nu, double z);

// Hurwitz zeta sum_{j>=0} (a + j)^{-s}, Re s > 1, a > 0.
cplx hurwitz_zeta(cplx s, double a);

// Schwartz kernel of (Delta_{H^{n+1}} - s(n-s))^{-1} as a function of
// cosh d; Delta is the positive Laplacian.
//   n = 1:  Q_{s-1}(cosh d) / (2 pi)
//   n = 2:  e^{-(s-1) d} / (4 pi sinh d)
//   other:  Gamma(s) / (2 pi^{n/2} Gamma(s-n/2+1)) e^{-sd} 2F1(n/2, s; s-n/2+1; e^{-2d})
cplx free_kernel(int n, cplx s, double coshd);

// Same kernel from the distance itself; accurate when d is tiny.
cplx free_kernel_d(int n, cplx s, double d);

// Leading coefficient C with free_kernel ~ C e^{-s d} as d -> infinity:
//   Gamma(s) / (2 pi^{n/2} Gamma(s - n/2 + 1)).
cplx free_kernel_leading(int n, cplx s);

}  // namespace cusp
