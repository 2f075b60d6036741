#pragma once

#include <complex>
#include <map>
#include <vector>

#include "cusp/geometry.hpp"

namespace cusp {

// Weight vector c (one entry per rotation block) -> multiplicity inside the
// degree-m spherical harmonics of S^{r + 2 blocks - 1}.
using WeightTable = std::map<IVec, long>;

// Multiplicities N_m(c) - N_{m-2}(c), where N_m(c) counts degree-m monomials
// in r weight-zero variables and `blocks` conjugate pairs of weight +-e_l.
// Zero entries are omitted.
WeightTable weight_multiplicities(int trivial_dim, int blocks, int m);

// Default split of the fibre: r = d mod 2, blocks = d / 2.
WeightTable weight_multiplicities(int n_minus_k, int m);

// dim of the degree-m harmonics on S^{d-1}.
long harmonic_dimension(int d, int m);

struct ModeIndex {
    int m = 0;
    IVec c;      // torus weight, one slot per rotation block
    IVec vstar;  // dual-lattice coefficients: v* = sum_j vstar[j] v_j^*
    long mult = 1;
    double b = 0.0;   // threshold 2 pi |A + v*|
    double nu = 0.0;  // radial Bessel order (n - k - 2)/2 + m
};

// Coordinates w_j of A + v* in the dual basis, in turns:
//   w_j = sum_l c_l theta[l][j] / (2 pi) + vstar[j].
Vec mode_frequency(const CuspModel& model, const IVec& c, const IVec& vstar);

double threshold(const CuspModel& model, const IVec& c, const IVec& vstar);
double threshold(const CuspModel& model, const ModeIndex& I);

ModeIndex make_mode(const CuspModel& model, int m, IVec c, IVec vstar, long mult = 1);

// Smallest threshold over modes with m <= M, |vstar|_inf <= V and
// (c, vstar) != (0, 0).
double threshold_infimum(const CuspModel& model, int M, int V);

// All modes with m <= M and |vstar|_inf <= V sorted by b, then by
// (m, c, vstar) lexicographically.
std::vector<ModeIndex> enumerate_modes(const CuspModel& model, int M, int V);

// Unit-normalized joint eigenfunction on T x S^{n-k-1}:
//   e^{2 pi i <z, v* + A>} Y(omega).
// Y is the weight-c harmonic with phase e^{-i c phi}; the polar axis for
// n - k = 3 is the trivial fibre direction.  Supported for n - k in {1, 2, 3}.
cplx eigenfunction(const CuspModel& model, const ModeIndex& I, const Vec& z, const Vec& omega);

// Angular part only: Y_{m,c}(omega) on S^{d-1}, d in {1, 2, 3}.
cplx harmonic(int d, int m, const IVec& c, const Vec& omega);

// u^{-(d-2)/2} J_nu(u) for nu = (d-2)/2 + m, finite at u = 0.
double radial_profile(int d, int m, double u);

// pi(t; r, r') = (r r')^{-(d-2)/2} J_nu(r t) J_nu(r' t) t with nu = (d-2)/2 + m.
// With this normalization int_0^inf pi(t; r, r') g(r') r'^{d-1} dr' dt = g(r).
double spectral_density(int d, int m, double t, double r, double rp);

// Overload keyed by the order nu; m is recovered as nu - (d-2)/2.
double spectral_density(double nu, double t, double r, double rp, int n_minus_k);

}  // namespace cusp
