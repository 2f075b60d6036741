#pragma once

#include <string>
#include <vector>

#include "cusp/geometry.hpp"
#include "cusp/resolvent.hpp"

namespace cusp {

struct PoincareSum {
    cplx value = 0.0;
    int N = 0;
    long terms = 0;
    double tail_bound = 0.0;  // bound on the dropped terms |a|_inf > N
    std::vector<std::string> warnings;
};

// sum_{0 < |a|_inf <= N} exp(-s d(m, a m')).  The tail bound is infinite
// (with a warning) when Re s <= k/2.
PoincareSum poincare_direct(const CuspModel& model, cplx s, const HPoint& m, const HPoint& mp, int N);

struct CountProfile {
    std::vector<double> radii;
    std::vector<long long> counts;
    HPoint m, mp;
};

// Exact counts #{a != 0 : d(m, a m') <= R} for each R of an increasing grid.
// The identity is not counted.
CountProfile orbit_count(const CuspModel& model, const HPoint& m, const HPoint& mp,
                         const std::vector<double>& radii);

struct DeltaFit {
    double delta = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

// Least-squares line log N(R) = intercept + delta R over the radii in [R_lo, R_hi].
DeltaFit delta_fit(const CountProfile& profile, double R_lo, double R_hi);

// free_kernel(n, s, cosh d) = sum_{j <= J} c_j Q^{s+j} + Q^{s+J+1} L_s(Q), Q = e^{-d}.
struct ExpansionCoeffs {
    int n = 0;
    cplx s;
    std::vector<cplx> c;            // c_0 .. c_J
    int remainder_order = 0;        // J + 1
    double fit_residual = 0.0;      // relative residual of the full polynomial fit
    double remainder_constant = 0.0;  // max |L_s(Q)| seen for d in [2, 10]
};

// Coefficients from a least-squares polynomial fit of free_kernel Q^{-s} in Q.
// n in {1, 2}, 0 <= J <= 20.
ExpansionCoeffs expansion_coeffs(int n, cplx s, int J);

struct ContinuationResult {
    cplx value = 0.0;
    int depth = 0;
    double error_bound = 0.0;
    std::vector<std::string> warnings;
};

// Poincare series continued by the recursion
//   P_s = (R~_s - sum_{1 <= j <= 2 depth} c_j P_{s+j} - E_s) / c_0,
// with R~_s the quotient resolvent minus the free resolvent, and
// E_s = sum_{a != 0} [R_H(s; d_a) - sum_j c_j Q_a^{s+j}] evaluated image by image.
// n = 2, k in {1, 2}.
ContinuationResult poincare_continue(const CuspModel& model, cplx s, const HPoint& m, const HPoint& mp,
                                     int depth, const TruncationPolicy& policy);

}  // namespace cusp
