#pragma once

#include <cstddef>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp {

using Vec = std::vector<double>;
using IVec = std::vector<long>;

// Parabolic group of a rank-k cusp in H^{n+1}, acting on (x, y, z) by
// (x, A(a) y, z + sum_j a_j v_j).  The fibre R^{n-k} is split into a
// trivial block of dimension r followed by 2x2 rotation blocks; block l is
// rotated by sum_j a_j theta[l][j] under the element with exponents a.
//
// Angles are kept as fractions of a full turn in (-1/2, 1/2] so that
// rational holonomy such as 1/5 turn is represented exactly.
class CuspModel {
public:
    // angles_turns[l][j] is theta[l][j] / (2 pi).
    CuspModel(int n, int k, std::vector<Vec> basis, int trivial_dim,
              std::vector<Vec> angles_turns);

    static CuspModel from_radians(int n, int k, std::vector<Vec> basis, int trivial_dim,
                                  std::vector<Vec> angles_radians);

    int n() const { return n_; }
    int k() const { return k_; }
    int fibre_dim() const { return n_ - k_; }
    int trivial_dim() const { return r_; }
    int blocks() const { return blocks_; }

    const std::vector<Vec>& basis() const { return basis_; }
    // Rows v_j^* with <v_i, v_j^*> = delta_ij.
    const std::vector<Vec>& dual_basis() const { return dual_; }
    const std::vector<Vec>& angles_turns() const { return turns_; }
    double angle(int block, int gen) const;  // radians in (-pi, pi]
    double covolume() const { return covolume_; }

    Vec lattice_vector(const IVec& a) const;
    Vec dual_vector(const Vec& coeffs) const;

private:
    int n_, k_, r_, blocks_;
    std::vector<Vec> basis_, dual_, turns_;
    double covolume_;
};

struct HPoint {
    double x = 1.0;
    Vec y;
    Vec z;
};

struct GroupElement {
    IVec a;
};

void validate_point(const CuspModel& model, const HPoint& w);

HPoint apply(const CuspModel& model, const GroupElement& g, const HPoint& w);

double cosh_dist(const HPoint& w, const HPoint& wp);
double dist(const HPoint& w, const HPoint& wp);
double theta(const HPoint& w, const HPoint& wp);

struct InvertedCoords {
    double u;
    Vec v;
    Vec z;
    double R;
};

InvertedCoords invert_coords(const HPoint& w);
HPoint from_inverted(const InvertedCoords& c);

// All exponent vectors with max-norm <= N, ordered by shell |a|_inf and
// lexicographically inside a shell.  The identity comes first; for k = 1,
// N = 2 the order is 0, -1, 1, -2, 2.
std::vector<GroupElement> enumerate(const CuspModel& model, int N);

// Exponent vectors with max-norm exactly N, in the same order.
std::vector<GroupElement> shell(int k, int N);

}  // namespace cusp
