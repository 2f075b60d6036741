#include "cusp/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

namespace cusp {

namespace {

double reduce_turns(double t)
{
    double r = t - std::round(t);
    if (r <= -0.5) r += 1.0;
    return r;
}

void box(int k, int N, IVec& prefix, std::vector<GroupElement>& out)
{
    if (static_cast<int>(prefix.size()) == k) {
        out.push_back({prefix});
        return;
    }
    for (long a = -N; a <= N; ++a) {
        prefix.push_back(a);
        box(k, N, prefix, out);
        prefix.pop_back();
    }
}

void shell_rec(int k, int N, IVec& prefix, std::vector<GroupElement>& out)
{
    int left = k - static_cast<int>(prefix.size());
    if (left == 0) return;
    for (long a = -N; a <= N; ++a) {
        prefix.push_back(a);
        if (std::labs(a) == N)
            box(k, N, prefix, out);
        else if (left > 1)
            shell_rec(k, N, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

CuspModel::CuspModel(int n, int k, std::vector<Vec> basis, int trivial_dim,
                     std::vector<Vec> angles_turns)
    : n_(n), k_(k), r_(trivial_dim), basis_(std::move(basis)), turns_(std::move(angles_turns))
{
    if (n < 1) throw InputError("model: n must be a positive integer");
    if (k < 1 || k > n) throw InputError("model: rank k must satisfy 1 <= k <= n");
    if (r_ < 0) throw InputError("model: trivial block dimension r must be nonnegative");
    blocks_ = static_cast<int>(turns_.size());
    if (r_ + 2 * blocks_ != n - k)
        throw InputError("model: block decomposition violated, r + 2*blocks = " +
                         std::to_string(r_ + 2 * blocks_) + " but n - k = " +
                         std::to_string(n - k));
    for (const auto& row : turns_)
        if (static_cast<int>(row.size()) != k)
            throw InputError("model: every angle row needs one entry per generator (k = " +
                             std::to_string(k) + ")");
    if (static_cast<int>(basis_.size()) != k)
        throw InputError("model: lattice basis needs k rows");
    for (const auto& row : basis_)
        if (static_cast<int>(row.size()) != k)
            throw InputError("model: lattice basis rows must have length k");
    for (auto& row : turns_)
        for (auto& t : row) {
            if (!std::isfinite(t)) throw InputError("model: angles must be finite");
            t = reduce_turns(t);
        }

    Eigen::MatrixXd B(k, k);
    double scale = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            B(i, j) = basis_[i][j];
            scale = std::max(scale, std::abs(B(i, j)));
        }
    double gram = (B * B.transpose()).determinant();
    if (!(scale > 0.0) || !(std::abs(gram) > 1e-14 * std::pow(scale, 2 * k)))
        throw InputError("model: lattice basis has zero Gram determinant");
    covolume_ = std::abs(B.determinant());
    Eigen::MatrixXd D = B.inverse().transpose();
    Eigen::MatrixXd pairing = B * D.transpose();
    if ((pairing - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-12)
        throw InputError("model: dual basis pairing <v_i, v_j*> = delta_ij not reproduced");
    dual_.assign(k, Vec(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) dual_[i][j] = D(i, j);
}

CuspModel CuspModel::from_radians(int n, int k, std::vector<Vec> basis, int trivial_dim,
                                  std::vector<Vec> angles_radians)
{
    for (auto& row : angles_radians)
        for (auto& a : row) a /= 2.0 * std::numbers::pi;
    return CuspModel(n, k, std::move(basis), trivial_dim, std::move(angles_radians));
}

double CuspModel::angle(int block, int gen) const
{
    return 2.0 * std::numbers::pi * turns_.at(block).at(gen);
}

Vec CuspModel::lattice_vector(const IVec& a) const
{
    Vec v(k_, 0.0);
    for (int j = 0; j < k_; ++j)
        if (a[j] != 0)
            for (int i = 0; i < k_; ++i) v[i] += static_cast<double>(a[j]) * basis_[j][i];
    return v;
}

Vec CuspModel::dual_vector(const Vec& coeffs) const
{
    Vec v(k_, 0.0);
    for (int j = 0; j < k_; ++j)
        for (int i = 0; i < k_; ++i) v[i] += coeffs[j] * dual_[j][i];
    return v;
}

void validate_point(const CuspModel& model, const HPoint& w)
{
    if (!(w.x > 0.0) || !std::isfinite(w.x)) throw InputError("point: height x must be positive");
    if (static_cast<int>(w.y.size()) != model.fibre_dim())
        throw InputError("point: y must have length n - k = " + std::to_string(model.fibre_dim()));
    if (static_cast<int>(w.z.size()) != model.k())
        throw InputError("point: z must have length k = " + std::to_string(model.k()));
}

HPoint apply(const CuspModel& model, const GroupElement& g, const HPoint& w)
{
    validate_point(model, w);
    if (static_cast<int>(g.a.size()) != model.k())
        throw InputError("group element: exponent vector must have length k");
    HPoint out = w;
    const int r = model.trivial_dim();
    for (int l = 0; l < model.blocks(); ++l) {
        // Accumulate in turns so integer multiples of rational angles stay exact.
        double turns = 0.0;
        for (int j = 0; j < model.k(); ++j)
            turns += static_cast<double>(g.a[j]) * model.angles_turns()[l][j];
        turns -= std::round(turns);
        double c = std::cos(2.0 * std::numbers::pi * turns);
        double s = std::sin(2.0 * std::numbers::pi * turns);
        double y1 = w.y[r + 2 * l], y2 = w.y[r + 2 * l + 1];
        out.y[r + 2 * l] = c * y1 - s * y2;
        out.y[r + 2 * l + 1] = s * y1 + c * y2;
    }
    Vec shift = model.lattice_vector(g.a);
    for (int i = 0; i < model.k(); ++i) out.z[i] += shift[i];
    return out;
}

double cosh_dist(const HPoint& w, const HPoint& wp)
{
    if (!(w.x > 0.0) || !(wp.x > 0.0)) throw InputError("cosh_dist: heights must be positive");
    if (w.y.size() != wp.y.size() || w.z.size() != wp.z.size())
        throw InputError("cosh_dist: dimension mismatch");
    double num = (w.x - wp.x) * (w.x - wp.x);
    for (std::size_t i = 0; i < w.y.size(); ++i) num += (w.y[i] - wp.y[i]) * (w.y[i] - wp.y[i]);
    for (std::size_t i = 0; i < w.z.size(); ++i) num += (w.z[i] - wp.z[i]) * (w.z[i] - wp.z[i]);
    return 1.0 + num / (2.0 * w.x * wp.x);
}

double dist(const HPoint& w, const HPoint& wp)
{
    // acosh(1 + e) = log1p(e + sqrt(e (e + 2))) keeps accuracy near the diagonal.
    double e = cosh_dist(w, wp) - 1.0;
    return std::log1p(e + std::sqrt(e * (e + 2.0)));
}

double theta(const HPoint& w, const HPoint& wp) { return 1.0 / cosh_dist(w, wp); }

InvertedCoords invert_coords(const HPoint& w)
{
    double q = w.x * w.x;
    for (double v : w.y) q += v * v;
    if (!(q > 0.0)) throw InputError("invert_coords: x = 0 and y = 0 is the singular point");
    InvertedCoords c;
    c.u = w.x / q;
    c.v.resize(w.y.size());
    for (std::size_t i = 0; i < w.y.size(); ++i) c.v[i] = -w.y[i] / q;
    c.z = w.z;
    c.R = 1.0 / std::sqrt(q);
    return c;
}

HPoint from_inverted(const InvertedCoords& c)
{
    double q = c.u * c.u;
    for (double v : c.v) q += v * v;
    if (!(q > 0.0)) throw InputError("from_inverted: u = 0 and v = 0 is the singular point");
    HPoint w;
    w.x = c.u / q;
    w.y.resize(c.v.size());
    for (std::size_t i = 0; i < c.v.size(); ++i) w.y[i] = -c.v[i] / q;
    w.z = c.z;
    return w;
}

std::vector<GroupElement> shell(int k, int N)
{
    std::vector<GroupElement> out;
    if (N < 0) return out;
    if (N == 0) {
        out.push_back({IVec(k, 0)});
        return out;
    }
    IVec prefix;
    shell_rec(k, N, prefix, out);
    return out;
}

std::vector<GroupElement> enumerate(const CuspModel& model, int N)
{
    if (N < 0) throw InputError("enumerate: N must be nonnegative");
    std::vector<GroupElement> out;
    for (int s = 0; s <= N; ++s) {
        auto sh = shell(model.k(), s);
        out.insert(out.end(), sh.begin(), sh.end());
    }
    return out;
}

}  // namespace cusp
