#include "cusp/scattering.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "mode_sum.hpp"
#include "quadrature.hpp"

namespace cusp {

namespace {

constexpr double kPi = std::numbers::pi;

bool nonnegative_integer(cplx z, long& which)
{
    if (z.imag() != 0.0) return false;
    double r = std::round(z.real());
    if (r != z.real() || r < 0.0) return false;
    which = static_cast<long>(r);
    return true;
}

// Gauss-Legendre nodes and weights on (-1, 1) by the Golub-Welsch eigenproblem.
void gauss_legendre(int N, std::vector<double>& x, std::vector<double>& w)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    for (int i = 1; i < N; ++i) {
        double b = i / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x.resize(N);
    w.resize(N);
    for (int i = 0; i < N; ++i) {
        x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        w[i] = 2.0 * v * v;
    }
}

}  // namespace

cplx poisson_mode(const ComplexSpectral& s, double mu, double x)
{
    if (!(x > 0.0)) throw InputError("poisson_mode: x must be positive");
    if (!(mu > 0.0)) throw InputError("poisson_mode: degenerate mode, mu = t^2 + b^2 must be positive");
    cplx lam = s.lambda();
    long which;
    if (nonnegative_integer(lam, which))
        throw PoleError("poisson_mode: lambda = s - n/2 must not be a nonnegative integer", which);
    double q = x * std::sqrt(mu);
    cplx k = bessel_K_scaled(lam, q) * std::exp(-q);
    return 2.0 * std::exp(-lam * std::log(2.0)) * rgamma(lam) * std::pow(x, 0.5 * s.n) *
           std::exp(0.5 * lam * std::log(mu)) * k;
}

cplx poisson_mode(const ComplexSpectral& s, const ModeIndex& I, double t, double x)
{
    return poisson_mode(s, t * t + I.b * I.b, x);
}

cplx scattering_multiplier(const ComplexSpectral& s, double mu)
{
    if (!(mu > 0.0)) throw InputError("scattering_multiplier: mu must be positive");
    cplx lam = s.lambda();
    long which;
    if (nonnegative_integer(lam, which)) {
        if (which == 0) throw InputError("scattering_multiplier: indeterminate at s = n/2 (lambda = 0)");
        throw PoleError("scattering_multiplier: Gamma(-lambda) has a pole at lambda = " + std::to_string(which),
                        which);
    }
    return std::exp(-2.0 * lam * std::log(2.0)) * gamma_ratio(-lam, lam) * std::exp(lam * std::log(mu));
}

BoundaryExpansion extract_expansion(const std::vector<std::pair<double, cplx>>& samples, const ComplexSpectral& s,
                                    int corrections)
{
    const double n = s.n;
    if (std::abs(2.0 * s.s.real() - n) < 0.1)
        throw ConditioningError("extract_expansion: exponents n - s and s closer than 0.1 in real part");
    if (corrections < 0) throw InputError("extract_expansion: corrections must be nonnegative");
    cplx lam = s.lambda();
    // x^{n-s+2i} and x^{s+2j} coincide when 2 lambda is an even integer in range.
    for (int j = 0; j <= corrections; ++j)
        if (std::abs(2.0 * lam - 2.0 * j) < 1e-6 || std::abs(2.0 * lam + 2.0 * j) < 1e-6)
            throw ConditioningError("extract_expansion: exponent families collide (logarithmic case)");
    const int cols = 2 * (corrections + 1);
    const int rows = static_cast<int>(samples.size());
    if (rows < cols + 2) throw InputError("extract_expansion: too few samples for the requested corrections");
    double xmin = 1e300, xmax = 0.0;
    for (const auto& [x, u] : samples) {
        if (!(x > 0.0)) throw InputError("extract_expansion: sample heights must be positive");
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (xmax / xmin < 100.0) throw InputError("extract_expansion: samples must span at least two decades");

    cplx em = n - s.s, ep = s.s;
    Eigen::MatrixXcd A(rows, cols);
    Eigen::VectorXcd b(rows);
    for (int i = 0; i < rows; ++i) {
        double x = samples[i].first;
        // Rows are scaled by the size of the leading term so small x weigh in.
        double scale = 1.0 / std::abs(std::exp(em * std::log(x)));
        for (int j = 0; j <= corrections; ++j) {
            A(i, j) = std::exp((em + 2.0 * j) * std::log(x)) * scale;
            A(i, corrections + 1 + j) = std::exp((ep + 2.0 * j) * std::log(x)) * scale;
        }
        b(i) = samples[i].second * scale;
    }
    Eigen::VectorXd cn(cols);
    for (int j = 0; j < cols; ++j) {
        cn(j) = A.col(j).norm();
        if (cn(j) > 0.0) A.col(j) /= cn(j);
    }
    Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
    double res = (A * c - b).norm() / std::max(b.norm(), 1e-300);
    for (int j = 0; j < cols; ++j) c(j) /= cn(j);

    BoundaryExpansion out;
    out.exponent_minus = em;
    out.exponent_plus = ep;
    out.F_minus = c(0);
    out.F_plus = c(corrections + 1);
    for (int j = 1; j <= corrections; ++j) {
        out.corrections_minus.push_back(c(j) / c(0));
        out.corrections_plus.push_back(c(corrections + 1 + j) / c(corrections + 1));
    }
    out.residual = res;
    out.samples = rows;
    return out;
}

PoissonEstimate poisson_from_resolvent(const CuspModel& model, cplx s, const HPoint& w, const HPoint& boundary,
                                       const TruncationPolicy& policy)
{
    const double n = model.n();
    cplx f = 2.0 * s - n;
    if (std::abs(f) < 1e-12) throw InputError("poisson_from_resolvent: s = n/2 makes the factor 2s - n vanish");
    PoissonEstimate out;
    out.heights = {1e-2, 5e-3, 2.5e-3};
    double err = 0.0;
    for (double h : out.heights) {
        HPoint wp = boundary;
        wp.x = h;
        KernelResult k = cusp_kernel(model, s, w, wp, policy);
        cplx scale = f * std::exp(-s * std::log(h));
        out.raw.push_back(scale * k.value);
        err = std::max(err, std::abs(scale) * k.error_bound);
    }
    // Corrections are even in x': E(h) = P + a h^2 + b h^4 + ...
    cplx r10 = (4.0 * out.raw[1] - out.raw[0]) / 3.0;
    cplx r11 = (4.0 * out.raw[2] - out.raw[1]) / 3.0;
    cplx r2 = (16.0 * r11 - r10) / 15.0;
    out.extrapolated = {out.raw[2], r11, r2};
    out.value = r2;
    out.change = std::abs(r2 - r11) / std::max(std::abs(r2), 1e-300);
    out.error_bound = std::abs(r2 - r11) + 3.0 * err;
    if (out.change > 1e-2)
        throw AccuracyError("poisson_from_resolvent: Richardson extrapolation is not settling", out.value,
                            out.error_bound);
    return out;
}

KernelResult poisson_synthesis(const CuspModel& model, cplx s, const HPoint& w, const HPoint& boundary,
                               const TruncationPolicy& policy)
{
    return detail::mode_sum(model, s, w, boundary, policy, detail::Radial::Poisson);
}

KernelResult poisson_images(const CuspModel& model, cplx s, const HPoint& w, const HPoint& boundary, int N)
{
    const int n = model.n(), k = model.k(), d = model.fibre_dim();
    validate_point(model, w);
    if (static_cast<int>(boundary.y.size()) != d || static_cast<int>(boundary.z.size()) != k)
        throw InputError("poisson_images: boundary point dimensions do not match the model");
    if (N < 0) throw InputError("poisson_images: N must be nonnegative");
    const double sig = s.real();
    if (sig <= 0.5 * k) throw InputError("poisson_images: image sum diverges for Re s <= k/2");
    const cplx pre = (2.0 * s - static_cast<double>(n)) * free_kernel_leading(n, s);

    KernelResult out;
    out.method = "poisson-images";
    out.N = N;
    HPoint b = boundary;
    b.x = 1.0;
    std::vector<cplx> vals;
    for (const auto& g : enumerate(model, N)) {
        HPoint gb = apply(model, g, b);
        double q = w.x * w.x;
        for (int i = 0; i < d; ++i) q += (w.y[i] - gb.y[i]) * (w.y[i] - gb.y[i]);
        for (int i = 0; i < k; ++i) q += (w.z[i] - gb.z[i]) * (w.z[i] - gb.z[i]);
        vals.push_back(std::exp(s * std::log(w.x / q)));
    }
    out.value = detail::pairwise_sum(vals);

    if (k == 1) {
        // (rho^2 + u^2)^{-s} = u^{-2s} (1 - s rho^2/u^2 + s(s+1)/2 rho^4/u^4 - ...), u = z - z' - a L.
        double Lv = model.basis()[0][0], Ll = std::abs(Lv);
        double delta = (w.z[0] - boundary.z[0]) / Lv;
        double y2 = 0.0, yp2 = 0.0;
        for (double v : w.y) y2 += v * v;
        for (double v : boundary.y) yp2 += v * v;
        double yy = std::sqrt(y2 * yp2);
        double base = N + 1.0 - std::abs(delta);
        double rho2 = w.x * w.x + y2 + yp2;
        if (base * Ll > 2.0 * std::sqrt(rho2 + 2.0 * yy)) {
            auto Z = [&](cplx e) { return hurwitz_zeta(e, N + 1.0 - delta) + hurwitz_zeta(e, N + 1.0 + delta); };
            auto Zr = [&](double e) { return std::abs(Z(cplx(e, 0.0))); };
            cplx lead = std::exp(s * std::log(w.x)) * std::exp(-2.0 * s * std::log(Ll));
            out.value += lead * (Z(2.0 * s) - s * rho2 / (Ll * Ll) * Z(2.0 * s + 2.0) +
                                 0.5 * s * (s + 1.0) * rho2 * rho2 / std::pow(Ll, 4) * Z(2.0 * s + 4.0));
            double as = std::abs(s), big = rho2 + 2.0 * yy;
            out.tail = std::pow(w.x, sig) * std::pow(Ll, -2.0 * sig) *
                       (2.0 * as * yy / (Ll * Ll) * Zr(2.0 * sig + 2.0) +
                        std::abs(s * (s + 1.0) * (s + 2.0)) / 6.0 * std::pow(big / (Ll * Ll), 3) * Zr(2.0 * sig + 6.0) +
                        as * (as + 1.0) * 2.0 * big * yy / std::pow(Ll, 4) * Zr(2.0 * sig + 4.0));
        } else {
            out.tail = std::numeric_limits<double>::infinity();
            out.warnings.push_back("poisson_images: N too small for the tail expansion");
        }
    } else {
        out.tail = std::numeric_limits<double>::infinity();
        out.warnings.push_back("poisson_images: no tail estimate for rank k > 1");
    }
    out.value *= pre;
    out.tail *= std::abs(pre);
    out.error_bound = out.tail + 1e-15 * std::abs(out.value) * std::sqrt(static_cast<double>(vals.size()));
    return out;
}

JumpCheck resolvent_jump_check(const CuspModel& model, cplx s, const HPoint& w, const HPoint& wp,
                               const TruncationPolicy& policy, const JumpOptions& opts)
{
    const int n = model.n(), d = model.fibre_dim();
    if (model.k() != 1) throw CapabilityError("resolvent_jump_check: rank k = 1 only");
    if (d != 1 && d != 2) throw CapabilityError("resolvent_jump_check: n - k in {1, 2} only");
    if (!(std::abs(s.real() - 0.5 * n) < 0.5)) throw InputError("resolvent_jump_check: needs |Re s - n/2| < 1/2");
    cplx sb = static_cast<double>(n) - s;
    if (std::abs(s - sb) < 1e-12) throw InputError("resolvent_jump_check: s = n/2 is degenerate");

    JumpCheck out;
    out.lhs = cusp_kernel(model, s, w, wp, policy).value - cusp_kernel(model, sb, w, wp, policy).value;

    const double L = std::abs(model.basis()[0][0]);
    const double ell = std::max(w.x, wp.x);
    Vec yc(d);
    for (int i = 0; i < d; ++i) yc[i] = 0.5 * (w.y[i] + wp.y[i]);

    auto boundary_integral = [&](int ny, int nz, int nphi) {
        std::vector<double> gx, gw;
        gauss_legendre(ny, gx, gw);
        std::vector<cplx> vals;
        for (int iz = 0; iz < nz; ++iz) {
            double z = L * (iz + 0.5) / nz;
            for (int iy = 0; iy < ny; ++iy) {
                auto add = [&](const Vec& y, double jac) {
                    HPoint b;
                    b.x = 1.0;
                    b.y = y;
                    b.z = {z};
                    double far = 0.0;
                    for (int i = 0; i < d; ++i) far = std::max(far, std::abs(y[i] - yc[i]));
                    int N = std::max(64, static_cast<int>(std::ceil(4.0 * far / L)));
                    cplx p1 = poisson_images(model, s, w, b, N).value;
                    cplx p2 = poisson_images(model, sb, wp, b, N).value;
                    vals.push_back(p1 * p2 * jac);
                };
                if (d == 1) {
                    double th = 0.5 * kPi * gx[iy];
                    double c = std::cos(th);
                    double y = yc[0] + ell * std::tan(th);
                    add({y}, gw[iy] * 0.5 * kPi * ell / (c * c) * (L / nz));
                } else {
                    double th = 0.25 * kPi * (gx[iy] + 1.0);
                    double c = std::cos(th);
                    double rho = ell * std::tan(th);
                    for (int ip = 0; ip < nphi; ++ip) {
                        double phi = 2.0 * kPi * ip / nphi;
                        Vec y = {yc[0] + rho * std::cos(phi), yc[1] + rho * std::sin(phi)};
                        add(y, gw[iy] * 0.25 * kPi * ell / (c * c) * rho * (2.0 * kPi / nphi) * (L / nz));
                    }
                }
            }
        }
        return std::make_pair(detail::pairwise_sum(vals), static_cast<long>(vals.size()));
    };
    auto [full, pts] = boundary_integral(opts.y_nodes, opts.z_nodes, opts.phi_nodes);
    auto [half, pts2] = boundary_integral(opts.y_nodes / 2, opts.z_nodes / 2, std::max(4, opts.phi_nodes / 2));
    out.rhs = full / (2.0 * s - static_cast<double>(n));
    out.truncation = std::abs(full - half) / std::abs(2.0 * s - static_cast<double>(n));
    out.boundary_points = pts + pts2;
    out.residual = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), 1e-300);
    if (out.truncation > 0.5 * std::abs(out.lhs - out.rhs) && out.truncation > 5e-2 * std::abs(out.lhs))
        throw AccuracyError("resolvent_jump_check: boundary quadrature error dominates the residual", out.rhs,
                            out.truncation);
    return out;
}

}  // namespace cusp
