#include "cusp/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cusp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-17;

// Taylor coefficients of 1/Gamma(1+z) about z = 0.
constexpr double kRgamma1[] = {
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
    1.18669225475160033258e-18,
    1.412380655318031781556e-18,
    -2.298745684435370206592e-19,
    1.714406321927337433384e-20,
    1.337351730493693114865e-22,
    -2.054233551766672789325e-22,
    2.736030048607999844832e-23,
};

bool nonpositive_integer(cplx s, long& which)
{
    if (s.imag() != 0.0 || s.real() > 0.0) return false;
    double r = std::round(s.real());
    if (r != s.real()) return false;
    which = static_cast<long>(r);
    return true;
}

// sin(pi s) with the real part reduced first, so zeros at integers are exact.
cplx sin_pi(cplx s)
{
    double a = s.real(), b = s.imag();
    double n = std::round(a);
    double f = a - n;
    double sign = (std::fmod(std::abs(n), 2.0) == 1.0) ? -1.0 : 1.0;
    return {sign * std::sin(kPi * f) * std::cosh(kPi * b), sign * std::cos(kPi * f) * std::sinh(kPi * b)};
}

// log Gamma by Stirling's series, valid for |z| >= 15 and Re z > 0.
cplx lgamma_stirling(cplx z)
{
    static const double B[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
                               -691.0 / 2730, 7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330};
    cplx sum = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi);
    cplx zi = 1.0 / z, z2 = zi * zi, p = zi;
    for (int k = 1; k <= 10; ++k) {
        sum += B[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * p;
        p *= z2;
    }
    return sum;
}

// Gamma for Re s >= 1/2.
cplx gamma_right(cplx s)
{
    cplx z = s, prod = 1.0;
    while (std::abs(z) < 15.0) {
        prod *= z;
        z += 1.0;
    }
    return std::exp(lgamma_stirling(z)) / prod;
}

cplx lgamma_right(cplx s)
{
    cplx z = s, prod = 1.0;
    while (std::abs(z) < 15.0) {
        prod *= z;
        z += 1.0;
    }
    return lgamma_stirling(z) - std::log(prod);
}

// I_nu(t) by its power series; fine for moderate t and Re nu > -1 or nu
// away from negative integers.
cplx i_series(cplx nu, double t)
{
    double q = 0.25 * t * t;
    cplx term = std::exp(nu * std::log(0.5 * t)) * rgamma(nu + 1.0);
    cplx sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= q / (static_cast<double>(k) * (nu + static_cast<double>(k)));
        sum += term;
        if (std::abs(term) <= kEps * std::abs(sum) && k > std::abs(nu)) break;
    }
    return sum;
}

struct KPair {
    cplx k0, k1;  // e^t K_mu(t), e^t K_{mu+1}(t)
};

// Temme's series for |Re mu| <= 1/2, t < 2.  Suited to small |Im mu|.
KPair k_temme(cplx mu, double t)
{
    // 1/Gamma(1 +- mu) and Temme's gam1, gam2 from the Taylor series of 1/Gamma(1+z).
    cplx gampl = 0.0, gammi = 0.0, gam1 = 0.0, gam2 = 0.0;
    cplx p = 1.0;
    for (int k = 0; k < static_cast<int>(std::size(kRgamma1)); ++k) {
        cplx term = kRgamma1[k] * p;
        gampl += term;
        gammi += (k % 2 == 0) ? term : -term;
        p *= mu;
    }
    {
        cplx pw = 1.0, mu2 = mu * mu;
        for (int k = 0; k < static_cast<int>(std::size(kRgamma1)); k += 2) {
            gam2 += kRgamma1[k] * pw;
            if (k + 1 < static_cast<int>(std::size(kRgamma1))) gam1 -= kRgamma1[k + 1] * pw;
            pw *= mu2;
        }
    }
    double x2 = 0.5 * t;
    cplx pimu = kPi * mu;
    cplx fact = std::abs(pimu) < 1e-10 ? cplx(1.0) : pimu / std::sin(pimu);
    double d = -std::log(x2);
    cplx e = mu * d;
    cplx fact2 = std::abs(e) < 1e-10 ? cplx(1.0) + e * e / 6.0 : std::sinh(e) / e;
    cplx ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    cplx sum = ff;
    cplx ee = std::exp(e);
    cplx pp = 0.5 * ee / gampl;
    cplx qq = 0.5 / (ee * gammi);
    cplx c = 1.0;
    double dd = x2 * x2;
    cplx sum1 = pp;
    cplx mu2 = mu * mu;
    for (int i = 1; i < 10000; ++i) {
        double di = static_cast<double>(i);
        ff = (di * ff + pp + qq) / (di * di - mu2);
        c *= dd / di;
        pp /= (di - mu);
        qq /= (di + mu);
        cplx del = c * ff;
        sum += del;
        cplx del1 = c * (pp - di * ff);
        sum1 += del1;
        if (std::abs(del) < kEps * std::abs(sum) && std::abs(del1) < kEps * std::abs(sum1)) break;
    }
    double et = std::exp(t);
    return {sum * et, sum1 * (2.0 / t) * et};
}

// Reflection K_mu = pi/2 (I_{-mu} - I_mu) / sin(pi mu), used for t < 2 when
// |Im mu| is large enough that sin(pi mu) is far from zero.
KPair k_reflect(cplx mu, double t)
{
    cplx s = sin_pi(mu);
    cplx k0 = 0.5 * kPi * (i_series(-mu, t) - i_series(mu, t)) / s;
    cplx k1 = -0.5 * kPi * (i_series(-mu - 1.0, t) - i_series(mu + 1.0, t)) / s;
    double et = std::exp(t);
    return {k0 * et, k1 * et};
}

// Steed's continued fraction for t >= 2, |Re mu| <= 1/2.
KPair k_steed(cplx mu, double t)
{
    cplx mu2 = mu * mu;
    cplx b = 2.0 * (1.0 + t);
    cplx d = 1.0 / b;
    cplx h = d, delh = d;
    cplx q1 = 0.0, q2 = 1.0;
    cplx a1 = 0.25 - mu2;
    cplx q = a1, c = a1;
    cplx a = -a1;
    cplx s = 1.0 + q * delh;
    int i = 1;
    for (; i < 200000; ++i) {
        double di = static_cast<double>(i);
        a -= 2.0 * di;
        c = -a * c / (di + 1.0);
        cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        // For large |mu| the c_i grow past double range while c_i q_i stays
        // bounded; move a common factor from c to the q recurrence.
        if (std::abs(c) > 1e150) {
            c *= 1e-150;
            q1 *= 1e150;
            q2 *= 1e150;
        }
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        cplx dels = q * delh;
        s += dels;
        if (std::abs(dels) < kEps * std::abs(s) && std::abs(delh) < kEps * std::abs(h)) break;
    }
    h = a1 * h;
    cplx k0 = std::sqrt(kPi / (2.0 * t)) / s;
    cplx k1 = k0 * (mu + t + 0.5 - h) / t;
    return {k0, k1};
}

// I_{lambda+1} / I_lambda by the modified Lentz continued fraction.
cplx i_ratio(cplx lambda, double t)
{
    const double tiny = 1e-300;
    cplx h = tiny, C = h, D = 0.0;
    for (int j = 1; j < 1000000; ++j) {
        cplx bj = 2.0 * (lambda + static_cast<double>(j)) / t;
        D = bj + D;
        if (std::abs(D) < tiny) D = tiny;
        C = bj + 1.0 / C;
        if (std::abs(C) < tiny) C = tiny;
        D = 1.0 / D;
        cplx del = C * D;
        h *= del;
        if (std::abs(del - 1.0) < 3e-16) break;
    }
    return h;
}

BesselIK ik_nonneg(cplx lambda, double t)
{
    double N = std::floor(lambda.real() + 0.5);
    cplx mu = lambda - N;
    KPair kp;
    if (t < 2.0)
        kp = std::abs(mu.imag()) <= 1.0 ? k_temme(mu, t) : k_reflect(mu, t);
    else
        kp = k_steed(mu, t);
    cplx k0 = kp.k0, k1 = kp.k1;
    for (int j = 1; j <= static_cast<int>(N); ++j) {
        cplx k2 = k0 + 2.0 * (mu + static_cast<double>(j)) / t * k1;
        k0 = k1;
        k1 = k2;
    }
    cplx f = i_ratio(lambda, t);
    BesselIK r;
    r.K = k0;
    r.I = 1.0 / (t * (k1 + f * k0));
    r.Kp = lambda / t * k0 - k1;
    r.Ip = r.I * (lambda / t + f);
    return r;
}

}  // namespace

cplx gamma(cplx s)
{
    long which;
    if (nonpositive_integer(s, which))
        throw PoleError("gamma: pole at nonpositive integer " + std::to_string(which), which);
    if (s.real() < 0.5) return kPi / (sin_pi(s) * gamma_right(1.0 - s));
    return gamma_right(s);
}

cplx rgamma(cplx s)
{
    long which;
    if (nonpositive_integer(s, which)) return 0.0;
    if (s.real() < 0.5) return sin_pi(s) * gamma_right(1.0 - s) / kPi;
    return 1.0 / gamma_right(s);
}

cplx lgamma(cplx s)
{
    long which;
    if (nonpositive_integer(s, which))
        throw PoleError("lgamma: pole at nonpositive integer " + std::to_string(which), which);
    if (s.real() < 0.5) return std::log(kPi) - std::log(sin_pi(s)) - lgamma_right(1.0 - s);
    return lgamma_right(s);
}

cplx gamma_ratio(cplx a, cplx b)
{
    long wa, wb;
    bool pa = nonpositive_integer(a, wa), pb = nonpositive_integer(b, wb);
    if (pb && !pa) return 0.0;
    if (pa && !pb) throw PoleError("gamma_ratio: numerator pole at " + std::to_string(wa), wa);
    if (pa && pb) {
        // Gamma(-p)/Gamma(-q) as a limit: (-1)^{p-q} q! / p!
        long p = -wa, q = -wb;
        double v = 1.0;
        if (p > q)
            for (long j = q + 1; j <= p; ++j) v /= static_cast<double>(j);
        else
            for (long j = p + 1; j <= q; ++j) v *= static_cast<double>(j);
        return ((p - q) % 2 == 0) ? v : -v;
    }
    if (std::abs(a) < 30.0 && std::abs(b) < 30.0) return gamma(a) * rgamma(b);
    return std::exp(lgamma(a) - lgamma(b));
}

double bessel_J(double nu, double t)
{
    if (!(nu >= 0.0)) throw InputError("bessel_J: order must be nonnegative");
    if (!(t >= 0.0)) throw InputError("bessel_J: argument must be nonnegative");
    return std::cyl_bessel_j(nu, t);
}

BesselIK bessel_IK_scaled(cplx lambda, double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("bessel_I/K: argument must be positive");
    if (lambda.real() >= 0.0) return ik_nonneg(lambda, t);
    // K is even in the order; I_{-nu} = I_nu + (2/pi) sin(pi nu) K_nu.
    cplx nu = -lambda;
    BesselIK r = ik_nonneg(nu, t);
    cplx w = 2.0 / kPi * sin_pi(nu) * std::exp(-2.0 * t);
    r.I += w * r.K;
    r.Ip += w * r.Kp;
    return r;
}

cplx bessel_I_scaled(cplx lambda, double t) { return bessel_IK_scaled(lambda, t).I; }
cplx bessel_K_scaled(cplx lambda, double t) { return bessel_IK_scaled(lambda, t).K; }

cplx bessel_I(cplx lambda, double t)
{
    if (t > 700.0) throw std::range_error("bessel_I: t > 700 overflows, use bessel_I_scaled");
    return bessel_I_scaled(lambda, t) * std::exp(t);
}

cplx bessel_K(cplx lambda, double t)
{
    if (t > 700.0) throw std::range_error("bessel_K: t > 700 underflows, use bessel_K_scaled");
    return bessel_K_scaled(lambda, t) * std::exp(-t);
}

namespace {

// sum_k (n/2)_k / k! * Gamma(s+k) / Gamma(s+k-n/2+1) * q^k
cplx resolvent_series(int n, cplx s, double q)
{
    const double h = 0.5 * n;
    auto Gk = [&](long k) {
        cplx g = 1.0;
        for (int j = 1; j <= n / 2 - 1; ++j) g *= s + static_cast<double>(k - j);
        return g;
    };
    cplx G = (n % 2 == 0) ? Gk(0) : gamma_ratio(s, s - h + 1.0);
    double c = 1.0;  // (n/2)_k / k! * q^k
    cplx sum = G;
    double prev = std::abs(G);
    for (long k = 1; k < 50000000; ++k) {
        double dk = static_cast<double>(k);
        c *= (h + dk - 1.0) / dk * q;
        if (n % 2 == 0)
            G = Gk(k);
        else
            G *= (s + dk - 1.0) / (s + dk - h);
        cplx term = c * G;
        sum += term;
        double a = std::abs(term);
        if (a < prev && k > 4) {
            double ratio = a / prev;
            if (a / (1.0 - ratio) <= kEps * std::abs(sum)) return sum;
        }
        if (a == 0.0 && k > n) return sum;
        prev = a;
    }
    throw AccuracyError("free_kernel: hypergeometric series did not converge", sum, 1.0);
}

}  // namespace

cplx legendre_Q(cplx nu, double z)
{
    if (!(z > 1.0)) throw InputError("legendre_Q: requires z > 1");
    double xi = std::acosh(z);
    double q = std::exp(-2.0 * xi);
    return std::sqrt(kPi) * std::exp(-(nu + 1.0) * xi) * resolvent_series(1, nu + 1.0, q);
}

cplx free_kernel_d(int n, cplx s, double d)
{
    if (n < 1) throw InputError("free_kernel: n must be positive");
    if (!(d > 0.0)) throw InputError("free_kernel: diagonal (d = 0) excluded");
    if (n == 2) return std::exp(-(s - 1.0) * d) / (4.0 * kPi * std::sinh(d));
    if (n == 1) {
        double q = std::exp(-2.0 * d);
        return std::exp(-s * d) * resolvent_series(1, s, q) / (2.0 * std::sqrt(kPi));
    }
    double q = std::exp(-2.0 * d);
    return std::exp(-s * d) * resolvent_series(n, s, q) / (2.0 * std::pow(kPi, 0.5 * n));
}

cplx free_kernel(int n, cplx s, double coshd)
{
    if (!(coshd > 1.0)) throw InputError("free_kernel: cosh d must exceed 1 (diagonal excluded)");
    double e = coshd - 1.0;
    double d = std::log1p(e + std::sqrt(e * (e + 2.0)));
    return free_kernel_d(n, s, d);
}

cplx free_kernel_leading(int n, cplx s)
{
    if (n < 1) throw InputError("free_kernel: n must be positive");
    return gamma_ratio(s, s - 0.5 * n + 1.0) / (2.0 * std::pow(kPi, 0.5 * n));
}

cplx hurwitz_zeta(cplx s, double a)
{
    if (!(s.real() > 1.0)) throw InputError("hurwitz_zeta: requires Re s > 1");
    if (!(a > 0.0)) throw InputError("hurwitz_zeta: requires a > 0");
    // Euler-Maclaurin after a direct head of K terms.
    static const double B2[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
                                -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
    const int K = 12 + static_cast<int>(std::abs(s));
    cplx sum = 0.0;
    for (int j = 0; j < K; ++j) sum += std::exp(-s * std::log(a + j));
    double N = a + K;
    cplx lN = std::log(cplx(N));
    sum += std::exp((1.0 - s) * lN) / (s - 1.0) + 0.5 * std::exp(-s * lN);
    cplx rising = s;        // s (s+1) ... (s + 2j - 2)
    double fact = 2.0;      // (2j)!
    cplx pw = std::exp(-(s + 1.0) * lN);
    for (int j = 1; j <= 8; ++j) {
        sum += B2[j - 1] / fact * rising * pw;
        rising *= (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        pw /= N * N;
    }
    return sum;
}

}  // namespace cusp
