#include "toda/gammaplex.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562; // log sqrt(2 pi)

double wrap_phase(double p)
{
    if (std::isnan(p) || std::isinf(p)) return 0.0;
    p = std::fmod(p, 2.0 * kPi);
    if (p <= -kPi) p += 2.0 * kPi;
    if (p > kPi) p -= 2.0 * kPi;
    return p;
}

// log sin(pi z) up to an integer multiple of 2 pi i, stable for large |Im z|.
cplx log_sin_pi(cplx z)
{
    const cplx w = kPi * z;
    const double y = w.imag();
    if (std::abs(y) < 20.0) {
        return std::log(std::sin(w));
    }
    const cplx i(0.0, 1.0);
    if (y > 0.0) {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        return cplx(-std::log(2.0), kPi / 2.0) - i * w + std::log(1.0 - std::exp(2.0 * i * w));
    }
    // sin w = (e^{iw}/(2i)) (1 - e^{-2iw})
    return cplx(-std::log(2.0), -kPi / 2.0) + i * w + std::log(1.0 - std::exp(-2.0 * i * w));
}

// Lanczos g = 7, 9 coefficients; right half-plane Re z >= 0.5.
cplx lanczos_log_gamma(cplx z)
{
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    const cplx zm1 = z - 1.0;
    cplx a = c[0];
    for (int k = 1; k < 9; ++k) a += c[k] / (zm1 + static_cast<double>(k));
    const cplx t = zm1 + 7.5;
    return kLogSqrt2Pi + (zm1 + 0.5) * std::log(t) - t + std::log(a);
}

// Stirling with recurrence shift; accurate to ~1e-17 once |z| >= 12.
cplx stirling_log_gamma(cplx z)
{
    static const double stirling_coef[8] = {
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    };
    cplx shift = 0.0;
    while (std::abs(z) < 12.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx p = inv;
    for (double coef : stirling_coef) {
        series += coef * p;
        p *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + kLogSqrt2Pi + series - shift;
}

cplx log_gamma_raw(cplx z)
{
    if (z.real() < 0.5) {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(kPi) - log_sin_pi(z) - log_gamma_raw(1.0 - z);
    }
    if (std::abs(z.imag()) > 20.0) return stirling_log_gamma(z);
    return lanczos_log_gamma(z);
}

} // namespace

LogComplex LogComplex::zero()
{
    return LogComplex{-std::numeric_limits<double>::infinity(), 0.0};
}

LogComplex LogComplex::from_complex(cplx z)
{
    if (z == cplx(0.0, 0.0)) return zero();
    return LogComplex{std::log(std::abs(z)), std::arg(z)};
}

cplx LogComplex::to_complex() const
{
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_mod), phase);
}

bool LogComplex::is_zero() const
{
    return std::isinf(log_mod) && log_mod < 0.0;
}

LogComplex& LogComplex::normalize()
{
    phase = wrap_phase(phase);
    return *this;
}

LogComplex LogComplex::operator*(const LogComplex& o) const
{
    if (is_zero() || o.is_zero()) return zero();
    LogComplex r{log_mod + o.log_mod, phase + o.phase};
    return r.normalize();
}

LogComplex LogComplex::operator/(const LogComplex& o) const
{
    LogComplex r{log_mod - o.log_mod, phase - o.phase};
    return r.normalize();
}

LogComplex LogComplex::conj() const
{
    LogComplex r{log_mod, -phase};
    return r.normalize();
}

bool near_gamma_pole(cplx z, double tol)
{
    if (z.real() > 0.5) return false;
    const double n = std::round(z.real());
    if (n > 0.5) return false;
    return std::abs(z - cplx(n, 0.0)) <= tol;
}

LogComplex log_gamma(cplx z)
{
    if (near_gamma_pole(z)) {
        throw PoleError("log_gamma: argument within pole tolerance of a nonpositive integer");
    }
    // Evaluate in the upper half-plane and conjugate, so that
    // log_gamma(conj z) == conj(log_gamma(z)) holds exactly.
    if (z.imag() < 0.0) {
        LogComplex r = log_gamma(std::conj(z));
        return r.conj();
    }
    const cplx lg = log_gamma_raw(z);
    LogComplex r{lg.real(), lg.imag()};
    return r.normalize();
}

LogComplex eval_product(const GammaProductSpec& spec)
{
    double log_mod = 0.0;
    double phase = 0.0;
    for (const cplx& z : spec.numerators) {
        const LogComplex lg = log_gamma(z); // PoleError propagates
        log_mod += lg.log_mod;
        phase += lg.phase;
    }
    for (const cplx& z : spec.denominators) {
        if (near_gamma_pole(z)) return LogComplex::zero(); // 1/Gamma(pole) = 0
        const LogComplex lg = log_gamma(z);
        log_mod -= lg.log_mod;
        phase -= lg.phase;
    }
    LogComplex r{log_mod, phase};
    return r.normalize();
}

} // namespace toda
