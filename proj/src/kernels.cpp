#include "toda/kernels.hpp"

#include <cmath>
#include <numbers>

namespace toda {

namespace {

const cplx kI(0.0, 1.0);

// exponent of V_{lambda;+-}(x), summed before the single exp in the products
cplx v_exponent(cplx lambda, VSign sign, double x, const ChainParams& p)
{
    const double e = sign == VSign::plus ? std::exp(x) : std::exp(-x);
    return cplx(-e / p.hbar, 0.0) + kI * lambda * x / (2.0 * p.hbar);
}

} // namespace

cplx v_kernel(cplx lambda, VSign sign, double x, const ChainParams& params)
{
    params.validate();
    return std::exp(v_exponent(lambda, sign, x, params));
}

cplx q_kernel(cplx lambda, std::span<const double> x, std::span<const double> xp,
              const ChainParams& params)
{
    params.validate();
    const size_t N = x.size();
    if (xp.size() != N || N == 0) {
        throw DimensionMismatch("q_kernel: x and x' must have the same nonzero dimension");
    }
    cplx expo{0.0, 0.0};
    for (size_t n = 0; n < N; ++n) {
        const double xprev = n == 0 ? xp[N - 1] : xp[n - 1]; // wrap x'_0 := x'_N
        expo += v_exponent(lambda, VSign::minus, x[n] - xp[n], params);
        expo += v_exponent(lambda, VSign::plus, x[n] - xprev, params);
    }
    return std::exp(expo);
}

cplx lambda_kernel(cplx y, std::span<const double> x, std::span<const double> tau,
                   const ChainParams& params)
{
    params.validate();
    const size_t N = x.size();
    if (N == 0 || tau.size() + 1 != N) {
        throw DimensionMismatch("lambda_kernel: need dim(tau) = dim(x) - 1");
    }
    cplx expo = kI * y * (x[0] + x[N - 1]) / (2.0 * params.hbar);
    for (size_t n = 0; n + 1 < N; ++n) {
        expo += v_exponent(y, VSign::minus, x[n] - tau[n], params);
        expo += v_exponent(y, VSign::plus, x[n + 1] - tau[n], params);
    }
    return std::exp(expo);
}

cplx lambda_bar_kernel(cplx y, std::span<const double> tau, std::span<const double> x,
                       const ChainParams& params)
{
    params.validate();
    const size_t N = x.size();
    if (N == 0 || tau.size() + 1 != N) {
        throw DimensionMismatch("lambda_bar_kernel: need dim(tau) = dim(x) - 1");
    }
    cplx expo = -kI * y * (x[0] + x[N - 1]) / (2.0 * params.hbar);
    for (size_t n = 0; n + 1 < N; ++n) {
        expo += v_exponent(-y, VSign::minus, x[n] - tau[n], params);
        expo += v_exponent(-y, VSign::plus, x[n + 1] - tau[n], params);
    }
    return std::exp(expo);
}

cplx l_kernel(cplx y, std::span<const double> x, std::span<const double> tau,
              const ChainParams& params)
{
    params.validate();
    const size_t M = x.size();
    if (M == 0 || tau.size() != M) {
        throw DimensionMismatch("l_kernel: x and tau must have the same nonzero dimension");
    }
    cplx expo = kI * y * (x[0] - tau[M - 1]) / (2.0 * params.hbar);
    for (size_t n = 0; n < M; ++n) {
        expo += v_exponent(y, VSign::minus, x[n] - tau[n], params);
    }
    for (size_t n = 0; n + 1 < M; ++n) {
        expo += v_exponent(y, VSign::plus, x[n + 1] - tau[n], params);
    }
    return std::exp(expo);
}

LogComplex mb_weight(std::span<const cplx> w, std::span<const cplx> y,
                     const ChainParams& params)
{
    params.validate();
    if (y.size() != w.size() + 1) {
        throw DimensionMismatch("mb_weight: need y.size() = w.size() + 1");
    }
    const double log_hbar = std::log(params.hbar);
    double log_mod = 0.0;
    double phase = 0.0;
    for (const cplx& wa : w) {
        for (const cplx& yb : y) {
            // hbar^{(i/hbar)(w_a - y_b)}
            const cplx expo = kI * (wa - yb) / params.hbar * log_hbar;
            log_mod += expo.real();
            phase += expo.imag();
            const LogComplex lg = log_gamma(-kI * (yb - wa) / params.hbar);
            log_mod += lg.log_mod;
            phase += lg.phase;
        }
    }
    for (size_t a = 0; a < w.size(); ++a) {
        for (size_t b = 0; b < w.size(); ++b) {
            if (a == b) continue;
            const cplx arg = -kI * (w[b] - w[a]) / params.hbar;
            if (near_gamma_pole(arg)) return LogComplex::zero();
            const LogComplex lg = log_gamma(arg);
            log_mod -= lg.log_mod;
            phase -= lg.phase;
        }
    }
    LogComplex r{log_mod, phase};
    return r.normalize();
}

double sklyanin_density(std::span<const double> y, const ChainParams& params)
{
    params.validate();
    const size_t N = y.size();
    // Pairs (k,p) and (p,k) are Gamma values at conjugate purely imaginary
    // arguments, so the phases cancel and the density is a real product.
    double log_mod = -static_cast<double>(N) * std::log(2.0 * std::numbers::pi * params.hbar);
    for (size_t k = 0; k < N; ++k) {
        for (size_t p = k + 1; p < N; ++p) {
            const cplx arg = -kI * (y[k] - y[p]) / params.hbar;
            if (near_gamma_pole(arg)) return 0.0;
            log_mod -= 2.0 * log_gamma(arg).log_mod;
        }
    }
    return std::exp(log_mod);
}

double mu_tilde_density(std::span<const double> w, const ChainParams& params)
{
    double sum = 0.0;
    for (double wa : w) sum += wa;
    return std::exp(std::numbers::pi * sum / params.hbar) * sklyanin_density(w, params);
}

} // namespace toda
