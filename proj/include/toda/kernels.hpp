#pragma once

#include <complex>
#include <span>
#include <vector>

#include "toda/errors.hpp"
#include "toda/gammaplex.hpp"

namespace toda {

struct ChainParams {
    double hbar = 1.0;
    int n = 1;

    void validate() const
    {
        if (!(hbar > 0.0)) throw PreconditionViolated("ChainParams: hbar must be positive");
        if (n < 1) throw PreconditionViolated("ChainParams: n must be >= 1");
    }
};

// One evaluation point of a kernel: a spectral parameter plus the two
// position-type argument groups.  Lambda-type kernels map from inner
// (dim k) to outer (dim k+1); Q-type kernels have equal dimensions.
struct KernelPoint {
    cplx spectral{0.0, 0.0};
    std::vector<double> outer;
    std::vector<double> inner;

    void require_lambda_shape() const
    {
        if (outer.size() != inner.size() + 1) {
            throw DimensionMismatch("KernelPoint: lambda kernels need dim(outer) = dim(inner)+1");
        }
    }
    void require_q_shape() const
    {
        if (outer.size() != inner.size()) {
            throw DimensionMismatch("KernelPoint: Q kernels need equal dimensions");
        }
    }
};

enum class VSign { plus, minus };

// V_{lambda;+-}(x) = exp{ -(1/hbar) e^{+-x} + i lambda x / (2 hbar) }
cplx v_kernel(cplx lambda, VSign sign, double x, const ChainParams& params);

// Q-operator kernel, product of 2N V-factors; the n = 1 index wraps to
// x'_N (closed-chain convention, see README for the degeneration test).
cplx q_kernel(cplx lambda, std::span<const double> x, std::span<const double> xp,
              const ChainParams& params);

// Raising kernel Lambda^{(N)}_y(x_N | tau_{N-1}); N = x.size().
cplx lambda_kernel(cplx y, std::span<const double> x, std::span<const double> tau,
                   const ChainParams& params);

// Conjugated kernel LambdaBar^{(N)}_y(tau_{N-1} | x_N).
cplx lambda_bar_kernel(cplx y, std::span<const double> tau, std::span<const double> x,
                       const ChainParams& params);

// L^{(M)}_y(x_M | tau_M) with M = x.size() = tau.size().
cplx l_kernel(cplx y, std::span<const double> x, std::span<const double> tau,
              const ChainParams& params);

// Mellin-Barnes weight varpi(w_N | y_{N+1}); requires y.size() = w.size()+1.
// Denominator poles give the exact-zero marker; numerator poles throw.
LogComplex mb_weight(std::span<const cplx> w, std::span<const cplx> y,
                     const ChainParams& params);

// Sklyanin density mu(y_N) = (2 pi hbar)^{-N} Pi_{k != p} 1/Gamma((y_k-y_p)/(i hbar)).
double sklyanin_density(std::span<const double> y, const ChainParams& params);

// mu~(w_N) = exp((pi/hbar) sum w) * mu(w_N).
double mu_tilde_density(std::span<const double> w, const ChainParams& params);

} // namespace toda
