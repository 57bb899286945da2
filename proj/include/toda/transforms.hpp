#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "toda/kernels.hpp"
#include "toda/quadrature.hpp"
#include "toda/whittaker.hpp"

namespace toda {

// Smooth compactly supported test function: a sum of radial bump terms
// poly(u) * exp(-1/(1-u^2)) in the scaled radial variable u, extended by 0.
// With symmetrized = true the evaluation averages over argument
// permutations; min_gap > 0 multiplies in a smooth window that vanishes
// where two arguments come closer than min_gap and is 1 beyond 2*min_gap.
struct BumpTerm {
    std::vector<double> center;
    double radius = 1.0;
    std::vector<double> poly_coeffs{1.0};
};

struct TestFunction {
    std::vector<BumpTerm> terms;
    bool symmetrized = false;
    double min_gap = 0.0;

    int dim() const;
    double operator()(std::span<const double> u) const;
    // bounding interval shared by every coordinate (valid for the
    // symmetrized evaluation as well)
    std::pair<double, double> support_interval() const;
};

// smooth plateau profile: 1 on |d| <= eps, 0 beyond |d| >= 2 eps
double gap_window(double d, double eps);

struct IdentityReport {
    std::string name;
    cplx lhs{0.0, 0.0};
    cplx rhs{0.0, 0.0};
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    bool pass = false;
    double tol = 0.0;
    long long nodes = 0;
    double seconds = 0.0;
    double tail_bound = 0.0;

    static IdentityReport make(std::string name, cplx lhs, cplx rhs, double tol,
                               long long nodes, double seconds, double tail_bound = 0.0);
};

// U_N[F](x) = (1/sqrt(N!)) int phi_y(x) F(y) mu(y) d^N y over supp F.
cplx apply_u(const TestFunction& F, const Positions& x, const ChainParams& params,
             const ContourPlan& plan);

// V_N[F](y) = (1/sqrt(N!)) int phi_y(x) F(x) d^N x over supp F.
cplx apply_v(const TestFunction& F, const Rapidities& y, const ContourPlan& plan);

// A sampled function together with the box the quadrature should cover.
struct SampledFn {
    std::function<cplx(std::span<const double>)> eval;
    std::vector<double> lo;
    std::vector<double> hi;
};

cplx inner_product_positions(const SampledFn& f, const SampledFn& g, const ContourPlan& plan);

cplx inner_product_spectral(const TestFunction& F, const TestFunction& G,
                            const ChainParams& params, const ContourPlan& plan);

// N! int (U[Psi])* U[Phi] d^N x  vs  N! int Psi* Phi dmu ;  N <= 2.
// The check probes test functions supported away from the spectral
// diagonals (min_gap); the extension to arbitrary L^2 data is a density
// argument with no numerical content, so it is not (and cannot be)
// exercised here.
IdentityReport isometry_u(const TestFunction& Psi, const TestFunction& Phi,
                          const ChainParams& params, const ContourPlan& plan);

// || V_N[F] ||^2_{L^2(dmu)}  vs  || F ||^2_{L^2(dx)} ;  N <= 2.  The spectral
// side is integrated over a truncated box; the recorded tail bound must stay
// below tol/2 or TailTooLarge is thrown.
IdentityReport isometry_v(const TestFunction& F, const ChainParams& params,
                          const ContourPlan& plan);

// H_1[G](w) = lim_{a->0+} (1/2 pi hbar) int Gamma((y-w+ia)/(i hbar)) G(y) dy,
// evaluated through the boundary-value (Plemelj) formula.
cplx h_transform_n1(const TestFunction& G, double w, const ChainParams& params,
                    const ContourPlan& plan);

// alpha-regularized evaluation of the same integral (for the limit check)
cplx h_transform_n1_alpha(const TestFunction& G, double w, double alpha,
                          const ChainParams& params, const ContourPlan& plan);

// || H_1[G] ||^2_{L^2(dmu~)} vs || G ||^2_{L^2(dmu~)}
IdentityReport h_isometry_n1(const TestFunction& G, const ChainParams& params,
                             const ContourPlan& plan);

} // namespace toda
