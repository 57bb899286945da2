#pragma once

#include <string>
#include <vector>

#include "toda/transforms.hpp"

namespace toda {

struct CaseSpec {
    unsigned long long seed = 42;
    int n_cases = 10;
    double box = 1.0; // half-width of the sampling box for spectral/position draws
    double tol = 1e-6;

    void validate() const
    {
        if (n_cases < 0) throw PreconditionViolated("CaseSpec: n_cases must be >= 0");
        if (!(box > 0.0)) throw PreconditionViolated("CaseSpec: box must be positive");
        if (!(tol > 0.0)) throw PreconditionViolated("CaseSpec: tol must be positive");
    }
};

// int V_{l;+} V_{l;-} V_{m;+} V_{m;-} dy against the cosh-ratio-prefactored
// swap of the spectral parameters.
IdentityReport verify_four_v(double x_p, double x_p1, double xp_p, double xp_p1, double lambda,
                             double mu, const ChainParams& params, const ContourPlan& plan);

// LambdaBar_{y'} e^{eps_N x_N/hbar} e^{-eps_1 x_1/hbar} Lambda_y integrated
// over x against the Gamma-prefactored contracted kernel product; N = 2 or 3.
IdentityReport verify_lambda_exchange(double y, double yp, double eps1, double epsN,
                                      std::span<const double> tau, std::span<const double> taup,
                                      const ChainParams& params, const ContourPlan& plan);

// Lambda^{(N)}_l Lambda^{(N-1)}_m = Lambda^{(N)}_m Lambda^{(N-1)}_l; N = 2 or 3.
IdentityReport verify_lambda_commutation(double lambda, double mu, std::span<const double> x,
                                         std::span<const double> xp, const ChainParams& params,
                                         const ContourPlan& plan);

// L^{(N-1)}_y Lambda^{(N-1)}_w = hbar^{(i/hbar)(w-y)} Gamma((y-w)/(i hbar))
// Lambda^{(N-1)}_w L^{(N-2)}_y for Im y > Im w; N = 3.
IdentityReport verify_l_lambda_exchange(cplx y, cplx w, std::span<const double> x,
                                        std::span<const double> z, const ChainParams& params,
                                        const ContourPlan& plan);

// Degenerate Gustafson integral over R^n against its closed form; n <= 2,
// min Im(y) > 0 > max Im(x).
IdentityReport verify_gustafson(int n, std::span<const cplx> y, std::span<const cplx> x, double s,
                                const ChainParams& params, const ContourPlan& plan);

// Batch comparison phi_mb vs phi_gg on seeded random points; N in {2, 3}.
std::vector<IdentityReport> verify_mb_gg(const CaseSpec& spec, int N, const ChainParams& params);

// Finite-difference check that phi is an eigenfunction of the open-chain
// Hamiltonian, with eigenvalue sum(y^2)/2; N = 1 or 2.
IdentityReport verify_eigenfunction(const Rapidities& y, const Positions& x, double fd_step,
                                    const ContourPlan& plan);

extern const std::vector<std::string> kIdentityNames; // valid names for run_identity

// Seeded random cases for one named identity ("four_v", "lambda_exchange",
// "lambda_commutation", "l_lambda", "gustafson", "mb_gg", "eigenfunction",
// "isometry_u", "isometry_v", "h_n1", "r_sequences").  Unknown names throw
// PreconditionViolated.
std::vector<IdentityReport> run_identity(const std::string& name, const CaseSpec& spec);

// Every verifier with seeded random cases; deterministic given the seed,
// name-sorted report list.
std::vector<IdentityReport> run_suite(const CaseSpec& spec);

} // namespace toda
