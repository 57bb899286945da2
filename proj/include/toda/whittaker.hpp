#pragma once

#include <complex>
#include <span>
#include <vector>

#include "toda/kernels.hpp"
#include "toda/quadrature.hpp"

namespace toda {

struct Rapidities {
    std::vector<double> y;
    ChainParams params;

    int n() const { return static_cast<int>(y.size()); }
    void validate() const;
};

struct Positions {
    std::vector<double> x;

    int n() const { return static_cast<int>(x.size()); }
    void validate() const;
};

// One residue-bookkeeping sequence from the contour-shift enumeration.
// entries[s][a-1] = R_{a,s} for 1 <= a <= N-s, 0 <= s <= N-1.
struct RSequence {
    std::vector<double> r; // r_s = x_{N-s} - x_{N-s+1}, s = 1..N-1 (stored at index s-1)
    std::vector<std::vector<double>> entries;

    int n() const { return static_cast<int>(entries.empty() ? 0 : entries[0].size()); }
    double R(int a, int s) const { return entries[static_cast<size_t>(s)][static_cast<size_t>(a - 1)]; }
    bool check_invariants(double tol = 1e-9) const;
};

// phi_y(x) = exp(i x y / hbar), the induction seed.
cplx phi_base(double y, double x, const ChainParams& params);

// Mellin-Barnes evaluator: iterated contour integrals over (R - i alpha_s)
// with Gamma-product weights.  plan.offsets are in units of hbar; empty
// offsets select the default alpha_s = s/4.  N <= 4.
QuadResult phi_mb(const Rapidities& y, const Positions& x, const ContourPlan& plan);

// Gauss-Givental evaluator: pyramidal nested real integrals of Lambda
// kernels, innermost variable first.  N <= 4.
QuadResult phi_gg(const Rapidities& y, const Positions& x, const ContourPlan& plan);

// Single Lambda layer applied to phi_{N-1}, with the layer spectral
// parameter y_N; inner evaluations are memoized on the dyadic grid.
QuadResult phi_gg_recursive(const Rapidities& y, const Positions& x, const ContourPlan& plan);

// All residue sequences produced by the contour-shift algorithm for the
// position differences r (length N-1).  Throws DegenerateInput when a
// contiguous partial sum of r vanishes within 1e-12.
std::vector<RSequence> enumerate_r_sequences(std::span<const double> r);

// Pi_n exp(-(1/hbar) e^{(x_{n+1}-x_n)/2}) and its logarithm.
double decay_envelope(const Positions& x, const ChainParams& params);
double log_decay_envelope(const Positions& x, const ChainParams& params);

// int exp(-a cosh t) e^{i nu t} dt = 2 K_{i nu}(a); trapezoid with
// refinement, the reduced core of every two-variable Lambda integral.
QuadResult cosh_fourier(double a, double nu, double tol);

// phi at N = 2 through the reduced integral; shared by the transforms.
cplx phi_n2(double y1, double y2, double x1, double x2, const ChainParams& params, double tol);

} // namespace toda
