#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "toda/errors.hpp"

namespace toda {

using cplx = std::complex<double>;

// Shared plan for the contour and double-exponential integrators.
//
// offsets are the Mellin-Barnes contour depths alpha_1 < ... < alpha_{N-1}
// (in units of hbar); window_halfwidth = nullopt means "auto", in which case
// the window is derived from the caller-supplied decay_rate and center.
struct ContourPlan {
    std::vector<double> offsets;
    std::optional<double> window_halfwidth; // nullopt = auto
    int nodes_per_unit = 8;
    double tol = 1e-10;        // target absolute error
    double decay_rate = 1.0;   // c in |f| ~ e^{-c |Re w|} (line) or e^{-c e^{|tau|}} (DE)
    double center = 0.0;       // window center along the contour
    long long max_evals = 20'000'000;

    void require_admissible_offsets() const; // strictly increasing, positive
};

struct QuadResult {
    cplx value{0.0, 0.0};
    double abs_err_est = 0.0;
    long long nodes_used = 0;
};

// Worker cap for parallel integrand evaluation.  Reductions are fixed-order
// pairwise sums, so results do not depend on the worker count.
void set_worker_count(int workers);
int worker_count();

// Fixed-order pairwise summation.
cplx pairwise_sum(std::span<const cplx> v);

// Composite 16-point Gauss-Legendre nodes and weights on [lo, hi].
struct NodeSet {
    std::vector<double> x;
    std::vector<double> w;
};
NodeSet gl_composite(double lo, double hi, int panels);

using Integrand1D = std::function<cplx(cplx)>;
using IntegrandReal = std::function<cplx(double)>;

// Integral over the horizontal contour R + i*shift of an exponentially
// decaying analytic integrand.  Refines by panel doubling until the last
// change is below tol; throws NonConvergence if refinements keep
// disagreeing beyond 10*tol, BudgetExceeded past plan.max_evals.
QuadResult integrate_line(const Integrand1D& f, double shift, const ContourPlan& plan);

// One layer of a nested integral.  Layers are listed innermost first.
// weight(own, outer) is this layer's integrand factor; `outer` holds the
// variables of all enclosing layers, outermost first.
struct IteratedLayer {
    int dimension = 1;
    double shift = 0.0;
    std::function<cplx(std::span<const cplx> own, std::span<const cplx> outer)> weight;
    std::optional<double> window_halfwidth;
    double center = 0.0;
    double decay_rate = 0.0; // 0 = use plan.decay_rate
    bool de = false;         // trapezoid-on-real-axis rule instead of GL panels
};

QuadResult integrate_iterated(const std::vector<IteratedLayer>& layers, const ContourPlan& plan);

// Trapezoid rule for integrands with double-exponential decay
// |f(tau)| <= C exp(-c e^{|tau - center|}), c = plan.decay_rate.
QuadResult integrate_de(const IntegrandReal& f, double center, const ContourPlan& plan);

// Tensor-product Gauss-Legendre integral over a real box, with one or two
// doubling refinements for the error estimate.
QuadResult integrate_box(std::span<const double> lo, std::span<const double> hi,
                         const ContourPlan& plan,
                         const std::function<cplx(std::span<const double>)>& f);

// Auto window half-widths (exposed for reuse by the evaluators).
double line_auto_halfwidth(const ContourPlan& plan, double decay_rate, double center);
double de_auto_halfwidth(const ContourPlan& plan, double decay_rate);

} // namespace toda
