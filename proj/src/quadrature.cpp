#include "toda/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace toda {

namespace {

// 16-point Gauss-Legendre on [-1, 1], positive half; mirrored below.
constexpr int kGL = 16;
constexpr double kGLx[8] = {
    0.09501250983763744018531934,
    0.28160355077925891323046050,
    0.45801677765722738634241944,
    0.61787624440264374844667176,
    0.75540440835500303389510119,
    0.86563120238783174388046789,
    0.94457502307323257607798842,
    0.98940093499164993259615417,
};
constexpr double kGLw[8] = {
    0.18945061045506849628539672,
    0.18260341504492358886676366,
    0.16915651939500253818931208,
    0.14959598881657673208150173,
    0.12462897125553387205247628,
    0.09515851168249278480992510,
    0.06225352393864789286284384,
    0.02715245941175409485178057,
};

int g_workers = 1;

// Evaluate f at indices [0, n) into slots, optionally in parallel; the slot
// order (not the worker schedule) fixes the summation order.
template <typename F>
void parallel_fill(long long n, std::vector<cplx>& slots, const F& f)
{
    slots.resize(static_cast<size_t>(n));
    const int workers = g_workers;
    if (workers <= 1 || n < 256) {
        for (long long i = 0; i < n; ++i) slots[static_cast<size_t>(i)] = f(i);
        return;
    }
    const long long chunk = (n + workers - 1) / workers;
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) {
        const long long lo = w * chunk;
        const long long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        futs.push_back(std::async(std::launch::async, [&, lo, hi] {
            for (long long i = lo; i < hi; ++i) slots[static_cast<size_t>(i)] = f(i);
        }));
    }
    for (auto& fu : futs) fu.get();
}

} // namespace

void ContourPlan::require_admissible_offsets() const
{
    double prev = 0.0;
    for (double a : offsets) {
        if (!(a > prev)) {
            throw PreconditionViolated("ContourPlan: offsets must be strictly increasing and positive");
        }
        prev = a;
    }
}

void set_worker_count(int workers)
{
    g_workers = std::max(1, workers);
}

int worker_count()
{
    return g_workers;
}

cplx pairwise_sum(std::span<const cplx> v)
{
    if (v.empty()) return {0.0, 0.0};
    if (v.size() == 1) return v[0];
    if (v.size() <= 8) {
        cplx s = v[0];
        for (size_t i = 1; i < v.size(); ++i) s += v[i];
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

NodeSet gl_composite(double lo, double hi, int panels)
{
    NodeSet ns;
    ns.x.reserve(static_cast<size_t>(panels) * kGL);
    ns.w.reserve(static_cast<size_t>(panels) * kGL);
    const double len = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * len;
        const double mid = a + 0.5 * len;
        const double half = 0.5 * len;
        for (int k = 7; k >= 0; --k) {
            ns.x.push_back(mid - half * kGLx[k]);
            ns.w.push_back(half * kGLw[k]);
        }
        for (int k = 0; k < 8; ++k) {
            ns.x.push_back(mid + half * kGLx[k]);
            ns.w.push_back(half * kGLw[k]);
        }
    }
    return ns;
}

double line_auto_halfwidth(const ContourPlan& plan, double decay_rate, double center)
{
    const double c = decay_rate > 0.0 ? decay_rate : 1.0;
    const double L = std::max(std::log(1.0 / plan.tol), 2.0);
    return std::abs(center) + 2.0 + L / c;
}

double de_auto_halfwidth(const ContourPlan& plan, double decay_rate)
{
    const double c = decay_rate > 0.0 ? decay_rate : 1.0;
    const double L = std::max(std::log(1.0 / plan.tol), 2.0);
    return std::log(L / c) + 4.0;
}

QuadResult integrate_line(const Integrand1D& f, double shift, const ContourPlan& plan)
{
    const double W = plan.window_halfwidth
                         ? *plan.window_halfwidth
                         : line_auto_halfwidth(plan, plan.decay_rate, plan.center);
    const double lo = plan.center - W;
    const double hi = plan.center + W;

    int panels = std::max(1, static_cast<int>(std::ceil(2.0 * W * plan.nodes_per_unit / kGL)));
    long long used = 0;
    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();

    std::vector<cplx> slots;
    for (int round = 0; round < 14; ++round) {
        const NodeSet ns = gl_composite(lo, hi, panels);
        const long long n = static_cast<long long>(ns.x.size());
        if (used + n > plan.max_evals) {
            throw BudgetExceeded("integrate_line: node budget exceeded");
        }
        parallel_fill(n, slots, [&](long long i) {
            const size_t k = static_cast<size_t>(i);
            return ns.w[k] * f(cplx(ns.x[k], shift));
        });
        used += n;
        const cplx val = pairwise_sum(slots);
        if (have_prev) {
            delta = std::abs(val - prev);
            if (delta <= std::max(plan.tol, 1e-16)) {
                return {val, delta, used};
            }
        }
        prev = val;
        have_prev = true;
        panels *= 2;
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("integrate_line: refinements disagree beyond 10*tol");
    }
    return {prev, delta, used};
}

QuadResult integrate_de(const IntegrandReal& f, double center, const ContourPlan& plan)
{
    const double T = plan.window_halfwidth ? *plan.window_halfwidth
                                           : de_auto_halfwidth(plan, plan.decay_rate);
    double h = std::min(0.5, 1.0 / std::max(1, plan.nodes_per_unit / 4));
    long long used = 0;
    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();

    std::vector<cplx> slots;
    for (int round = 0; round < 12; ++round) {
        const long long J = static_cast<long long>(std::ceil(T / h));
        const long long n = 2 * J + 1;
        if (used + n > plan.max_evals) {
            throw BudgetExceeded("integrate_de: node budget exceeded");
        }
        parallel_fill(n, slots, [&](long long i) {
            const double tau = center + static_cast<double>(i - J) * h;
            return f(tau);
        });
        used += n;
        const cplx val = h * pairwise_sum(slots);
        if (have_prev) {
            delta = std::abs(val - prev);
            if (delta <= std::max(plan.tol, 1e-16)) {
                return {val, delta, used};
            }
        }
        prev = val;
        have_prev = true;
        h *= 0.5;
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("integrate_de: refinements disagree beyond 10*tol");
    }
    return {prev, delta, used};
}

namespace {

struct NestState {
    const std::vector<IteratedLayer>* layers = nullptr;
    const ContourPlan* plan = nullptr;
    int level = 0; // refinement level: node density multiplier 2^level
    long long evals = 0;
};

cplx eval_nest(NestState& st, size_t layer_idx, std::vector<cplx>& outer)
{
    const IteratedLayer& L = (*st.layers)[layer_idx];
    const ContourPlan& plan = *st.plan;
    const double c = L.decay_rate > 0.0 ? L.decay_rate : plan.decay_rate;

    NodeSet ns;
    double h = 0.0;
    if (L.de) {
        const double T = L.window_halfwidth ? *L.window_halfwidth : de_auto_halfwidth(plan, c);
        h = std::min(0.5, 1.0 / std::max(1, plan.nodes_per_unit / 4)) / (1 << st.level);
        const long long J = static_cast<long long>(std::ceil(T / h));
        ns.x.reserve(static_cast<size_t>(2 * J + 1));
        for (long long j = -J; j <= J; ++j) {
            ns.x.push_back(L.center + static_cast<double>(j) * h);
            ns.w.push_back(h);
        }
    } else {
        const double W =
            L.window_halfwidth ? *L.window_halfwidth : line_auto_halfwidth(plan, c, L.center);
        const int panels = std::max(
            1, static_cast<int>(std::ceil(2.0 * W * plan.nodes_per_unit / kGL)) << st.level);
        ns = gl_composite(L.center - W, L.center + W, panels);
    }

    const size_t M = ns.x.size();
    const int dim = L.dimension;
    std::vector<size_t> idx(static_cast<size_t>(dim), 0);
    std::vector<cplx> own(static_cast<size_t>(dim));
    std::vector<cplx> contrib;
    contrib.reserve(M);

    // Tensor sweep over this layer's dim-fold node grid, recursing inward.
    size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= M;
    st.evals += static_cast<long long>(total);
    if (st.evals > plan.max_evals) {
        throw BudgetExceeded("integrate_iterated: node budget exceeded");
    }

    std::vector<cplx> sums(total);
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        double wprod = 1.0;
        for (int d = 0; d < dim; ++d) {
            const size_t k = rem % M;
            rem /= M;
            idx[static_cast<size_t>(d)] = k;
            own[static_cast<size_t>(d)] = cplx(ns.x[k], L.shift);
            wprod *= ns.w[k];
        }
        cplx inner{1.0, 0.0};
        if (layer_idx > 0) {
            const size_t base = outer.size();
            outer.insert(outer.end(), own.begin(), own.end());
            inner = eval_nest(st, layer_idx - 1, outer);
            outer.resize(base);
        }
        sums[flat] = wprod * L.weight(own, outer) * inner;
    }
    return pairwise_sum(sums);
}

} // namespace

QuadResult integrate_box(std::span<const double> lo, std::span<const double> hi,
                         const ContourPlan& plan,
                         const std::function<cplx(std::span<const double>)>& f)
{
    const size_t dim = lo.size();
    if (hi.size() != dim || dim == 0) throw DimensionMismatch("integrate_box: bad box");
    long long used = 0;
    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 3; ++level) {
        std::vector<NodeSet> ns(dim);
        size_t total = 1;
        for (size_t d = 0; d < dim; ++d) {
            const int panels = std::max(
                1,
                static_cast<int>(std::ceil((hi[d] - lo[d]) * (plan.nodes_per_unit << level) / 16.0)));
            ns[d] = gl_composite(lo[d], hi[d], panels);
            total *= ns[d].x.size();
        }
        if (used + static_cast<long long>(total) > plan.max_evals) {
            if (have_prev && delta <= 10.0 * plan.tol) break;
            throw BudgetExceeded("integrate_box: node budget exceeded");
        }
        used += static_cast<long long>(total);
        std::vector<cplx> sums(total);
        std::vector<double> pt(dim);
        for (size_t flat = 0; flat < total; ++flat) {
            size_t rem = flat;
            double w = 1.0;
            for (size_t d = 0; d < dim; ++d) {
                const size_t k = rem % ns[d].x.size();
                rem /= ns[d].x.size();
                pt[d] = ns[d].x[k];
                w *= ns[d].w[k];
            }
            sums[flat] = w * f(std::span<const double>(pt));
        }
        const cplx val = pairwise_sum(sums);
        if (have_prev) {
            delta = std::abs(val - prev);
            prev = val;
            if (delta <= plan.tol) return {val, delta, used};
        } else {
            prev = val;
            have_prev = true;
        }
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("integrate_box: refinements disagree beyond 10*tol");
    }
    return {prev, delta, used};
}

QuadResult integrate_iterated(const std::vector<IteratedLayer>& layers, const ContourPlan& plan)
{
    plan.require_admissible_offsets();
    if (layers.empty()) return {cplx(1.0, 0.0), 0.0, 0};

    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();
    long long used = 0;
    for (int level = 0; level < 8; ++level) {
        NestState st{&layers, &plan, level, 0};
        std::vector<cplx> outer;
        cplx val;
        try {
            val = eval_nest(st, layers.size() - 1, outer);
        } catch (const BudgetExceeded&) {
            if (have_prev && delta <= 10.0 * plan.tol) break;
            throw;
        }
        used += st.evals;
        if (have_prev) {
            delta = std::abs(val - prev);
            prev = val;
            if (delta <= std::max(plan.tol, 1e-15)) return {val, delta, used};
        } else {
            prev = val;
            have_prev = true;
        }
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("integrate_iterated: refinements disagree beyond 10*tol");
    }
    return {prev, delta, used};
}

} // namespace toda
