#include "toda/whittaker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace toda {

namespace {

const cplx kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
}

// hbar^{(i/hbar)(w-u)} Gamma((u-w)/(i hbar)) as a plain complex value.
cplx mb_pair_factor(cplx w, cplx u, double hbar)
{
    const cplx expo = kI * (w - u) / hbar * std::log(hbar);
    const LogComplex lg = log_gamma(-kI * (u - w) / hbar);
    return std::exp(cplx(expo.real() + lg.log_mod, expo.imag() + lg.phase));
}

struct MbSetup {
    int n = 0;
    double hbar = 1.0;
    std::vector<double> alphas; // absolute contour depths, increasing
    std::vector<double> rshift; // r_s = x_{N-s} - x_{N-s+1}, index s-1
    double window = 0.0;
    int npu = 8;
};

// One full bottom-up sweep of the iterated Mellin-Barnes integral at a fixed
// node density.  Layers share the real abscissas; layer s lives on the
// contour R - i alpha_s.  Tables are contracted innermost (s = N-1) first.
cplx mb_sweep(const MbSetup& su, std::span<const double> yv, long long& evals, long long budget)
{
    const int N = su.n;
    const double hbar = su.hbar;
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * su.window * su.npu / 16.0)));
    const NodeSet ns = gl_composite(-su.window, su.window, panels);
    const size_t M = ns.x.size();

    // per-layer complex nodes
    std::vector<std::vector<cplx>> q(static_cast<size_t>(N)); // q[s], s = 1..N-1
    for (int s = 1; s < N; ++s) {
        auto& qs = q[static_cast<size_t>(s)];
        qs.resize(M);
        for (size_t i = 0; i < M; ++i) qs[i] = cplx(ns.x[i], -su.alphas[static_cast<size_t>(s - 1)]);
    }

    std::vector<cplx> J; // I(s+1; multi over layer-s nodes); starts as ones for s = N-1
    {
        size_t sz = 1;
        for (int d = 0; d < N - 1; ++d) sz *= (d < 1 ? M : 1); // dim_{N-1} = 1
        J.assign(sz, cplx(1.0, 0.0));
    }

    for (int s = N - 1; s >= 1; --s) {
        const int dim = N - s;
        const auto& qs = q[static_cast<size_t>(s)];

        // pair factors against the upper layer (y itself when s = 1)
        const bool upper_is_y = (s == 1);
        const size_t upM = upper_is_y ? yv.size() : M;
        std::vector<cplx> G(M * upM);
        for (size_t i = 0; i < M; ++i) {
            for (size_t b = 0; b < upM; ++b) {
                const cplx u = upper_is_y ? cplx(yv[b], 0.0) : q[static_cast<size_t>(s - 1)][b];
                G[i * upM + b] = mb_pair_factor(qs[i], u, hbar);
            }
        }
        // node weight and the layer phase e^{(i/hbar) w r_s}
        std::vector<cplx> ph(M);
        for (size_t i = 0; i < M; ++i) {
            ph[i] = ns.w[i] * std::exp(kI * qs[i] * su.rshift[static_cast<size_t>(s - 1)] / hbar);
        }
        // 1/Gamma((q_j - q_i)/(i hbar)) for the in-layer denominator, dim >= 2
        std::vector<cplx> invG;
        if (dim >= 2) {
            invG.resize(M * M);
            for (size_t i = 0; i < M; ++i) {
                for (size_t j = 0; j < M; ++j) {
                    if (i == j) {
                        invG[i * M + j] = 0.0;
                        continue;
                    }
                    const cplx arg = -kI * (qs[j] - qs[i]) / hbar;
                    if (near_gamma_pole(arg)) {
                        invG[i * M + j] = 0.0;
                    } else {
                        const LogComplex lg = log_gamma(arg);
                        invG[i * M + j] = std::exp(cplx(-lg.log_mod, -lg.phase));
                    }
                }
            }
        }

        const int up_dim = N - s + 1;
        size_t up_size = 1;
        if (!upper_is_y) {
            for (int d = 0; d < up_dim; ++d) up_size *= M;
        }
        size_t q_size = 1;
        for (int d = 0; d < dim; ++d) q_size *= M;

        // Budget in integrand-evaluation equivalents: Gamma tables and table
        // entries at full weight, the tensor contraction amortized (64 fused
        // complex ops ~ one special-function evaluation).
        const long long ops = static_cast<long long>(up_size) * static_cast<long long>(q_size);
        evals += static_cast<long long>(M * upM) + (dim >= 2 ? static_cast<long long>(M * M) : 0) +
                 static_cast<long long>(up_size) + ops / 64 + 1;
        if (evals > budget) throw BudgetExceeded("phi_mb: node budget exceeded");

        double norm_fact = 1.0;
        for (int d = 2; d <= dim; ++d) norm_fact *= d;
        const double norm = 1.0 / (norm_fact * std::pow(2.0 * kPi * hbar, dim));

        std::vector<cplx> out(up_size);
        std::vector<size_t> qi(static_cast<size_t>(dim));
        std::vector<size_t> ui(static_cast<size_t>(up_dim));
        for (size_t U = 0; U < up_size; ++U) {
            size_t rem = U;
            for (int d = 0; d < up_dim; ++d) {
                ui[static_cast<size_t>(d)] = upper_is_y ? static_cast<size_t>(d) : rem % M;
                rem /= M;
            }
            cplx acc{0.0, 0.0};
            for (size_t Q = 0; Q < q_size; ++Q) {
                size_t qr = Q;
                cplx term = J[Q];
                for (int d = 0; d < dim; ++d) {
                    qi[static_cast<size_t>(d)] = qr % M;
                    qr /= M;
                    term *= ph[qi[static_cast<size_t>(d)]];
                }
                if (dim >= 2) {
                    for (int a = 0; a < dim; ++a) {
                        for (int b = 0; b < dim; ++b) {
                            if (a != b) term *= invG[qi[static_cast<size_t>(b)] * M + qi[static_cast<size_t>(a)]];
                        }
                    }
                }
                for (int a = 0; a < dim; ++a) {
                    const size_t row = qi[static_cast<size_t>(a)] * upM;
                    for (int b = 0; b < up_dim; ++b) term *= G[row + ui[static_cast<size_t>(b)]];
                }
                acc += term;
            }
            out[U] = norm * acc;
        }
        J = std::move(out);
    }
    return J[0];
}

// Nested pyramidal Gauss-Givental integrand at a fixed dyadic step h.
// Inner variables run over the global lattice t = k h, windows taken from
// the neighbouring outer positions.
cplx gg_nested(std::span<const double> ys, std::span<const double> z, const ChainParams& P,
               double h, double L, long long& evals, long long budget)
{
    const size_t m = ys.size();
    if (m == 1) {
        ++evals;
        return std::exp(kI * ys[0] * z[0] / P.hbar);
    }
    if (m == 2) {
        // reduced pair integral around the midpoint
        const double halfu = 0.5 * (z[1] - z[0]);
        if (halfu > 345.0) return {0.0, 0.0};
        const double a = 2.0 / P.hbar * std::exp(halfu);
        if (a > 690.0) return {0.0, 0.0};
        const double nu = (ys[1] - ys[0]) / P.hbar;
        const double T = std::log(2.0 * std::max((L + 4.0) / a, 1.2)) + 1.5;
        const long long Jn = static_cast<long long>(std::ceil(T / h));
        evals += 2 * Jn + 1;
        if (evals > budget) throw BudgetExceeded("phi_gg: node budget exceeded");
        double sre = std::exp(-a);
        double sim = 0.0;
        for (long long j = 1; j <= Jn; ++j) {
            const double tau = static_cast<double>(j) * h;
            const double f = std::exp(-a * std::cosh(tau));
            sre += 2.0 * f * std::cos(nu * tau);
        }
        const cplx integral = h * cplx(sre, sim);
        const cplx phase = std::exp(kI * (ys[0] + ys[1]) * (z[0] + z[1]) / (2.0 * P.hbar));
        return phase * integral;
    }

    // windows per inner dimension from the neighbouring outer values
    const double D = std::log(P.hbar * (L + 4.0) > 2.0 ? P.hbar * (L + 4.0) : 2.0) + 4.0;
    const size_t dims = m - 1;
    std::vector<long long> klo(dims), khi(dims);
    size_t total = 1;
    for (size_t n = 0; n < dims; ++n) {
        const double A = z[n];
        const double B = z[n + 1];
        const double mid = 0.5 * (A + B);
        const double lo = std::min(B - D, mid - 2.0);
        const double hi = std::max(A + D, mid + 2.0);
        klo[n] = static_cast<long long>(std::ceil(lo / h));
        khi[n] = static_cast<long long>(std::floor(hi / h));
        total *= static_cast<size_t>(khi[n] - klo[n] + 1);
    }
    evals += static_cast<long long>(total);
    if (evals > budget) throw BudgetExceeded("phi_gg: node budget exceeded");

    std::vector<double> t(dims);
    std::vector<cplx> sums;
    sums.reserve(total);
    std::vector<long long> k(dims);
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        for (size_t n = 0; n < dims; ++n) {
            const size_t span = static_cast<size_t>(khi[n] - klo[n] + 1);
            k[n] = klo[n] + static_cast<long long>(rem % span);
            rem /= span;
            t[n] = static_cast<double>(k[n]) * h;
        }
        const cplx lam = lambda_kernel(cplx(ys[0], 0.0), z, t, P);
        if (std::abs(lam) < 1e-300) {
            sums.push_back({0.0, 0.0});
            continue;
        }
        sums.push_back(lam * gg_nested(ys.subspan(1), t, P, h, L, evals, budget));
    }
    const double hw = std::pow(h, static_cast<double>(dims));
    return hw * pairwise_sum(sums);
}

uint64_t mix_key(std::span<const long long> ks)
{
    uint64_t acc = 1469598103934665603ull;
    for (long long k : ks) {
        uint64_t v = static_cast<uint64_t>(k);
        acc = (acc ^ v) * 1099511628211ull;
        acc ^= acc >> 29;
    }
    return acc;
}

} // namespace

void Rapidities::validate() const
{
    params.validate();
    if (static_cast<int>(y.size()) != params.n) {
        throw DimensionMismatch("Rapidities: y length must equal params.n");
    }
    if (!all_finite(y)) throw PreconditionViolated("Rapidities: entries must be finite");
}

void Positions::validate() const
{
    if (!all_finite(x)) throw PreconditionViolated("Positions: entries must be finite");
}

cplx phi_base(double y, double x, const ChainParams& params)
{
    params.validate();
    return std::exp(kI * y * x / params.hbar);
}

QuadResult phi_mb(const Rapidities& y, const Positions& x, const ContourPlan& plan)
{
    y.validate();
    x.validate();
    const int N = y.n();
    if (x.n() != N) throw DimensionMismatch("phi_mb: y and x must have equal length");
    if (N > 4) throw PreconditionViolated("N exceeds supported maximum 4");
    if (N == 1) return {phi_base(y.y[0], x.x[0], y.params), 0.0, 1};

    MbSetup su;
    su.n = N;
    su.hbar = y.params.hbar;
    if (!plan.offsets.empty()) {
        if (static_cast<int>(plan.offsets.size()) != N - 1) {
            throw PreconditionViolated("phi_mb: plan.offsets must have N-1 entries");
        }
        plan.require_admissible_offsets();
        for (double a : plan.offsets) su.alphas.push_back(a * su.hbar);
    } else {
        for (int s = 1; s < N; ++s) su.alphas.push_back(s * su.hbar / 4.0);
    }
    for (int s = 1; s < N; ++s) {
        su.rshift.push_back(x.x[static_cast<size_t>(N - s - 1)] - x.x[static_cast<size_t>(N - s)]);
    }
    double ymax = 0.0, ysum = 0.0;
    for (double v : y.y) {
        ymax = std::max(ymax, std::abs(v));
        ysum += v;
    }
    const double L = std::max(std::log(1.0 / plan.tol), 2.0);
    su.window = plan.window_halfwidth ? *plan.window_halfwidth
                                      : ymax + 2.0 + su.hbar / kPi * L;
    // node density follows 1/hbar: the pole-peak width near the contour
    // scales with the lattice spacing hbar
    su.npu = std::max(2, static_cast<int>(std::ceil(plan.nodes_per_unit / su.hbar)));

    const cplx prefactor = std::exp(kI * ysum * x.x[static_cast<size_t>(N - 1)] / su.hbar);

    long long evals = 0;
    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();
    const int max_levels = N <= 2 ? 5 : 3;
    MbSetup s2 = su;
    for (int level = 0; level < max_levels; ++level) {
        s2.npu = su.npu << level;
        cplx val;
        try {
            val = mb_sweep(s2, y.y, evals, plan.max_evals);
        } catch (const BudgetExceeded&) {
            if (have_prev && delta <= 10.0 * plan.tol) break;
            throw;
        }
        if (have_prev) {
            delta = std::abs(val - prev);
            prev = val;
            if (delta <= plan.tol) return {prefactor * val, delta, evals};
        } else {
            prev = val;
            have_prev = true;
        }
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("phi_mb: refinements disagree beyond 10*tol");
    }
    return {prefactor * prev, delta, evals};
}

QuadResult phi_gg(const Rapidities& y, const Positions& x, const ContourPlan& plan)
{
    y.validate();
    x.validate();
    const int N = y.n();
    if (x.n() != N) throw DimensionMismatch("phi_gg: y and x must have equal length");
    if (N > 4) throw PreconditionViolated("N exceeds supported maximum 4");
    if (N == 1) return {phi_base(y.y[0], x.x[0], y.params), 0.0, 1};

    const double L = std::max(std::log(1.0 / plan.tol), 2.0);
    double h = std::min(0.5, 8.0 / std::max(16, plan.nodes_per_unit));
    long long evals = 0;
    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 6; ++level) {
        cplx val;
        try {
            val = gg_nested(y.y, x.x, y.params, h, L, evals, plan.max_evals);
        } catch (const BudgetExceeded&) {
            if (have_prev && delta <= 10.0 * plan.tol) break;
            throw;
        }
        if (have_prev) {
            delta = std::abs(val - prev);
            prev = val;
            if (delta <= plan.tol) return {val, delta, evals};
        } else {
            prev = val;
            have_prev = true;
        }
        h *= 0.5;
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("phi_gg: refinements disagree beyond 10*tol");
    }
    return {prev, delta, evals};
}

QuadResult phi_gg_recursive(const Rapidities& y, const Positions& x, const ContourPlan& plan)
{
    y.validate();
    x.validate();
    const int N = y.n();
    if (x.n() != N) throw DimensionMismatch("phi_gg_recursive: y and x must have equal length");
    if (N > 4) throw PreconditionViolated("N exceeds supported maximum 4");
    if (N == 1) return {phi_base(y.y[0], x.x[0], y.params), 0.0, 1};

    const ChainParams& P = y.params;
    const double L = std::max(std::log(1.0 / plan.tol), 2.0);
    const double D = std::log(std::max(P.hbar * (L + 4.0), 2.0)) + 4.0;
    const double inner_tol = std::max(plan.tol * 0.1, 1e-13);

    Rapidities yin{std::vector<double>(y.y.begin(), y.y.end() - 1), ChainParams{P.hbar, N - 1}};
    const cplx y_outer(y.y.back(), 0.0);

    const size_t dims = static_cast<size_t>(N - 1);
    std::vector<double> lo(dims), hi(dims);
    for (size_t n = 0; n < dims; ++n) {
        const double A = x.x[n];
        const double B = x.x[n + 1];
        const double mid = 0.5 * (A + B);
        lo[n] = std::min(B - D, mid - 2.0);
        hi[n] = std::max(A + D, mid + 2.0);
    }

    // Memoized inner values on the dyadic lattice: refining h to h/2 keeps
    // every previous node, so earlier levels' evaluations are reused.
    std::unordered_map<uint64_t, cplx> memo;
    constexpr int kMaxLevels = 6;
    const double h0 = 0.5;
    const double h_min = h0 / (1 << kMaxLevels);

    long long evals = 0;
    cplx prev{0.0, 0.0};
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();

    ContourPlan inner_plan = plan;
    inner_plan.tol = inner_tol;
    inner_plan.window_halfwidth.reset();

    for (int level = 0; level < kMaxLevels; ++level) {
        const double h = h0 / (1 << level);
        std::vector<long long> klo(dims), khi(dims);
        size_t total = 1;
        for (size_t n = 0; n < dims; ++n) {
            klo[n] = static_cast<long long>(std::ceil(lo[n] / h));
            khi[n] = static_cast<long long>(std::floor(hi[n] / h));
            total *= static_cast<size_t>(khi[n] - klo[n] + 1);
        }
        evals += static_cast<long long>(total);
        if (evals > plan.max_evals) {
            if (have_prev && delta <= 10.0 * plan.tol) break;
            throw BudgetExceeded("phi_gg_recursive: node budget exceeded");
        }

        std::vector<cplx> sums;
        sums.reserve(total);
        std::vector<double> t(dims);
        std::vector<long long> k(dims), keyv(dims);
        for (size_t flat = 0; flat < total; ++flat) {
            size_t rem = flat;
            for (size_t n = 0; n < dims; ++n) {
                const size_t span = static_cast<size_t>(khi[n] - klo[n] + 1);
                k[n] = klo[n] + static_cast<long long>(rem % span);
                rem /= span;
                t[n] = static_cast<double>(k[n]) * h;
                keyv[n] = static_cast<long long>(std::llround(t[n] / h_min));
            }
            const cplx lam = lambda_kernel(y_outer, x.x, t, P);
            if (std::abs(lam) < 1e-300) {
                sums.push_back({0.0, 0.0});
                continue;
            }
            const uint64_t key = mix_key(keyv);
            auto it = memo.find(key);
            cplx inner;
            if (it != memo.end()) {
                inner = it->second;
            } else {
                if (N == 2) {
                    inner = phi_base(yin.y[0], t[0], P);
                } else if (N == 3) {
                    inner = phi_n2(yin.y[0], yin.y[1], t[0], t[1], P, inner_tol);
                } else {
                    Positions tp{std::vector<double>(t.begin(), t.end())};
                    inner = phi_gg(yin, tp, inner_plan).value;
                }
                memo.emplace(key, inner);
            }
            sums.push_back(lam * inner);
        }
        const double hw = std::pow(h, static_cast<double>(dims));
        const cplx val = hw * pairwise_sum(sums);
        if (have_prev) {
            delta = std::abs(val - prev);
            prev = val;
            if (delta <= plan.tol) return {val, delta, evals};
        } else {
            prev = val;
            have_prev = true;
        }
    }
    if (delta > 10.0 * plan.tol) {
        throw NonConvergence("phi_gg_recursive: refinements disagree beyond 10*tol");
    }
    return {prev, delta, evals};
}

std::vector<RSequence> enumerate_r_sequences(std::span<const double> r)
{
    const int N = static_cast<int>(r.size()) + 1;
    if (N < 2) throw PreconditionViolated("enumerate_r_sequences: need at least one difference");
    // generic-case guard: every contiguous partial sum must be nonzero
    for (size_t b = 0; b < r.size(); ++b) {
        double sum = 0.0;
        for (size_t a = b; a < r.size(); ++a) {
            sum += r[a];
            if (std::abs(sum) <= 1e-12) {
                throw DegenerateInput("enumerate_r_sequences: vanishing contiguous partial sum");
            }
        }
    }

    // Per-variable branch lists; variable a lives on levels s = N-a .. 1
    // plus the forced level 0.  The carry holds the contiguous sum
    // accumulated through the current run of zero picks.
    struct VarChoice {
        std::vector<double> levels; // R_{a,s} for s = N-a .. 1 (descending s)
        double r0 = 0.0;            // R_{a,0}
    };
    std::vector<std::vector<VarChoice>> per_var(static_cast<size_t>(N - 1));
    for (int a = 1; a <= N - 1; ++a) {
        std::vector<VarChoice> done;
        struct State {
            std::vector<double> levels;
            double carry;
            int s;
        };
        std::vector<State> stack{{{}, 0.0, N - a}};
        while (!stack.empty()) {
            State st = std::move(stack.back());
            stack.pop_back();
            if (st.s == 0) {
                done.push_back({std::move(st.levels), st.carry});
                continue;
            }
            const double total = st.carry + r[static_cast<size_t>(st.s - 1)];
            if (total <= 0.0) {
                State next{st.levels, 0.0, st.s - 1};
                next.levels.push_back(total);
                stack.push_back(std::move(next));
            } else {
                State take{st.levels, 0.0, st.s - 1};
                take.levels.push_back(total);
                stack.push_back(std::move(take));
                State zero{std::move(st.levels), total, st.s - 1};
                zero.levels.push_back(0.0);
                stack.push_back(std::move(zero));
            }
        }
        per_var[static_cast<size_t>(a - 1)] = std::move(done);
    }

    size_t count = 1;
    for (const auto& v : per_var) {
        count *= v.size();
        if (count > 1000000) throw BudgetExceeded("enumerate_r_sequences: too many sequences");
    }

    std::vector<RSequence> out;
    out.reserve(count);
    std::vector<size_t> pick(per_var.size(), 0);
    for (size_t c = 0; c < count; ++c) {
        size_t rem = c;
        for (size_t a = 0; a < per_var.size(); ++a) {
            pick[a] = rem % per_var[a].size();
            rem /= per_var[a].size();
        }
        RSequence seq;
        seq.r.assign(r.begin(), r.end());
        seq.entries.resize(static_cast<size_t>(N));
        for (int s = 0; s <= N - 1; ++s) seq.entries[static_cast<size_t>(s)].assign(static_cast<size_t>(N - s), 0.0);
        for (int a = 1; a <= N - 1; ++a) {
            const VarChoice& vc = per_var[static_cast<size_t>(a - 1)][pick[static_cast<size_t>(a - 1)]];
            for (int s = N - a; s >= 1; --s) {
                seq.entries[static_cast<size_t>(s)][static_cast<size_t>(a - 1)] =
                    vc.levels[static_cast<size_t>(N - a - s)];
            }
            seq.entries[0][static_cast<size_t>(a - 1)] = vc.r0;
        }
        seq.entries[0][static_cast<size_t>(N - 1)] = 0.0; // R_{N,0}
        out.push_back(std::move(seq));
    }
    return out;
}

bool RSequence::check_invariants(double tol) const
{
    const int N = static_cast<int>(entries.empty() ? 0 : entries[0].size());
    if (N < 1) return false;
    if (static_cast<int>(r.size()) != N - 1) return false;
    for (int s = 0; s <= N - 1; ++s) {
        if (static_cast<int>(entries[static_cast<size_t>(s)].size()) != N - s) return false;
    }
    for (int a = 1; a <= N - 1; ++a) {
        bool any_nonzero = false;
        for (int s = 0; s <= N - a; ++s) {
            if (std::abs(R(a, s)) > tol) any_nonzero = true;
        }
        if (!any_nonzero) return false;
    }
    // every nonzero entry is a contiguous partial sum r_k + ... + r_s
    for (int s = 0; s <= N - 1; ++s) {
        for (int a = 1; a <= N - s; ++a) {
            const double v = R(a, s);
            if (std::abs(v) <= tol) continue;
            const int lowest = std::max(s, 1);
            double sum = 0.0;
            bool match = false;
            for (int k = lowest; k <= N - 1; ++k) {
                sum += r[static_cast<size_t>(k - 1)];
                if (std::abs(v - sum) <= tol) {
                    match = true;
                    break;
                }
            }
            if (!match) return false;
        }
    }
    return true;
}

double decay_envelope(const Positions& x, const ChainParams& params)
{
    return std::exp(log_decay_envelope(x, params));
}

double log_decay_envelope(const Positions& x, const ChainParams& params)
{
    params.validate();
    x.validate();
    double sum = 0.0;
    for (size_t n = 0; n + 1 < x.x.size(); ++n) {
        sum += std::exp(0.5 * (x.x[n + 1] - x.x[n]));
    }
    return -sum / params.hbar;
}

QuadResult cosh_fourier(double a, double nu, double tol)
{
    if (!(a > 0.0)) throw PreconditionViolated("cosh_fourier: need a > 0");
    if (a > 690.0) return {cplx(0.0, 0.0), 1e-300, 0};
    const double anu = std::abs(nu);
    if (anu > 200.0) return {cplx(0.0, 0.0), 1e-300, 0};
    if (anu >= 6.0 && a <= 14.0) {
        // Trapezoid summands are O(e^-a) but the value is O(e^{-pi nu/2});
        // past the cancellation floor switch to the ascending series, which
        // carries relative accuracy: 2 K_{i nu}(a) = 2 pi Im I_{-i nu}(a) / sinh(pi nu).
        const cplx mu(0.0, -anu);
        const LogComplex lg = log_gamma(1.0 + mu);
        cplx term = std::exp(cplx(-lg.log_mod, -lg.phase));
        cplx sum = term;
        const double q = 0.25 * a * a;
        long long used = 1;
        for (int k = 0; k < 80; ++k) {
            term *= q / ((k + 1.0) * (cplx(k + 1.0, 0.0) + mu));
            sum += term;
            ++used;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        const cplx I = std::exp(mu * std::log(0.5 * a)) * sum;
        const double value = 2.0 * kPi * I.imag() / std::sinh(kPi * anu);
        return {cplx(value, 0.0), std::abs(value) * 1e-12 + 1e-300, used};
    }
    const double L = std::max(std::log(1.0 / tol), 2.0) + 3.0;
    const double T = std::log(2.0 * std::max(L / a, 1.2)) + 1.5;
    double h = std::min(0.5, kPi * kPi / (L + std::abs(nu) * kPi / 2.0 + 5.0));

    long long used = 0;
    double prev = 0.0;
    bool have_prev = false;
    double delta = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 10; ++round) {
        const long long J = static_cast<long long>(std::ceil(T / h));
        double s = std::exp(-a);
        for (long long j = 1; j <= J; ++j) {
            const double tau = static_cast<double>(j) * h;
            s += 2.0 * std::exp(-a * std::cosh(tau)) * std::cos(nu * tau);
        }
        used += 2 * J + 1;
        const double val = h * s;
        if (have_prev) {
            delta = std::abs(val - prev);
            prev = val;
            if (delta <= tol) return {cplx(val, 0.0), delta, used};
        } else {
            prev = val;
            have_prev = true;
        }
        h *= 0.5;
    }
    if (delta > 10.0 * tol) throw NonConvergence("cosh_fourier: refinements disagree");
    return {cplx(prev, 0.0), delta, used};
}

cplx phi_n2(double y1, double y2, double x1, double x2, const ChainParams& params, double tol)
{
    params.validate();
    const double half = 0.5 * (x2 - x1);
    if (half > 345.0) return {0.0, 0.0};
    const double a = 2.0 / params.hbar * std::exp(half);
    const double nu = (y2 - y1) / params.hbar;
    const cplx phase = std::exp(kI * (y1 + y2) * (x1 + x2) / (2.0 * params.hbar));
    return phase * cosh_fourier(a, nu, tol).value;
}

} // namespace toda
