// Command-line surface: evaluate phi, run identity suites, scan grids.
// JSON goes to stdout (one object per line for suites); diagnostics to stderr.
// Exit codes: 0 ok / all pass, 1 identity failure, 2 flag errors, 3 NonConvergence.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "toda/identities.hpp"

using nlohmann::json;

namespace {

json report_to_json(const toda::IdentityReport& r)
{
    return json{{"name", r.name},
                {"lhs_re", r.lhs.real()},
                {"lhs_im", r.lhs.imag()},
                {"rhs_re", r.rhs.real()},
                {"rhs_im", r.rhs.imag()},
                {"abs_residual", r.abs_residual},
                {"rel_residual", std::isfinite(r.rel_residual) ? r.rel_residual : -1.0},
                {"pass", r.pass},
                {"tol", r.tol},
                {"nodes", r.nodes},
                {"seconds", r.seconds},
                {"tail_bound", r.tail_bound}};
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

long long env_budget()
{
    if (const char* b = std::getenv("TODA_SOV_BUDGET")) {
        try {
            return std::stoll(b);
        } catch (...) {
            std::cerr << "warning: ignoring malformed TODA_SOV_BUDGET\n";
        }
    }
    return 20'000'000;
}

struct EvalArgs {
    int n = 1;
    std::string y, x;
    double hbar = 1.0;
    std::string method = "gg";
    double tol = 0.0; // 0 = default by N
    int workers = 1;
};

int cmd_eval(const EvalArgs& a)
{
    if (a.n < 1) {
        std::cerr << "error: --n must be >= 1\n";
        return 2;
    }
    if (a.n > 4) {
        std::cerr << "error: N exceeds supported maximum 4\n";
        return 2;
    }
    if (a.method != "mb" && a.method != "gg" && a.method != "gg_recursive") {
        std::cerr << "error: --method must be mb, gg or gg_recursive\n";
        return 2;
    }
    std::vector<double> yv, xv;
    try {
        yv = parse_list(a.y);
        xv = parse_list(a.x);
    } catch (...) {
        std::cerr << "error: could not parse --y/--x lists\n";
        return 2;
    }
    if (static_cast<int>(yv.size()) != a.n || static_cast<int>(xv.size()) != a.n) {
        std::cerr << "error: --y and --x must have exactly n entries\n";
        return 2;
    }
    toda::set_worker_count(a.workers);
    toda::Rapidities y{yv, toda::ChainParams{a.hbar, a.n}};
    toda::Positions x{xv};
    toda::ContourPlan plan;
    plan.tol = a.tol > 0.0 ? a.tol : (a.n <= 2 ? 1e-8 : 1e-5);
    plan.max_evals = env_budget();
    const auto t0 = std::chrono::steady_clock::now();
    toda::QuadResult q;
    try {
        if (a.method == "mb") {
            q = toda::phi_mb(y, x, plan);
        } else if (a.method == "gg") {
            q = toda::phi_gg(y, x, plan);
        } else {
            q = toda::phi_gg_recursive(y, x, plan);
        }
    } catch (const toda::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const toda::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const toda::SovError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json rec{{"n", a.n},
             {"y", yv},
             {"x", xv},
             {"hbar", a.hbar},
             {"method", a.method},
             {"value_re", q.value.real()},
             {"value_im", q.value.imag()},
             {"abs_err_est", q.abs_err_est},
             {"nodes", q.nodes_used},
             {"seconds", secs}};
    std::cout << rec.dump() << "\n";
    return 0;
}

struct VerifyArgs {
    std::string identity = "all";
    unsigned long long seed = 42;
    int cases = 10;
    double tol = 1e-6;
    double box = 1.0;
    int workers = 1;
};

int cmd_verify(const VerifyArgs& a)
{
    const auto& names = toda::kIdentityNames;
    if (a.identity != "all" &&
        std::find(names.begin(), names.end(), a.identity) == names.end()) {
        std::cerr << "error: unknown identity '" << a.identity << "'\n";
        return 2;
    }
    toda::set_worker_count(a.workers);
    toda::CaseSpec spec;
    spec.seed = a.seed;
    spec.n_cases = a.cases;
    spec.tol = a.tol;
    spec.box = a.box;
    std::vector<toda::IdentityReport> reports;
    try {
        reports = a.identity == "all" ? toda::run_suite(spec)
                                      : toda::run_identity(a.identity, spec);
    } catch (const toda::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const toda::SovError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    bool all_pass = true;
    for (const auto& r : reports) {
        std::cout << report_to_json(r).dump() << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

struct ScanArgs {
    int n = 2;
    std::string y, x;
    double hbar = 1.0;
    std::string method = "gg";
    double tol = 0.0;
    std::string axis;
    std::string range;
    std::string out;
    int workers = 1;
};

int cmd_scan(const ScanArgs& a)
{
    if (a.n < 1 || a.n > 4) {
        std::cerr << "error: --n must be 1..4\n";
        return 2;
    }
    if (a.axis.size() < 3 || (a.axis[0] != 'x' && a.axis[0] != 'y') || a.axis[1] != '_') {
        std::cerr << "error: --axis must look like x_1 or y_2\n";
        return 2;
    }
    int axis_idx = 0;
    try {
        axis_idx = std::stoi(a.axis.substr(2));
    } catch (...) {
        std::cerr << "error: malformed --axis index\n";
        return 2;
    }
    if (axis_idx < 1 || axis_idx > a.n) {
        std::cerr << "error: --axis index out of range\n";
        return 2;
    }
    double lo = 0.0, hi = 0.0;
    long steps = 0;
    {
        const size_t c1 = a.range.find(':');
        const size_t c2 = c1 == std::string::npos ? std::string::npos : a.range.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            std::cerr << "error: --range must be a:b:steps\n";
            return 2;
        }
        try {
            lo = std::stod(a.range.substr(0, c1));
            hi = std::stod(a.range.substr(c1 + 1, c2 - c1 - 1));
            steps = std::stol(a.range.substr(c2 + 1));
        } catch (...) {
            std::cerr << "error: malformed --range\n";
            return 2;
        }
        if (steps < 1) {
            std::cerr << "error: --range needs steps >= 1\n";
            return 2;
        }
    }
    std::vector<double> yv, xv;
    try {
        yv = parse_list(a.y);
        xv = parse_list(a.x);
    } catch (...) {
        std::cerr << "error: could not parse --y/--x lists\n";
        return 2;
    }
    if (static_cast<int>(yv.size()) != a.n || static_cast<int>(xv.size()) != a.n) {
        std::cerr << "error: --y and --x must have exactly n entries\n";
        return 2;
    }
    toda::set_worker_count(a.workers);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) {
            std::cerr << "error: cannot open --out file\n";
            return 2;
        }
        os = &file;
    }
    os->precision(17);
    *os << "n,hbar,method,axis,value,value_re,value_im,abs_err_est\n";

    toda::ContourPlan plan;
    plan.tol = a.tol > 0.0 ? a.tol : (a.n <= 2 ? 1e-8 : 1e-5);
    plan.max_evals = env_budget();
    for (long k = 0; k < steps; ++k) {
        const double t = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
        std::vector<double> yy = yv, xx = xv;
        if (a.axis[0] == 'x') {
            xx[static_cast<size_t>(axis_idx - 1)] = t;
        } else {
            yy[static_cast<size_t>(axis_idx - 1)] = t;
        }
        toda::Rapidities y{yy, toda::ChainParams{a.hbar, a.n}};
        toda::Positions x{xx};
        toda::QuadResult q;
        try {
            if (a.method == "mb") {
                q = toda::phi_mb(y, x, plan);
            } else if (a.method == "gg_recursive") {
                q = toda::phi_gg_recursive(y, x, plan);
            } else {
                q = toda::phi_gg(y, x, plan);
            }
        } catch (const toda::NonConvergence& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
        *os << a.n << ',' << a.hbar << ',' << a.method << ',' << t << ',' << std::abs(q.value)
            << ',' << q.value.real() << ',' << q.value.imag() << ',' << q.abs_err_est << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical evaluators and identity checks for the open Toda chain SoV kernel"};
    app.require_subcommand(1);

    EvalArgs ea;
    CLI::App* eval = app.add_subcommand("eval", "evaluate phi at one point, JSON to stdout");
    eval->add_option("--n", ea.n, "number of particles (1..4)");
    eval->add_option("--y", ea.y, "comma list of rapidities");
    eval->add_option("--x", ea.x, "comma list of positions");
    eval->add_option("--hbar", ea.hbar, "chain parameter hbar");
    eval->add_option("--method", ea.method, "mb | gg | gg_recursive");
    eval->add_option("--tol", ea.tol, "target absolute error");
    eval->add_option("--workers", ea.workers, "worker cap");

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "run identity checks, one JSON per case");
    verify->add_option("--identity", va.identity, "identity name or 'all'");
    verify->add_option("--seed", va.seed, "random seed");
    verify->add_option("--cases", va.cases, "cases per identity");
    verify->add_option("--tol", va.tol, "relative residual tolerance");
    verify->add_option("--box", va.box, "sampling half-width");
    verify->add_option("--workers", va.workers, "worker cap");

    ScanArgs sa;
    CLI::App* scan = app.add_subcommand("scan", "scan phi along one axis, CSV output");
    scan->add_option("--n", sa.n, "number of particles");
    scan->add_option("--y", sa.y, "comma list of rapidities");
    scan->add_option("--x", sa.x, "comma list of positions");
    scan->add_option("--hbar", sa.hbar, "chain parameter hbar");
    scan->add_option("--method", sa.method, "mb | gg | gg_recursive");
    scan->add_option("--tol", sa.tol, "target absolute error");
    scan->add_option("--axis", sa.axis, "axis to scan, e.g. x_2 or y_1");
    scan->add_option("--range", sa.range, "a:b:steps");
    scan->add_option("--out", sa.out, "CSV output file (default stdout)");
    scan->add_option("--workers", sa.workers, "worker cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(ea);
        if (verify->parsed()) return cmd_verify(va);
        if (scan->parsed()) return cmd_scan(sa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
