#include <doctest.h>

#include <cmath>

#include "toda/identities.hpp"

using namespace toda;

namespace {
const ChainParams P1{1.0, 1};

ContourPlan plan_at(double tol)
{
    ContourPlan p;
    p.tol = tol;
    return p;
}
} // namespace

TEST_CASE("four_v exchange")
{
    // identical spectral parameters: integrands coincide exactly
    const IdentityReport r0 = verify_four_v(0.2, -0.3, 0.4, 0.1, 1.3, 1.3, P1, plan_at(1e-12));
    CHECK(r0.rel_residual < 1e-12);

    const IdentityReport r1 = verify_four_v(0.0, 0.0, 0.0, 0.0, 1.0, -1.0, P1, plan_at(1e-12));
    CHECK(r1.rel_residual < 1e-9);

    // x_p = x'_p, x_{p+1} = x'_{p+1}
    const IdentityReport r2 = verify_four_v(0.5, -0.2, 0.5, -0.2, 0.7, -1.1, P1, plan_at(1e-12));
    CHECK(r2.rel_residual < 1e-9);

    const IdentityReport r3 = verify_four_v(0.3, -0.2, 0.5, 0.1, 0.8, -1.3, P1, plan_at(1e-12));
    CHECK(r3.rel_residual < 1e-9);
}

TEST_CASE("lambda exchange at N=2")
{
    const double tau[1] = {0.0}, taup[1] = {0.0};
    const IdentityReport r1 =
        verify_lambda_exchange(0.4, -0.3, 0.3, 0.3, tau, taup, P1, plan_at(1e-9));
    CHECK(r1.rel_residual < 1e-6);

    // y = y' keeps the Gamma prefactors finite and the identity exact
    const double tau2[1] = {0.4}, taup2[1] = {-0.6};
    const IdentityReport r2 =
        verify_lambda_exchange(0.4, 0.4, 0.3, 0.3, tau2, taup2, P1, plan_at(1e-9));
    CHECK(r2.rel_residual < 1e-6);

    // swapped-data identity: (y, eps1) <-> (y', epsN) with tau <-> tau'
    const IdentityReport r3 =
        verify_lambda_exchange(-0.3, 0.4, 0.3, 0.3, taup2, tau2, P1, plan_at(1e-9));
    CHECK(r3.rel_residual < 1e-6);

    CHECK_THROWS_AS(verify_lambda_exchange(0.4, 0.1, -0.1, 0.3, tau, taup, P1, plan_at(1e-9)),
                    PreconditionViolated);
}

TEST_CASE("lambda exchange at N=3" * doctest::timeout(300))
{
    ContourPlan p = plan_at(1e-6);
    p.nodes_per_unit = 4;
    p.max_evals = 400'000'000;
    const double tau[2] = {0.2, -0.3}, taup[2] = {-0.1, 0.4};
    const IdentityReport r = verify_lambda_exchange(0.4, -0.3, 0.3, 0.3, tau, taup, P1, p);
    CHECK(r.rel_residual < 1e-5);
}

TEST_CASE("lambda commutation")
{
    const double x2[2] = {0.2, -0.1};
    const IdentityReport same = verify_lambda_commutation(0.8, 0.8, x2, {}, P1, plan_at(1e-12));
    CHECK(same.rel_residual < 1e-12);

    const IdentityReport r2 = verify_lambda_commutation(0.8, -0.5, x2, {}, P1, plan_at(1e-10));
    CHECK(r2.rel_residual < 1e-7);

    const double x3[3] = {0.3, -0.2, 0.1};
    const double xp[1] = {0.25};
    ContourPlan p3 = plan_at(1e-7);
    p3.nodes_per_unit = 6;
    const IdentityReport r3 = verify_lambda_commutation(0.7, -0.4, x3, xp, P1, p3);
    CHECK(r3.rel_residual < 1e-5);
}

TEST_CASE("L-Lambda exchange at N=3")
{
    const double x[2] = {0.1, -0.3};
    const double z[1] = {0.2};
    const IdentityReport r1 =
        verify_l_lambda_exchange({0.5, 0.4}, {-0.2, 0.0}, x, z, P1, plan_at(1e-9));
    CHECK(r1.rel_residual < 1e-6);

    // wide imaginary separation keeps the Gamma factor well conditioned
    const IdentityReport r2 =
        verify_l_lambda_exchange({0.5, 2.0}, {-0.2, 0.0}, x, z, P1, plan_at(1e-9));
    CHECK(r2.rel_residual < 1e-7);

    CHECK_THROWS_AS(verify_l_lambda_exchange({0.5, 0.1}, {-0.2, 0.1}, x, z, P1, plan_at(1e-9)),
                    PreconditionViolated);
}

TEST_CASE("Gustafson integral")
{
    // n=1, s=0: the right side reduces to e^{s y/(i hbar)} e^{-1}
    const std::vector<cplx> y{{0.3, 0.5}};
    const IdentityReport r1 = verify_gustafson(1, y, {}, 0.0, P1, plan_at(1e-11));
    CHECK(r1.rel_residual < 1e-8);
    CHECK(std::abs(std::abs(r1.rhs) - std::exp(-1.0)) < 1e-12);

    // n=1, s=-3 against the frozen reference of the closed form
    const std::vector<cplx> y2{{0.4, 0.8}};
    const IdentityReport r2 = verify_gustafson(1, y2, {}, -3.0, P1, plan_at(1e-11));
    CHECK(r2.rel_residual < 1e-8);
    CHECK(r2.rhs.real() == doctest::Approx(0.0312758091297644757).epsilon(1e-12));
    CHECK(r2.rhs.imag() == doctest::Approx(0.0804461231864368315).epsilon(1e-12));

    // n=2
    const std::vector<cplx> yy{{0.3, 0.6}, {-0.4, 0.8}};
    const std::vector<cplx> xx{{0.1, -0.7}};
    const IdentityReport r3 = verify_gustafson(2, yy, xx, 0.0, P1, plan_at(1e-9));
    CHECK(r3.rel_residual < 1e-6);

    // imaginary parts must separate across the real axis
    const std::vector<cplx> ybad{{0.3, -0.5}};
    CHECK_THROWS_AS(verify_gustafson(1, ybad, {}, 0.0, P1, plan_at(1e-9)),
                    PreconditionViolated);
}

TEST_CASE("mb_gg batch comparison")
{
    CaseSpec spec;
    spec.seed = 42;
    spec.n_cases = 3;
    spec.tol = 1e-6;
    const auto reports = verify_mb_gg(spec, 2, P1);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) {
        CHECK(r.rel_residual < 1e-6);
        CHECK(r.pass);
    }
}

TEST_CASE("eigenfunction ratio is constant and equals sum(y^2)/2")
{
    // N = 1: plane wave, analytic
    {
        Rapidities y{{0.7}, P1};
        Positions x{{0.3}};
        const IdentityReport r = verify_eigenfunction(y, x, 1e-2, plan_at(1e-6));
        CHECK(std::abs(r.lhs - cplx(0.245, 0.0)) < 1e-8);
        CHECK(r.rel_residual < 1e-8);
    }
    // N = 2
    {
        Rapidities y{{0.5, -0.5}, ChainParams{1.0, 2}};
        Positions x{{0.0, 0.0}};
        const IdentityReport r = verify_eigenfunction(y, x, 1e-2, plan_at(1e-4));
        CHECK(r.rel_residual < 1e-4); // constancy across probes
        CHECK(std::abs(r.lhs - cplx(0.25, 0.0)) < 1e-4); // (y1^2+y2^2)/2
    }
}

TEST_CASE("residual shrinks under node-budget doubling on a fixed case")
{
    // a deliberately coarse run, then the same case at doubled density:
    // quadrature error, unlike a genuine identity violation, must go down
    const double tau[1] = {0.3}, taup[1] = {-0.2};
    ContourPlan coarse = plan_at(1e-4);
    coarse.nodes_per_unit = 2;
    const auto r1 = verify_lambda_exchange(0.6, -0.2, 0.3, 0.3, tau, taup, P1, coarse);
    ContourPlan fine = coarse;
    fine.nodes_per_unit = 4;
    fine.tol = 1e-8;
    const auto r2 = verify_lambda_exchange(0.6, -0.2, 0.3, 0.3, tau, taup, P1, fine);
    CHECK(r2.rel_residual <= 2.0 * r1.rel_residual + 1e-13);
    CHECK(r2.rel_residual < 1e-6);
}

TEST_CASE("lambda exchange residual is translation invariant")
{
    const double c = 0.8;
    const double tau[1] = {0.1}, taup[1] = {-0.4};
    const double tauc[1] = {0.1 + c}, taupc[1] = {-0.4 + c};
    const auto base = verify_lambda_exchange(0.5, -0.1, 0.3, 0.3, tau, taup, P1, plan_at(1e-9));
    const auto moved =
        verify_lambda_exchange(0.5, -0.1, 0.3, 0.3, tauc, taupc, P1, plan_at(1e-9));
    CHECK(base.rel_residual < 1e-6);
    CHECK(moved.rel_residual < 1e-6);
    CHECK(std::abs(base.rel_residual - moved.rel_residual) < 1e-6);
}

TEST_CASE("run_identity contract")
{
    CaseSpec spec;
    spec.n_cases = 0;
    CHECK(run_identity("four_v", spec).empty());
    spec.n_cases = 2;
    CHECK_THROWS_AS(run_identity("not_an_identity", spec), PreconditionViolated);

    const auto a = run_identity("four_v", spec);
    const auto b = run_identity("four_v", spec);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].lhs.real() == b[i].lhs.real()); // deterministic given the seed
        CHECK(a[i].pass);
    }
}

TEST_CASE("r_sequences identity cases pass")
{
    CaseSpec spec;
    spec.n_cases = 4;
    const auto reports = run_identity("r_sequences", spec);
    for (const auto& r : reports) CHECK(r.pass);
}
