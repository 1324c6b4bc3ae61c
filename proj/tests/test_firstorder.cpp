#include <doctest.h>

#include <cmath>

#include "lcpg/firstorder.hpp"
#include "lcpg/ipm.hpp"
#include "test_oracles.hpp"

using namespace lcpg;
using lcpg::testing::as_subproblem;
using lcpg::testing::random_diag_qcqp;

TEST_CASE("dual_bound_Bk") {
    Vector delta = Vector::Constant(2, 0.5);
    CHECK(dual_bound_Bk(5.0, 1.0, delta) == doctest::Approx(8.0));
    CHECK(dual_bound_Bk(1.0, 1.0, delta) == 0.0);
    CHECK(dual_bound_Bk(5.0, 1.0, Vector(0.5 * delta)) == doctest::Approx(16.0));  // homogeneity
    CHECK_THROWS_AS(dual_bound_Bk(5.0, 1.0, Vector(Vector::Zero(2))), StructuralError);
}

TEST_CASE("pd_solve without constraints is a closed-form prox step") {
    MajorizedSubproblem sub;
    sub.anchor = (Vector(3) << 1.0, -2.0, 0.0).finished();
    sub.linear = (Vector(3) << 0.5, 0.5, -3.0).finished();
    sub.gamma = 2.0;
    PdResult r = pd_solve(sub, 1.0, 0.0);
    CHECK(r.iterations == 1);
    CHECK(r.certified);
    CHECK(r.cert.objective_gap_bound <= 1e-12);
    CHECK(r.cert.feasibility_norm == 0.0);
    CHECK(r.cert.lagrangian_gap_bound <= 1e-12);
    CHECK((r.x - (sub.anchor - sub.linear / sub.gamma)).norm() <= 1e-15);
    // with an l1 term the exact answer is the soft threshold
    sub.chi0 = ProxTerm::l1(0.8);
    PdResult rl = pd_solve(sub, 1.0, 0.0);
    CHECK((rl.x - soft_threshold(Vector(sub.anchor - sub.linear / sub.gamma), 0.4)).norm() <= 1e-15);
}

TEST_CASE("pd_solve matches the interior point method") {
    SUBCASE("anchored 1-d instance") {
        DiagQcqp q;
        q.L0 = 1.0;
        q.a0 = Vector::Constant(1, 2.0);
        q.constraints.push_back({1.0, Vector::Zero(1), 0.5});
        PathFollowingResult ipm = solve_path_following(q, Vector::Zero(1), 0.4, 1e-10);
        PdResult pd = pd_solve(as_subproblem(q), 100.0, 1e-6);
        CHECK(pd.certified);
        CHECK((pd.x - ipm.x).norm() <= 1e-5);
        CHECK(pd.lambda[0] == doctest::Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("random d=10 m=3 instances") {
        Rng rng(41);
        for (int t = 0; t < 10; ++t) {
            DiagQcqp q = random_diag_qcqp(10, 3, rng);
            const double eps = 1e-6;
            PdResult pd = pd_solve(as_subproblem(q), 1e4, eps);
            CHECK(pd.certified);
            PathFollowingResult ipm = solve_path_following(q, Vector::Zero(10), 0.25, 1e-9);
            CHECK(q.objective(pd.x) <= q.objective(ipm.x) + eps);
            CHECK((pd.x - ipm.x).norm() <= 1e-5);
        }
    }
}

TEST_CASE("certificates") {
    Rng rng(3);
    DiagQcqp q = random_diag_qcqp(6, 2, rng);
    MajorizedSubproblem sub = as_subproblem(q);
    ExactSolveResult ex = solve_exact(sub);

    SUBCASE("exact optimal pairs certify at any eps") {
        Certificate c = certificate_check(sub, ex.x, ex.lambda_canonical, 0.0);
        CHECK(c.objective_gap_bound <= 1e-10);
        CHECK(c.feasibility_norm <= 1e-12);
        CHECK(c.lagrangian_gap_bound <= 1e-10);
        Certificate loose = certificate_check(sub, ex.x, ex.lambda_canonical, 1e-10);
        CHECK(loose.pass);
    }
    SUBCASE("feasibility violations fail the certificate") {
        const double eps = 1e-3;
        Index active = 0;
        for (Index i = 0; i < q.m(); ++i)
            if (ex.lambda[i] > 1e-8) active = i;
        // push the point outward to a constraint violation of exactly 2 eps
        const auto& c = q.constraints[static_cast<size_t>(active)];
        Vector dir = (ex.x - c.a).normalized();
        const double r0 = (ex.x - c.a).norm();
        const double target = std::sqrt(r0 * r0 + 2.0 * (2.0 * eps) / c.L);
        Vector bad = c.a + target * dir;
        Certificate cert = certificate_check(sub, bad, ex.lambda_canonical, eps);
        CHECK(cert.feasibility_norm >= 2.0 * eps - 1e-9);
        CHECK_FALSE(cert.pass);
    }
    SUBCASE("prox-step perturbation sits on the pass boundary") {
        MajorizedSubproblem plain;
        plain.anchor = Vector::Zero(4);
        plain.linear = (Vector(4) << 1.0, -1.0, 0.5, 0.0).finished();
        plain.gamma = 1.7;
        Vector xstar = plain.anchor - plain.linear / plain.gamma;
        const double eps = 1e-4;
        Vector dir = Vector::Zero(4);
        dir[0] = 1.0;
        const double t = std::sqrt(2.0 * eps / plain.gamma);
        Certificate at = certificate_check(plain, Vector(xstar + t * dir), Vector(), eps);
        CHECK(at.objective_gap_bound == doctest::Approx(eps).epsilon(1e-9));
        Certificate above = certificate_check(plain, Vector(xstar + 1.5 * t * dir), Vector(), eps);
        CHECK_FALSE(above.pass);
        Certificate below = certificate_check(plain, Vector(xstar + 0.5 * t * dir), Vector(), eps);
        CHECK(below.pass);
    }
    SUBCASE("monotone in eps") {
        Certificate c1 = certificate_check(sub, ex.x, ex.lambda_canonical, 1e-9);
        Certificate c2 = certificate_check(sub, ex.x, ex.lambda_canonical, 1e-3);
        CHECK((c1.pass ? 1 : 0) <= (c2.pass ? 1 : 0));
    }
}

TEST_CASE("certified outputs satisfy the three inequalities against references") {
    Rng rng(55);
    for (int t = 0; t < 10; ++t) {
        DiagQcqp q = random_diag_qcqp(8, 3, rng);
        MajorizedSubproblem sub = as_subproblem(q);
        const double eps = 1e-5;
        PdResult pd = pd_solve(sub, 1e4, eps);
        REQUIRE(pd.certified);
        ExactSolveResult ref = solve_exact(sub);
        CanonicalSubproblem canon = canonicalize(sub);
        // the three conditions against the reference pair (slack 1e-8)
        CHECK(canon.objective(pd.x) - canon.objective(ref.x) <= eps + 1e-8);
        CHECK(pd.cert.feasibility_norm <= eps + 1e-8);
        CHECK(canon.lagrangian(pd.x, ref.lambda_canonical) -
                  canon.lagrangian(ref.x, ref.lambda_canonical) <=
              eps + 1e-8);
        // dual feasibility
        CHECK(pd.lambda.minCoeff() >= 0.0);
        CHECK(pd.lambda_canonical.norm() <= 1e4 + 1e-12);
    }
}

TEST_CASE("solve_exact reaches machine KKT residuals") {
    Rng rng(19);
    SUBCASE("plain quadratic constraints") {
        for (int t = 0; t < 10; ++t) {
            DiagQcqp q = random_diag_qcqp(12, 4, rng);
            ExactSolveResult ex = solve_exact(as_subproblem(q));
            CHECK(ex.kkt_residual <= 1e-10);
            for (Index i = 0; i < q.m(); ++i) {
                const double slack = -q.constraint_value(i, ex.x);
                CHECK(slack >= -1e-12);
                CHECK(ex.lambda[i] * slack <= 1e-9);  // complementarity
            }
            // stationarity by hand
            Vector r = q.L0 * (ex.x - q.a0);
            for (Index i = 0; i < q.m(); ++i)
                r += ex.lambda[i] * q.constraints[static_cast<size_t>(i)].L *
                     (ex.x - q.constraints[static_cast<size_t>(i)].a);
            CHECK(r.norm() <= 1e-9);
        }
    }
    SUBCASE("l1 objective with a ball in chi0") {
        for (int t = 0; t < 10; ++t) {
            DiagQcqp q = random_diag_qcqp(9, 3, rng);
            MajorizedSubproblem sub = as_subproblem(q);
            sub.chi0 = ProxTerm::weighted_sum({{1.0, ProxTerm::l1(0.6)}, {1.0, ProxTerm::ball(1.1)}});
            ExactSolveResult ex = solve_exact(sub);
            CHECK(ex.kkt_residual <= 1e-10);
            CHECK(ex.x.norm() <= 1.1 + 1e-9);
            // optimality against dense sampling around the solution
            CanonicalSubproblem canon = canonicalize(sub);
            const double fstar = canon.objective(ex.x);
            Rng probe(100 + t);
            for (int s = 0; s < 200; ++s) {
                Vector cand = ex.x + 0.05 * probe.normal_vector(9);
                bool feas = cand.norm() <= 1.1;
                for (Index i = 0; i < q.m(); ++i) feas = feas && q.constraint_value(i, cand) <= 0.0;
                if (feas) CHECK(canon.objective(cand) >= fstar - 1e-9);
            }
        }
    }
    SUBCASE("warm starts cut iterations") {
        DiagQcqp q = random_diag_qcqp(10, 4, rng);
        MajorizedSubproblem sub = as_subproblem(q);
        ExactSolveResult cold = solve_exact(sub);
        ExactSolveResult warm = solve_exact(sub, &cold.lambda_canonical);
        CHECK(warm.iterations <= cold.iterations);
        CHECK((warm.x - cold.x).norm() <= 1e-9);
    }
}
