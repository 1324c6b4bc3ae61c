#include <doctest.h>

#include <cmath>

#include "lcpg/bench.hpp"
#include "lcpg/problem.hpp"
#include "lcpg/smoothing.hpp"
#include "test_oracles.hpp"

using namespace lcpg;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

Composite constant_constraint(Index d, double value) {
    Composite c;
    c.smooth = constant_oracle(d, value);
    c.lipschitz = 1.0;
    return c;
}

/// Example problem: minimize 7 - x_1 subject to ||x||_1 - sum_j h(x_j) <= eta1
/// with the SCAD block at beta = 1, theta = 5.
ConstrainedProblem scad_2d(double eta1) {
    Composite objective;
    objective.smooth = linear_oracle(vec2(-1.0, 0.0), 7.0);
    objective.lipschitz = 1e-6;
    ScadConstraint sc = scad_constraint(1.0, 5.0, 2, eta1 / 2.0, false);
    return ConstrainedProblem(std::move(objective), {std::move(sc.composite)}, Vector::Constant(1, eta1),
                              Vector::Constant(1, eta1 / 3.0), Vector::Zero(2));
}

}  // namespace

TEST_CASE("strict feasibility report") {
    SUBCASE("passing data") {
        std::vector<Composite> cons = {constant_constraint(2, -10.0)};
        FeasibilityReport rep = validate_strict_feasibility(cons, Vector::Constant(1, 0.0),
                                                            Vector::Constant(1, -5.0), Vector::Zero(2));
        CHECK(rep.pass);
        CHECK(rep.margins[0] == doctest::Approx(5.0));
    }
    SUBCASE("violated margin") {
        std::vector<Composite> cons = {constant_constraint(2, -10.0)};
        FeasibilityReport rep = validate_strict_feasibility(cons, Vector::Constant(1, 0.0),
                                                            Vector::Constant(1, -11.0), Vector::Zero(2));
        CHECK_FALSE(rep.pass);
        CHECK(rep.margins[0] == doctest::Approx(-1.0));
    }
    SUBCASE("scad example problem admits any eta0 in (0, 3)") {
        ConstrainedProblem p = scad_2d(3.0);
        CHECK(validate_strict_feasibility(p).pass);
    }
    SUBCASE("dimension mismatch is structural") {
        std::vector<Composite> cons = {constant_constraint(3, -1.0)};
        CHECK_THROWS_AS(validate_strict_feasibility(cons, Vector::Constant(1, 0.0),
                                                    Vector::Constant(1, -0.5), Vector::Zero(2)),
                        StructuralError);
    }
}

TEST_CASE("construction rejects assumption violations") {
    Composite obj;
    obj.smooth = quadratic_oracle(1.0, Vector::Zero(2));
    obj.lipschitz = 1.0;
    std::vector<Composite> cons = {constant_constraint(2, -10.0)};
    // eta0 >= eta
    CHECK_THROWS_AS(ConstrainedProblem(obj, cons, Vector::Constant(1, -5.0), Vector::Constant(1, -5.0),
                                       Vector::Zero(2)),
                    StructuralError);
    // x0 infeasible for eta0
    CHECK_THROWS_AS(ConstrainedProblem(obj, cons, Vector::Constant(1, 0.0), Vector::Constant(1, -11.0),
                                       Vector::Zero(2)),
                    StructuralError);
    // x0 outside dom(chi_0)
    Composite obj_ball = obj;
    obj_ball.chi = ProxTerm::ball(1.0);
    CHECK_THROWS_AS(ConstrainedProblem(obj_ball, cons, Vector::Constant(1, 0.0), Vector::Constant(1, -5.0),
                                       (Vector(2) << 5.0, 0.0).finished()),
                    StructuralError);
}

TEST_CASE("evaluate_constraints on the scad example") {
    ConstrainedProblem p = scad_2d(3.0);
    CHECK(evaluate_constraints(p, vec2(5.0, 0.0))[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(evaluate_constraints(p, vec2(3.0, 0.0))[0] == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(evaluate_constraints(p, vec2(0.0, 0.0))[0] == 0.0);
    CHECK_THROWS_AS(evaluate_constraints(p, Vector::Zero(3)), StructuralError);
}

TEST_CASE("check_lipschitz on quadratics and the huber function") {
    SmoothOracle quad = quadratic_oracle(1.0, Vector::Zero(3));
    LipschitzCheck ok = check_lipschitz(quad, 1.0, 200, 2.0, Vector::Zero(3), 42);
    CHECK(ok.pass);
    CHECK(ok.worst_ratio == doctest::Approx(1.0).epsilon(1e-9));
    LipschitzCheck bad = check_lipschitz(quad, 0.5, 200, 2.0, Vector::Zero(3), 42);
    CHECK_FALSE(bad.pass);

    // smoothed l1 at beta = 1 has a 1-Lipschitz gradient (dense 1-d sampling)
    SmoothedComposite huber = make_smoothed(make_box_structure(Matrix::Identity(1, 1), -1.0, 1.0), 1.0);
    SmoothOracle ho = as_oracle(huber);
    LipschitzCheck hub = check_lipschitz(ho, 1.0, 2000, 3.0, Vector::Zero(1), 7);
    CHECK(hub.pass);
}

TEST_CASE("finite sum oracle equals the component mean") {
    SparseDataset data = gen_synthetic_logistic(40, 6, 3);
    LogisticOracle lo = logistic_oracle(data);
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        Vector x = rng.normal_vector(6);
        SmoothEval full = lo.oracle(x);
        double mean = 0.0;
        Vector gmean = Vector::Zero(6);
        for (Index i = 0; i < lo.oracle.n_components; ++i) {
            SmoothEval e = lo.oracle.component(i, x);
            mean += e.value;
            gmean += e.gradient;
        }
        mean /= static_cast<double>(lo.oracle.n_components);
        gmean /= static_cast<double>(lo.oracle.n_components);
        CHECK(std::abs(full.value - mean) <= 1e-10 * std::max(1.0, std::abs(mean)));
        CHECK((full.gradient - gmean).norm() <= 1e-10 * std::max(1.0, gmean.norm()));
    }
}

TEST_CASE("exact KKT residual") {
    SUBCASE("stationary unconstrained composite") {
        Composite obj;
        Vector a = (Vector(3) << 1.0, -2.0, 0.5).finished();
        obj.smooth = quadratic_oracle(1.0, a);
        obj.lipschitz = 1.0;
        Composite slack = constant_constraint(3, -1.0);
        ConstrainedProblem p(obj, {slack}, Vector::Constant(1, 0.0), Vector::Constant(1, -0.5),
                             Vector::Zero(3));
        CHECK(kkt_residual_exact(p, a, Vector::Zero(1)) == 0.0);
    }
    SUBCASE("l1 interval arithmetic") {
        Composite obj;
        obj.smooth = quadratic_oracle(1.0, Vector::Zero(1));
        obj.chi = ProxTerm::l1(1.0);
        obj.lipschitz = 1.0;
        Composite slack = constant_constraint(1, -1.0);
        ConstrainedProblem p(obj, {slack}, Vector::Constant(1, 0.0), Vector::Constant(1, -0.5),
                             Vector::Zero(1));
        // grad f0 = 1 at x = 1, d(chi) = [1, 1]: dist(0, 1 + [1,1]) = 2
        CHECK(kkt_residual_exact(p, Vector::Constant(1, 1.0), Vector::Zero(1)) ==
              doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("no multiplier certifies the scad example at (5, 0)") {
        ConstrainedProblem p = scad_2d(3.0);
        Rng rng(31);
        for (int t = 0; t < 25; ++t) {
            Vector lam = Vector::Constant(1, rng.uniform(0.0, 100.0));
            CHECK(kkt_residual_exact(p, vec2(5.0, 0.0), lam) >= 1.0 - 1e-12);
        }
        // constraint subdifferential at (5, 0) is {0} x [-1, 1]
        const auto& chi = p.constraints()[0].chi;
        Vector g = p.constraints()[0].smooth(vec2(5.0, 0.0)).gradient;
        Interval i0 = subdiff_interval(chi, vec2(5.0, 0.0), 0);
        Interval i1 = subdiff_interval(chi, vec2(5.0, 0.0), 1);
        CHECK(g[0] + i0.lo == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(g[0] + i0.hi == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(g[1] + i1.lo == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(g[1] + i1.hi == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("mfcq margin at the shifted level") {
        // at eta1 = 2.5 the limit point is (3, 0) and the first coordinate
        // subgradient of psi_1 is 1 - h'(3) = 0.5
        ConstrainedProblem p = scad_2d(2.5);
        Vector g = p.constraints()[0].smooth(vec2(3.0, 0.0)).gradient;
        Interval i0 = subdiff_interval(p.constraints()[0].chi, vec2(3.0, 0.0), 0);
        CHECK(g[0] + i0.lo == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("non separable chi is rejected") {
        Composite obj;
        obj.smooth = quadratic_oracle(1.0, Vector::Zero(2));
        obj.chi = ProxTerm::ball(1.0);
        obj.lipschitz = 1.0;
        Composite slack = constant_constraint(2, -1.0);
        ConstrainedProblem p(obj, {slack}, Vector::Constant(1, 0.0), Vector::Constant(1, -0.5),
                             Vector::Zero(2));
        CHECK_FALSE(kkt_exact_supported(p));
        CHECK_THROWS_AS(kkt_residual_exact(p, Vector::Zero(2), Vector::Zero(1)), UnsupportedError);
    }
}
