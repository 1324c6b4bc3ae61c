#include <cmath>
#include <ostream>
#include <sstream>

#include "lcpg/bench.hpp"
#include "lcpg/ipm.hpp"
#include "lcpg/smoothing.hpp"

namespace lcpg {

namespace {

struct Battery {
    std::ostream& os;
    bool all_pass = true;

    void report(const std::string& name, bool ok) {
        os << "check " << name << ": " << (ok ? "PASS" : "FAIL") << '\n';
        all_pass = all_pass && ok;
    }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

ConstrainedProblem example_scad_2d(double eta1) {
    Composite objective;
    objective.smooth = linear_oracle((Vector(2) << -1.0, 0.0).finished(), 7.0);
    objective.lipschitz = 1e-8;  // linear objective; tiny positive modulus
    ScadConstraint sc = scad_constraint(1.0, 5.0, 2, eta1 / 2.0, false);
    return ConstrainedProblem(std::move(objective), {std::move(sc.composite)},
                              Vector::Constant(1, eta1), Vector::Constant(1, eta1 / 3.0), Vector::Zero(2));
}

}  // namespace

bool run_check_battery(std::ostream& os) {
    Battery b{os};

    {  // SCAD branch values and derivative
        ScadParams p(1.0, 5.0);
        b.report("scad_values", near(scad_value(0.5, p), 0.0, 0.0) && near(scad_value(3.0, p), 0.5, 1e-15) &&
                                    near(scad_value(6.0, p), 3.0, 1e-15) && near(scad_value(5.0, p), 2.0, 1e-15));
        b.report("scad_gradient", near(scad_grad(0.5, p), 0.0, 0.0) && near(scad_grad(3.0, p), 0.5, 1e-15) &&
                                      near(scad_grad(6.0, p), 1.0, 1e-15));
    }

    {  // prox closed forms
        Vector st = prox(ProxTerm::l1(1.0), (Vector(2) << 2.0, -0.5).finished(), 1.0);
        Vector pj = prox(ProxTerm::ball(1.0), (Vector(2) << 3.0, 4.0).finished(), 2.0);
        b.report("prox_closed_forms", near(st[0], 1.0, 1e-15) && near(st[1], 0.0, 0.0) &&
                                          near(pj[0], 0.6, 1e-15) && near(pj[1], 0.8, 1e-15));
        Interval iv = subdiff_interval(
            ProxTerm::weighted_sum({{1.0, ProxTerm::l1(2.0)}, {3.0, ProxTerm::l1(1.0)}}),
            Vector::Zero(1), 0);
        b.report("subdiff_minkowski", near(iv.lo, -5.0, 0.0) && near(iv.hi, 5.0, 0.0));
    }

    {  // schedule closed forms vs accumulation
        const Vector eta0 = Vector::Constant(1, 0.0), eta = Vector::Constant(1, 1.0);
        LevelSchedule poly = LevelSchedule::polynomial();
        LevelSchedule geo = LevelSchedule::geometric(1.0 / 3.0);
        bool ok = true;
        Vector acc_p = eta0, acc_g = eta0;
        for (long k = 0; k <= 1000; ++k) {
            ok = ok && near(schedule_levels(poly, eta0, eta, k)[0], acc_p[0], 1e-12);
            ok = ok && near(schedule_levels(geo, eta0, eta, k)[0], acc_g[0], 1e-12);
            acc_p += schedule_delta(poly, eta0, eta, k);
            acc_g += schedule_delta(geo, eta0, eta, k);
        }
        ok = ok && near(schedule_levels(geo, eta0, eta, 2)[0], 8.0 / 9.0, 1e-16);
        b.report("level_schedules", ok);
    }

    {  // smoothing sandwich + huber values
        MaxStructure s = make_box_structure(Matrix::Identity(1, 1), -1.0, 1.0);
        SmoothedComposite sc = make_smoothed(s, 1.0);
        SmoothEval e = smoothed_eval(sc, Vector::Constant(1, 2.0));
        bool ok = near(e.value, 1.5, 1e-15) && near(e.gradient[0], 1.0, 1e-15);
        Rng rng(7);
        MaxStructure s5 = make_box_structure(Matrix::Identity(5, 5), -1.0, 1.0);
        SmoothedComposite sc5 = make_smoothed(s5, 0.37);
        for (int t = 0; t < 200 && ok; ++t) ok = sandwich_check(sc5, rng.normal_vector(5)).pass;
        b.report("smoothing_sandwich", ok);
    }

    {  // 1-d interior point anchored instance: min (x-2)^2/2 st x^2/2 <= 1/2
        DiagQcqp q;
        q.L0 = 1.0;
        q.a0 = Vector::Constant(1, 2.0);
        q.constraints.push_back({1.0, Vector::Zero(1), 0.5});
        PathFollowingResult r = solve_path_following(q, Vector::Zero(1), 0.4, 1e-10);
        b.report("ipm_1d_kkt", near(r.x[0], 1.0, 1e-5) && near(r.lambda[0], 1.0, 1e-4));
        Rng rng(21);
        Matrix N(4, 3);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 3; ++j) N(i, j) = rng.normal();
        Vector gamma = Vector::Constant(4, 2.0), rhs = rng.normal_vector(4);
        b.report("smw_branches",
                 (smw_solve(N, gamma, rhs, true) - smw_solve(N, gamma, rhs, false)).norm() <= 1e-10);
    }

    {  // Example values: psi1(5,0) = 3, psi1(3,0) = 2.5, subdifferential box
        ConstrainedProblem p = example_scad_2d(3.0);
        const double v50 = evaluate_constraints(p, (Vector(2) << 5.0, 0.0).finished())[0];
        const double v30 = evaluate_constraints(p, (Vector(2) << 3.0, 0.0).finished())[0];
        double res_min = kInf;
        for (int t = 0; t <= 10; ++t) {
            Vector lam = Vector::Constant(1, 10.0 * t);
            res_min = std::min(res_min,
                               kkt_residual_exact(p, (Vector(2) << 5.0, 0.0).finished(), lam));
        }
        b.report("scad_2d_anchors", near(v50, 3.0, 1e-12) && near(v30, 2.5, 1e-12) && res_min >= 1.0 - 1e-12);
    }

    {  // generator determinism + strict feasibility
        QcqpRecipe recipe;
        recipe.n = 20;
        recipe.m = 3;
        recipe.seed = 42;
        QcqpInstance a = gen_qcqp(recipe), c = gen_qcqp(recipe);
        bool ok = serialize(a) == serialize(c);
        ok = ok && validate_strict_feasibility(make_problem(a)).pass;
        b.report("qcqp_generator", ok);
    }

    {  // scad bisection anchored: d=1, G=-2, constraint x <= 1 -> x=1, lambda=1
        MajorizedSubproblem sub;
        sub.anchor = Vector::Zero(1);
        sub.linear = Vector::Constant(1, -2.0);
        sub.gamma = 1.0;
        MajorizedConstraint mc;
        mc.value_at_anchor = 0.0;
        mc.gradient = Vector::Constant(1, 1.0);
        mc.curvature = 0.0;
        mc.level = 1.0;
        sub.constraints.push_back(std::move(mc));
        ScadSubproblemResult r = solve_scad_subproblem(sub);
        b.report("scad_bisection", near(r.x[0], 1.0, 1e-9) && near(r.lambda, 1.0, 1e-9));
    }

    {  // small exact run: chain + descent within tolerance
        QcqpRecipe recipe;
        recipe.n = 8;
        recipe.m = 3;
        recipe.seed = 7;
        ConstrainedProblem p = make_problem(gen_qcqp(recipe));
        RunConfig cfg;
        cfg.K = 25;
        cfg.seed = 7;
        cfg.strict = false;
        RunResult run = lcpg_run(p, cfg, LevelSchedule::polynomial());
        b.report("lcpg_exact_run",
                 run.max_chain_violation <= 1e-9 && run.max_descent_violation <= 1e-9);
    }

    {  // trace determinism: identical seeds give identical traces
        QcqpRecipe recipe;
        recipe.n = 6;
        recipe.m = 2;
        recipe.seed = 3;
        ConstrainedProblem p = make_problem(gen_qcqp(recipe));
        RunConfig cfg;
        cfg.K = 10;
        cfg.seed = 3;
        std::ostringstream t1, t2;
        write_trace_csv(t1, lcpg_run(p, cfg, LevelSchedule::polynomial()));
        write_trace_csv(t2, lcpg_run(p, cfg, LevelSchedule::polynomial()));
        b.report("run_determinism", t1.str() == t2.str());
    }

    os << (b.all_pass ? "all checks passed" : "CHECK FAILURES PRESENT") << '\n';
    return b.all_pass;
}

}  // namespace lcpg
