#include "lcpg/drivers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lcpg/ipm.hpp"

namespace lcpg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Vector schedule_levels(const LevelSchedule& s, const Vector& eta0, const Vector& eta, long k) {
    if (k < 0) throw StructuralError("schedule_levels: k must be nonnegative");
    switch (s.kind) {
        case LevelSchedule::Kind::Polynomial: {
            const double kk = static_cast<double>(k);
            return (kk / (kk + 1.0)) * eta + (1.0 / (kk + 1.0)) * eta0;
        }
        case LevelSchedule::Kind::Geometric:
            return eta - std::pow(s.rho, static_cast<double>(k)) * (eta - eta0);
        case LevelSchedule::Kind::Custom: {
            Vector lv = eta0;
            for (long j = 0; j < k && j < static_cast<long>(s.custom_deltas.size()); ++j)
                lv += s.custom_deltas[static_cast<size_t>(j)];
            for (Index i = 0; i < lv.size(); ++i)
                if (!(lv[i] < eta[i])) throw StructuralError("schedule_levels: custom deltas overshoot eta");
            return lv;
        }
    }
    throw StructuralError("schedule_levels: unknown schedule kind");
}

Vector schedule_delta(const LevelSchedule& s, const Vector& eta0, const Vector& eta, long k) {
    switch (s.kind) {
        case LevelSchedule::Kind::Polynomial: {
            const double kk = static_cast<double>(k);
            return (eta - eta0) / ((kk + 1.0) * (kk + 2.0));
        }
        case LevelSchedule::Kind::Geometric:
            return std::pow(s.rho, static_cast<double>(k)) * (1.0 - s.rho) * (eta - eta0);
        case LevelSchedule::Kind::Custom:
            if (k >= static_cast<long>(s.custom_deltas.size()))
                throw StructuralError("schedule_delta: custom schedule exhausted");
            return s.custom_deltas[static_cast<size_t>(k)];
    }
    throw StructuralError("schedule_delta: unknown schedule kind");
}

LevelSchedule strongly_convex_schedule(double L0, double mu0, double a) {
    if (!(mu0 > 0.0 && mu0 < L0)) throw StructuralError("strongly_convex_schedule: need 0 < mu0 < L0");
    if (!(a > 0.0 && a < 1.0)) throw StructuralError("strongly_convex_schedule: a must lie in (0,1)");
    return LevelSchedule::geometric((L0 - mu0) / (2.0 * (L0 - a * mu0)));
}

double alpha_weight(AlphaRule rule, long k, int T) {
    switch (rule) {
        case AlphaRule::KPlusOne:
            return static_cast<double>(k + 1);
        case AlphaRule::EpochFloor:
            if (T <= 0) throw StructuralError("alpha_weight: epoch rule requires T > 0");
            return static_cast<double>(T) * static_cast<double>(k / T) + 1.0;
        case AlphaRule::Uniform:
            return 1.0;
    }
    return 1.0;
}

Index sample_output_index(const std::vector<double>& alphas, Rng& rng) {
    double total = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0)) throw StructuralError("sample_output_index: weights must be positive");
        total += a;
    }
    const double u = rng.uniform() * total;
    double cum = 0.0;
    for (size_t k = 0; k < alphas.size(); ++k) {
        cum += alphas[k];
        if (u < cum) return static_cast<Index>(k);
    }
    return static_cast<Index>(alphas.size() - 1);
}

MajorizedSubproblem build_subproblem(const ConstrainedProblem& p, const Vector& x_k, const Vector& eta_k,
                                     const Vector& G_k, double gamma_k) {
    if (!(gamma_k > 0.0)) throw StructuralError("build_subproblem: gamma must be positive");
    MajorizedSubproblem sub;
    sub.anchor = x_k;
    sub.linear = G_k;
    sub.gamma = gamma_k;
    sub.chi0 = p.objective().chi;
    for (Index i = 0; i < p.n_constraints(); ++i) {
        const auto& c = p.constraints()[static_cast<size_t>(i)];
        SmoothEval ce = c.smooth(x_k);
        const double psi_k = ce.value + c.chi.value(x_k);
        if (!(psi_k < eta_k[i] + 1e-12))
            throw SolverError("build_subproblem: anchor is not strictly feasible for the current levels");
        MajorizedConstraint mc;
        mc.value_at_anchor = ce.value;
        mc.gradient = std::move(ce.gradient);
        mc.curvature = c.concave_smooth ? 0.0 : c.lipschitz;
        mc.chi = c.chi;
        mc.level = eta_k[i];
        sub.constraints.push_back(std::move(mc));
    }
    return sub;
}

Vector lcspg_gradient(const SmoothOracle& oracle, const Vector& x, int b_k, Rng& rng) {
    if (b_k < 1) throw StructuralError("lcspg_gradient: batch size must be >= 1");
    if (oracle.n_components < 1) throw StructuralError("lcspg_gradient: oracle has no components");
    Vector g = Vector::Zero(oracle.dim);
    for (int s = 0; s < b_k; ++s) g += oracle.component(rng.uniform_index(oracle.n_components), x).gradient;
    return g / static_cast<double>(b_k);
}

Vector lcsvrg_gradient(SvrgState& state, const SmoothOracle& oracle, const Vector& x, long k, int T, int b,
                       Rng& rng, long* full_evals, long* stoch_evals) {
    if (T < 1 || b < 1) throw StructuralError("lcsvrg_gradient: T and b must be >= 1");
    if (k % T == 0 || !state.initialized) {
        state.G = oracle(x).gradient;
        if (full_evals) ++*full_evals;
    } else {
        Vector diff = Vector::Zero(oracle.dim);
        for (int s = 0; s < b; ++s) {
            const Index i = rng.uniform_index(oracle.n_components);
            diff += oracle.component(i, x).gradient - oracle.component(i, state.x_prev).gradient;
        }
        // one SFO call per sampled component pair, matching the N2 = O(bK)
        // accounting of the variance-reduced complexity analysis
        if (stoch_evals) *stoch_evals += b;
        state.G += diff / static_cast<double>(b);
    }
    state.x_prev = x;
    state.initialized = true;
    return state.G;
}

double kkt_residual_surrogate(double L0, const Vector& L, const Vector& lambda, double step_norm) {
    return 2.0 * (L0 + lambda.dot(L)) * step_norm;
}

double kkt_surrogate_sq_stochastic(double gamma_k, double L0, const Vector& L, const Vector& lambda,
                                   double step_norm) {
    const double c = gamma_k + L0 + 2.0 * lambda.dot(L);
    return 2.0 * c * c * step_norm * step_norm;
}

ScadSubproblemResult solve_scad_subproblem(const MajorizedSubproblem& sub) {
    if (sub.m() != 1) throw UnsupportedError("solve_scad_subproblem: exactly one constraint expected");
    const auto& mc = sub.constraints[0];
    if (mc.curvature != 0.0)
        throw UnsupportedError("solve_scad_subproblem: constraint must be the linear surrogate");
    auto chi_flat = flatten(mc.chi);
    if (!chi_flat || chi_flat->has_ball)
        throw UnsupportedError("solve_scad_subproblem: constraint chi must be (weighted) l1");
    auto chi0_flat = flatten(sub.chi0);
    if (!chi0_flat || chi0_flat->has_ball)
        throw UnsupportedError("solve_scad_subproblem: chi_0 must be zero or l1");

    const double beta = chi_flat->l1_weight;
    const double w0 = chi0_flat->l1_weight;
    const Vector& c = mc.gradient;
    const double r = mc.level - mc.value_at_anchor + c.dot(sub.anchor);
    const Vector base = sub.gamma * sub.anchor - sub.linear;

    auto x_of = [&](double lam) {
        Vector v = (base - lam * c) / sub.gamma;
        const double w = (w0 + lam * beta) / sub.gamma;
        return w > 0.0 ? soft_threshold(v, w) : v;
    };
    auto h_of = [&](const Vector& x) { return beta * x.lpNorm<1>() + c.dot(x) - r; };

    ScadSubproblemResult res;
    res.x = x_of(0.0);
    if (h_of(res.x) <= 0.0) {
        res.lambda = 0.0;
        return res;
    }

    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (h_of(x_of(hi)) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) throw SolverError("solve_scad_subproblem: level is infeasible for the surrogate");
    }
    const double scale = 1.0 + std::abs(r);
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double h = h_of(x_of(mid));
        if (h > 0.0)
            lo = mid;
        else
            hi = mid;
        ++res.iterations;
        if (std::abs(h) <= 1e-10 * scale && hi - lo <= 1e-15 * (1.0 + hi)) break;
    }
    res.lambda = hi;
    res.x = x_of(hi);
    return res;
}

namespace {

struct SubSolveOutcome {
    Vector x;
    Vector lambda;            // per problem constraint
    Vector lambda_canonical;  // engine multipliers for warm starting
    int iterations = 0;
};

SubSolveOutcome solve_subproblem(const MajorizedSubproblem& sub, const RunConfig& cfg, double eps_k,
                                 double B_k, const Vector* warm) {
    SubSolveOutcome out;
    switch (cfg.subsolver) {
        case SubsolverKind::ScadSpecial: {
            ScadSubproblemResult r = solve_scad_subproblem(sub);
            out.x = std::move(r.x);
            out.lambda = Vector::Constant(sub.m(), r.lambda);
            out.iterations = r.iterations;
            return out;
        }
        case SubsolverKind::Ipm: {
            CanonicalSubproblem canon = canonicalize(sub);
            for (const auto& cc : canon.cons)
                if (cc.q > 0.0 && cc.q < 1e-6 * sub.gamma)
                    throw UnsupportedError(
                        "subsolver ipm: near-linear constraint makes the completed-square export "
                        "ill-conditioned; use the first-order subsolver");
            auto q = to_diag_qcqp(canon);
            if (!q)
                throw UnsupportedError(
                    "subsolver ipm: subproblem has nonsmooth terms; use the first-order subsolver");
            // The anchor can ride a chi_0 ball boundary, so search for a deep
            // interior start along segments toward the constraint-ball centers;
            // each slack is concave in t, hence so is their min, and a ternary
            // search maximizes it per direction.
            auto min_slack = [&](const Vector& x) {
                double s = kInf;
                for (Index i = 0; i < q->m(); ++i) s = std::min(s, -q->constraint_value(i, x));
                return s;
            };
            std::vector<Vector> targets;
            {
                double qsum = 0.0;
                Vector center = Vector::Zero(sub.dim());
                for (const auto& c : q->constraints) {
                    qsum += c.L;
                    center += c.L * c.a;
                }
                targets.push_back(center / std::max(qsum, 1e-300));
                for (const auto& c : q->constraints) targets.push_back(c.a);
            }
            Vector x_hat = sub.anchor;
            double slack = min_slack(x_hat);
            for (int round = 0; round < 2; ++round) {
                for (const Vector& target : targets) {
                    double lo = 0.0, hi = 1.0;
                    for (int it = 0; it < 60; ++it) {
                        const double t1 = lo + (hi - lo) / 3.0, t2 = hi - (hi - lo) / 3.0;
                        if (min_slack(x_hat + t1 * (target - x_hat)) <
                            min_slack(x_hat + t2 * (target - x_hat)))
                            lo = t1;
                        else
                            hi = t2;
                    }
                    Vector cand = x_hat + 0.5 * (lo + hi) * (target - x_hat);
                    const double cs = min_slack(cand);
                    if (cs > slack) {
                        slack = cs;
                        x_hat = std::move(cand);
                    }
                }
            }
            if (slack <= 1e-12) throw SolverError("subsolver ipm: could not find a strictly interior start");
            const double ipm_eps = eps_k > 0.0 ? std::min(cfg.ipm_eps, eps_k) : cfg.ipm_eps;
            PathFollowingResult r = solve_path_following(*q, x_hat, 0.5 * slack, ipm_eps);
            out.iterations = r.stats.newton_steps_phase0 + r.stats.newton_steps_phase1;
            if (eps_k == 0.0) {
                // exact-solve modes polish the IPM output to machine precision
                ExactSolveResult ex = solve_exact(canon, &r.lambda);
                out.x = std::move(ex.x);
                out.lambda = std::move(ex.lambda);
                out.lambda_canonical = std::move(ex.lambda_canonical);
                out.iterations += ex.iterations;
            } else {
                out.x = std::move(r.x);
                out.lambda_canonical = r.lambda;
                out.lambda = canon.fold_lambda(r.lambda);
            }
            return out;
        }
        case SubsolverKind::FirstOrder: {
            // an exact solution is an eps-solution for every eps >= 0, so when
            // eps_k sits below what floating point can certify, solve exactly
            if (eps_k <= 1e-11) {
                ExactSolveResult ex = solve_exact(sub, warm);
                out.x = std::move(ex.x);
                out.lambda = std::move(ex.lambda);
                out.lambda_canonical = std::move(ex.lambda_canonical);
                out.iterations = ex.iterations;
                return out;
            }
            PdResult r = pd_solve(sub, B_k, eps_k);
            if (!r.certified) throw SolverError("subsolver pd: certificate not reached within budget");
            out.x = std::move(r.x);
            out.lambda = std::move(r.lambda);
            out.lambda_canonical = std::move(r.lambda_canonical);
            out.iterations = r.iterations;
            return out;
        }
    }
    throw StructuralError("solve_subproblem: unknown subsolver");
}

}  // namespace

RunResult lcpg_run(const ConstrainedProblem& p, const RunConfig& cfg, const LevelSchedule& schedule) {
    const Index m = p.n_constraints();
    const double L0 = p.objective().lipschitz;
    if (!(L0 > 0.0)) throw StructuralError("lcpg_run: objective Lipschitz modulus must be positive");
    const Vector Lvec = p.constraint_lipschitz();
    const double gamma = cfg.gamma_k > 0.0 ? cfg.gamma_k : L0;
    const long n = p.objective().smooth.n_components;

    const bool stochastic = cfg.mode == RunMode::Stochastic;
    const bool svrg = cfg.mode == RunMode::Svrg;
    const bool inexact = cfg.mode == RunMode::Inexact;
    const bool needs_descent = cfg.mode == RunMode::Exact || cfg.mode == RunMode::Convex ||
                               cfg.mode == RunMode::StronglyConvex;

    int b_k = cfg.b_k;
    double beta_k = cfg.beta_k;
    int T = cfg.T, b = cfg.b;
    AlphaRule alpha_rule = cfg.alpha_rule;
    if (stochastic) {
        if (b_k <= 0) b_k = cfg.K + 1;
        if (beta_k <= 0.0) beta_k = L0 / 2.0;
        if (!(2.0 * gamma - beta_k - L0 > 0.0))
            throw StructuralError("lcpg_run: stochastic mode requires 2 gamma - beta - L0 > 0");
    }
    if (svrg) {
        if (n < 1) throw StructuralError("lcpg_run: svrg requires a finite-sum objective");
        if (T <= 0) T = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
        if (b <= 0) b = 8 * T;
        if (beta_k <= 0.0) beta_k = L0 / 2.0;
        if (b < 2 * T) throw StructuralError("lcpg_run: svrg requires b >= 2T");
        const double Ltilde =
            (2.0 * gamma - beta_k - L0) / 2.0 - L0 * L0 * static_cast<double>(T - 1) / (2.0 * beta_k * b);
        if (!(Ltilde > 0.0)) throw StructuralError("lcpg_run: svrg requires L~ > 0");
        if (cfg.alpha_rule == AlphaRule::KPlusOne) alpha_rule = AlphaRule::EpochFloor;
    }

    Rng batch_rng = Rng(cfg.seed, 0);
    Rng sample_rng = Rng(cfg.seed, 1);
    // a chi_0 ball becomes the leading engine constraint; its multiplier is
    // part of the subproblem dual and belongs in the reported dual norm
    bool chi0_ball = false;
    if (auto flat0 = flatten(p.objective().chi)) chi0_ball = flat0->has_ball;

    std::vector<double> alphas(static_cast<size_t>(cfg.K + 1));
    for (long k = 0; k <= cfg.K; ++k)
        alphas[static_cast<size_t>(k)] = alpha_weight(alpha_rule, k, T > 0 ? T : 1);
    const long k_hat = sample_output_index(alphas, sample_rng);

    RunResult res;
    res.k_hat = k_hat;
    res.records.reserve(static_cast<size_t>(cfg.K + 1));

    Vector x = p.x0();
    SvrgState svrg_state;
    Vector warm_lambda;
    long grad_full = 0, grad_stoch = 0;
    double running_min_obj = kInf;
    double weighted_eps_gap = 0.0;  // Delta~ accumulator for the type-II bound
    double alpha_sum = 0.0;

    for (long k = 0; k <= cfg.K; ++k) {
        const auto tic = std::chrono::steady_clock::now();
        const Vector eta_k = schedule_levels(schedule, p.eta0(), p.eta(), k);
        const Vector eta_next = schedule_levels(schedule, p.eta0(), p.eta(), k + 1);
        const Vector delta_k = m > 0 ? schedule_delta(schedule, p.eta0(), p.eta(), k) : Vector();

        SmoothEval obj_eval = p.objective().smooth(x);
        const double psi0_x = obj_eval.value + p.objective().chi.value(x);
        running_min_obj = std::min(running_min_obj, psi0_x);

        Vector G;
        if (stochastic) {
            G = lcspg_gradient(p.objective().smooth, x, b_k, batch_rng);
            grad_stoch += b_k;
        } else if (svrg) {
            G = lcsvrg_gradient(svrg_state, p.objective().smooth, x, k, T, b, batch_rng, &grad_full,
                                &grad_stoch);
        } else {
            G = obj_eval.gradient;
            ++grad_full;
        }

        MajorizedSubproblem sub = build_subproblem(p, x, eta_k, G, gamma);

        double eps_k = 0.0;
        double B_k = kInf;
        const bool cvx_inexact =
            cfg.inexact_subsolves && (cfg.mode == RunMode::Convex || cfg.mode == RunMode::StronglyConvex);
        if (inexact || cvx_inexact) {
            if (m == 0) throw StructuralError("lcpg_run: inexact solves are undefined without constraints");
            if (cfg.mode == RunMode::StronglyConvex) {
                if (schedule.kind != LevelSchedule::Kind::Geometric)
                    throw StructuralError("lcpg_run: strongly convex inexact solves need the geometric schedule");
                const double rho = schedule.rho;
                eps_k = 0.5 * cfg.sc_a * (1.0 - rho) * std::pow(rho, static_cast<double>(k)) *
                        (p.eta() - p.eta0()).norm();
            } else {
                eps_k = cfg.eps_scale * delta_k.minCoeff();
                if (!(eps_k < delta_k.minCoeff()))
                    throw StructuralError("lcpg_run: eps_k must stay below min_i delta_i^k");
            }
            eps_k = std::max(eps_k, 1e-300);
            const double lb = cfg.psi0_lower_bound > -kInf ? cfg.psi0_lower_bound : running_min_obj - 1.0;
            B_k = dual_bound_Bk(psi0_x, lb, delta_k);
        }

        SubSolveOutcome sol =
            solve_subproblem(sub, cfg, eps_k, B_k, warm_lambda.size() > 0 ? &warm_lambda : nullptr);
        warm_lambda = sol.lambda_canonical;
        Vector x_next = std::move(sol.x);
        // keep iterates inside dom(chi_0): engines enforce a chi_0 ball as a
        // quadratic constraint, so the solution can sit a rounding error outside
        if (auto flat0 = flatten(p.objective().chi); flat0 && flat0->has_ball) {
            const Vector& c0 = flat0->ball_center;
            Vector d = c0.size() == 0 ? x_next : Vector(x_next - c0);
            const double nrm = d.norm();
            if (nrm > flat0->ball_radius) {
                d *= flat0->ball_radius / nrm;
                x_next = c0.size() == 0 ? d : Vector(c0 + d);
            }
        }
        const double step_norm = (x_next - x).norm();

        // feasibility chain psi(x+) <= psi^k(x+) <= eta^k < eta^{k+1} <= eta
        double chain_violation = 0.0;
        const Vector psi_next = evaluate_constraints(p, x_next);
        for (Index i = 0; i < m; ++i) {
            const double surrogate = sub.constraint_value(i, x_next) + eta_k[i];
            chain_violation = std::max(chain_violation, psi_next[i] - surrogate);
            chain_violation = std::max(chain_violation, surrogate - eta_k[i] - (inexact ? eps_k : 0.0));
            // strict in exact arithmetic; <= absorbs geometric-schedule
            // saturation once eta - eta^k underflows below one ulp
            if (!(eta_k[i] <= eta_next[i] && eta_next[i] <= p.eta()[i]))
                chain_violation = std::max(chain_violation, kInf);
        }
        res.max_chain_violation = std::max(res.max_chain_violation, chain_violation);
        if (cfg.strict && chain_violation > 1e-9)
            throw SolverError("lcpg_run: feasibility chain violated at k=" + std::to_string(k));

        const double psi0_next = p.objective().value(x_next);
        if (needs_descent && eps_k > 0.0) {
            const double viol = psi0_next - (psi0_x + eps_k);
            res.max_descent_violation = std::max(res.max_descent_violation, viol);
            if (cfg.strict && viol > 1e-9)
                throw SolverError("lcpg_run: near-descent violated at k=" + std::to_string(k));
        } else if (needs_descent) {
            const double viol = psi0_next - (psi0_x - 0.5 * L0 * step_norm * step_norm);
            res.max_descent_violation = std::max(res.max_descent_violation, viol);
            if (cfg.strict && viol > 1e-9)
                throw SolverError("lcpg_run: sufficient descent violated at k=" + std::to_string(k));
        } else if (inexact) {
            const double viol = psi0_next - (psi0_x + eps_k);
            res.max_descent_violation = std::max(res.max_descent_violation, viol);
            if (cfg.strict && viol > 1e-9)
                throw SolverError("lcpg_run: near-descent violated at k=" + std::to_string(k));
        }

        const double alpha_k = alphas[static_cast<size_t>(k)];
        alpha_sum += alpha_k;
        weighted_eps_gap += alpha_k * (psi0_x - psi0_next + eps_k);

        IterateRecord rec;
        rec.k = k;
        rec.obj = psi0_x;
        rec.psi = evaluate_constraints(p, x);
        rec.eta_k = eta_k;
        rec.step_norm = step_norm;
        rec.lambda = sol.lambda;
        const double lambda_ball =
            chi0_ball && sol.lambda_canonical.size() > 0 ? sol.lambda_canonical[0] : 0.0;
        rec.dual_norm = std::sqrt(sol.lambda.squaredNorm() + lambda_ball * lambda_ball);
        rec.kkt_surrogate = kkt_residual_surrogate(L0, Lvec, sol.lambda, step_norm);
        rec.kkt_exact = kkt_exact_supported(p) ? kkt_residual_exact(p, x_next, sol.lambda)
                                               : std::numeric_limits<double>::quiet_NaN();
        rec.eps_k = eps_k;
        rec.grad_full = grad_full;
        rec.grad_stoch = grad_stoch;
        rec.subsolver_iters = sol.iterations;
        if (cfg.measure_time) {
            rec.time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tic).count();
        }
        if (cfg.keep_iterates) rec.x = x;
        res.Bhat = std::max(res.Bhat, rec.dual_norm);
        res.records.push_back(std::move(rec));

        if (k == k_hat) res.x_hat = x_next;
        x = x_next;
    }

    res.x_final = x;
    res.obj_final = p.objective().value(x);
    res.min_obj = std::min(running_min_obj, res.obj_final);
    res.grad_full = grad_full;
    res.grad_stoch = grad_stoch;

    // Type-I/II report at the sampled iterate x^{k_hat + 1}
    const IterateRecord& hat = res.records[static_cast<size_t>(k_hat)];
    KktReport rep;
    rep.type = inexact ? 2 : 1;
    rep.sampled_index = k_hat;
    rep.stationarity_surrogate = hat.kkt_surrogate;
    rep.stationarity = hat.kkt_exact;
    const Vector psi_hat = evaluate_constraints(p, res.x_hat);
    for (Index i = 0; i < m; ++i) rep.complementarity += hat.lambda[i] * std::abs(psi_hat[i] - p.eta()[i]);
    if (inexact) rep.companion_distance_bound = 2.0 * weighted_eps_gap / (L0 * alpha_sum);
    res.report = rep;
    return res;
}

GapTrace convex_gap_trace(const ConstrainedProblem& p, const RunConfig& cfg, const LevelSchedule& schedule,
                          double reference_value) {
    if (cfg.mode != RunMode::Convex && cfg.mode != RunMode::StronglyConvex)
        throw StructuralError("convex_gap_trace: mode must be convex or strongly_convex");
    if (!std::isfinite(reference_value)) throw StructuralError("convex_gap_trace: reference value required");

    GapTrace out;
    out.run = lcpg_run(p, cfg, schedule);
    out.Bhat = out.run.Bhat;
    for (const auto& rec : out.run.records) out.gaps.push_back(rec.obj - reference_value);
    out.gaps.push_back(out.run.obj_final - reference_value);

    const double L0 = p.objective().lipschitz;
    const Vector L = p.constraint_lipschitz();
    if (cfg.mode == RunMode::StronglyConvex) {
        // least-squares slope of log(gap) over the usable range
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long count = 0;
        const double floor_gap = std::max(1e-13, 1e-10 * std::abs(reference_value));
        for (size_t k = 0; k < out.gaps.size(); ++k) {
            if (!(out.gaps[k] > floor_gap)) break;
            const double xk = static_cast<double>(k);
            const double yk = std::log(out.gaps[k]);
            sx += xk;
            sy += yk;
            sxx += xk * xk;
            sxy += xk * yk;
            ++count;
        }
        if (count >= 3) out.fit_slope = (sxy - sx * sy / count) / (sxx - sx * sx / count);
        out.theory_slope = -p.mu0() / (L0 + out.Bhat * L.norm());
    } else {
        // slope of gap_k * k against k; boundedness of gap*K is the rate claim
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long count = 0;
        for (size_t k = 1; k < out.gaps.size(); ++k) {
            const double xk = static_cast<double>(k);
            const double yk = out.gaps[k] * xk;
            sx += xk;
            sy += yk;
            sxx += xk * xk;
            sxy += xk * yk;
            ++count;
        }
        if (count >= 3) out.fit_slope = (sxy - sx * sy / count) / (sxx - sx * sx / count);
        out.theory_slope = 0.0;
    }
    return out;
}

void write_trace_csv(std::ostream& os, const RunResult& run) {
    os << "k,obj,feas_margin_min,step_norm,kkt_surrogate,kkt_exact,dual_norm,eps_k,grad_evals_full,"
          "grad_evals_stoch,subsolver_iters,time_ms\n";
    for (const auto& r : run.records) {
        double margin = kInf;
        for (Index i = 0; i < r.psi.size(); ++i) margin = std::min(margin, r.eta_k[i] - r.psi[i]);
        os << r.k << ',' << format_double(r.obj) << ',';
        if (r.psi.size() > 0) os << format_double(margin);
        os << ',' << format_double(r.step_norm) << ',' << format_double(r.kkt_surrogate) << ',';
        if (!std::isnan(r.kkt_exact)) os << format_double(r.kkt_exact);
        os << ',' << format_double(r.dual_norm) << ',' << format_double(r.eps_k) << ',' << r.grad_full << ','
           << r.grad_stoch << ',' << r.subsolver_iters << ',' << format_double(r.time_ms) << '\n';
    }
}

}  // namespace lcpg
