#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lcpg/firstorder.hpp"
#include "lcpg/problem.hpp"
#include "lcpg/rng.hpp"
#include "lcpg/subproblem.hpp"

namespace lcpg {

/// Rule producing the level increments delta^k with sum eta - eta0.
struct LevelSchedule {
    enum class Kind { Polynomial, Geometric, Custom };
    Kind kind = Kind::Polynomial;
    double rho = 0.5;
    std::vector<Vector> custom_deltas;

    static LevelSchedule polynomial() { return {}; }
    static LevelSchedule geometric(double rho) {
        if (!(rho > 0.0 && rho < 1.0)) throw StructuralError("LevelSchedule: rho must lie in (0,1)");
        LevelSchedule s;
        s.kind = Kind::Geometric;
        s.rho = rho;
        return s;
    }
    static LevelSchedule custom(std::vector<Vector> deltas) {
        LevelSchedule s;
        s.kind = Kind::Custom;
        s.custom_deltas = std::move(deltas);
        return s;
    }
};

/// eta^k in closed form (never accumulated):
///   polynomial: eta^k = (k/(k+1)) eta + (1/(k+1)) eta0
///   geometric:  eta - eta^k = rho^k (eta - eta0)
Vector schedule_levels(const LevelSchedule& s, const Vector& eta0, const Vector& eta, long k);
Vector schedule_delta(const LevelSchedule& s, const Vector& eta0, const Vector& eta, long k);

/// Geometric schedule of the strongly convex analysis:
/// rho = (L0 - mu0) / (2 (L0 - a mu0)).
LevelSchedule strongly_convex_schedule(double L0, double mu0, double a);

enum class AlphaRule { KPlusOne, EpochFloor, Uniform };

double alpha_weight(AlphaRule rule, long k, int T);

/// Categorical draw with P(k) = alpha_k / sum(alpha).
Index sample_output_index(const std::vector<double>& alphas, Rng& rng);

enum class RunMode { Exact, Inexact, Stochastic, Svrg, Convex, StronglyConvex };
enum class SubsolverKind { Ipm, FirstOrder, ScadSpecial };

struct RunConfig {
    RunMode mode = RunMode::Exact;
    SubsolverKind subsolver = SubsolverKind::FirstOrder;
    int K = 100;
    AlphaRule alpha_rule = AlphaRule::KPlusOne;
    std::uint64_t seed = 0;
    // stochastic (0 = policy default: gamma = L0, beta = L0/2, b_k = K+1)
    double gamma_k = 0.0;
    double beta_k = 0.0;
    int b_k = 0;
    // svrg (0 = policy default: T = ceil(sqrt(n)), b = 8T)
    int T = 0;
    int b = 0;
    // strongly convex
    double sc_a = 0.5;
    // inexact mode: eps_k = eps_scale * min_i delta_i^k
    double eps_scale = 0.5;
    // convex / strongly convex modes may also solve subproblems inexactly;
    // the strongly convex rule is 2 eps_k <= a (1 - rho) rho^k ||eta - eta0||
    bool inexact_subsolves = false;
    // lower bound on psi_0^* for B^k; -inf switches to the running-min proxy
    double psi0_lower_bound = -kInf;
    double ipm_eps = 1e-10;
    bool strict = true;          // throw on invariant violation instead of recording
    bool keep_iterates = false;  // store x^k in every record
    bool measure_time = false;   // wall-clock in trace rows (off: deterministic zeros)
};

struct IterateRecord {
    long k = 0;
    double obj = 0.0;  // psi_0(x^k)
    Vector psi;        // psi(x^k)
    Vector eta_k;
    double step_norm = 0.0;  // ||x^{k+1} - x^k||
    Vector lambda;           // lambda^{k+1}
    double dual_norm = 0.0;
    double kkt_surrogate = 0.0;
    double kkt_exact = 0.0;  // NaN when a chi term is non-separable
    double eps_k = 0.0;
    long grad_full = 0;   // cumulative full-gradient evaluations of f_0
    long grad_stoch = 0;  // cumulative component-gradient evaluations
    int subsolver_iters = 0;
    double time_ms = 0.0;
    Vector x;  // populated only with keep_iterates
};

struct KktReport {
    int type = 1;  // 1 (exact modes) or 2 (inexact mode)
    long sampled_index = 0;
    double stationarity = 0.0;            // exact residual; NaN when unsupported
    double stationarity_surrogate = 0.0;  // 2 (L0 + <lambda, L>) ||step||
    double complementarity = 0.0;         // sum_i lambda_i |psi_i - eta_i| at target levels
    double companion_distance_bound = 0.0;  // type II only: 2 Delta~ / (L0 sum alpha)
};

struct RunResult {
    std::vector<IterateRecord> records;  // k = 0..K
    Vector x_final;                      // x^{K+1}
    double obj_final = 0.0;
    Vector x_hat;  // x^{k_hat + 1}
    long k_hat = 0;
    KktReport report;
    double Bhat = 0.0;  // max dual norm along the path
    double max_chain_violation = 0.0;
    double max_descent_violation = 0.0;
    long grad_full = 0;
    long grad_stoch = 0;
    double min_obj = 0.0;  // running min of psi_0 (lower-bound proxy)
};

/// psi_i^k surrogates anchored at x_k with levels eta_k; the objective is
/// <G_k, x> + (gamma_k/2)||x - x_k||^2 + chi_0. Constraints flagged as
/// concave-smooth get the pure linearization (no quadratic term). With all
/// chi zero the result exports to a diagonal QCQP via completed squares.
MajorizedSubproblem build_subproblem(const ConstrainedProblem& p, const Vector& x_k, const Vector& eta_k,
                                     const Vector& G_k, double gamma_k);

/// Outer loop: LCPG and its stochastic / variance-reduced / convex variants,
/// selected by config.mode.
RunResult lcpg_run(const ConstrainedProblem& p, const RunConfig& cfg, const LevelSchedule& schedule);

/// Mean of b_k component gradients sampled uniformly with replacement.
Vector lcspg_gradient(const SmoothOracle& oracle, const Vector& x, int b_k, Rng& rng);

struct SvrgState {
    Vector G;
    Vector x_prev;
    bool initialized = false;
};

/// Epoch-reset recursive estimator: full gradient when k % T == 0, otherwise
/// G^k = mean_{i in B}[grad F(x^k, i) - grad F(x^{k-1}, i)] + G^{k-1}.
Vector lcsvrg_gradient(SvrgState& state, const SmoothOracle& oracle, const Vector& x, long k, int T, int b,
                       Rng& rng, long* full_evals, long* stoch_evals);

/// Deterministic stationarity surrogate 2 (L0 + <lambda, L>) ||step||.
double kkt_residual_surrogate(double L0, const Vector& L, const Vector& lambda, double step_norm);

/// Squared stochastic surrogate 2 (gamma + L0 + 2 <lambda, L>)^2 ||step||^2
/// (the gradient-noise term is not observable and is excluded).
double kkt_surrogate_sq_stochastic(double gamma_k, double L0, const Vector& L, const Vector& lambda,
                                   double step_norm);

struct ScadSubproblemResult {
    Vector x;
    double lambda = 0.0;
    int iterations = 0;
};

/// Exact solver for the single piecewise-linear SCAD surrogate constraint
///   l1_coef ||x||_1 + <c, x> <= r
/// under a soft-threshold-friendly objective: bisection on the scalar
/// multiplier, with the lambda = 0 shortcut when the plain prox is feasible.
ScadSubproblemResult solve_scad_subproblem(const MajorizedSubproblem& sub);

struct GapTrace {
    std::vector<double> gaps;  // psi_0(x^k) - reference
    double fit_slope = 0.0;    // convex: slope of gap*k vs k; sc: slope of log-gap
    double theory_slope = 0.0; // sc only
    double Bhat = 0.0;
    RunResult run;
};

/// Runs the convex / strongly convex mode and reports per-iterate optimality
/// gaps plus a rate fit against the schedule's theoretical slope.
GapTrace convex_gap_trace(const ConstrainedProblem& p, const RunConfig& cfg, const LevelSchedule& schedule,
                          double reference_value);

/// Trace CSV schema: k, obj, feas_margin_min, step_norm, kkt_surrogate,
/// kkt_exact (blank if unsupported), dual_norm, eps_k, grad_evals_full,
/// grad_evals_stoch, subsolver_iters, time_ms.
void write_trace_csv(std::ostream& os, const RunResult& run);

/// Fixed shortest-roundtrip formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace lcpg
