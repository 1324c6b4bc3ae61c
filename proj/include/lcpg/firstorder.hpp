#pragma once

#include "lcpg/subproblem.hpp"
#include "lcpg/types.hpp"

namespace lcpg {

/// Subproblem solution certificate: the three inexactness bounds, each
/// conservative (pass implies the corresponding true inequality).
///   objective_gap_bound  >= psi0^k(x) - psi0^k(x~)   (via the dual lower bound)
///   feasibility_norm      = ||[psi^k(x) - eta^k]_+||  (exact)
///   lagrangian_gap_bound >= L_k(x, lambda) - inf_z L_k(z, lambda)
struct Certificate {
    double eps = 0.0;
    double objective_gap_bound = 0.0;
    double feasibility_norm = 0.0;
    double lagrangian_gap_bound = 0.0;
    bool pass = false;
};

/// Evaluates the certificate at (x, lambda_ref) where lambda_ref lives in the
/// canonical constraint space of the subproblem.
Certificate certificate_check(const MajorizedSubproblem& sub, const Vector& x, const Vector& lambda_ref,
                              double eps);
Certificate certificate_check(const CanonicalSubproblem& canon, const Vector& x, const Vector& lambda_ref,
                              double eps);

/// B^k = (psi_0(x^k) - lower bound on psi_0^*) / min_i delta_i^k.
double dual_bound_Bk(double psi0_xk, double psi0_lower_bound, const Vector& delta_k);

struct PdResult {
    Vector x;
    Vector lambda;            // folded back onto the original constraints
    Vector lambda_canonical;  // multipliers of the canonical constraints
    Certificate cert;
    int iterations = 0;
    bool certified = false;
};

/// Inexact primal-dual solver: accelerated dual ascent on the concave dual
/// q(lambda) = inf_x L(x, lambda) (the inner minimizer is a closed-form
/// soft-threshold), projected onto {lambda >= 0, ||lambda|| <= B}, followed
/// by a semismooth Newton polish. Certifies the output at the requested eps.
PdResult pd_solve(const MajorizedSubproblem& sub, double B, double eps, int max_iter = 50000);

struct ExactSolveResult {
    Vector x;
    Vector lambda;
    Vector lambda_canonical;
    double kkt_residual = 0.0;  // projected-gradient residual of the dual
    int iterations = 0;
};

/// Solves the subproblem to machine precision: active-set semismooth Newton
/// on the dual with an accelerated-ascent fallback. A warm-start multiplier
/// (canonical space) cuts this to a handful of steps.
ExactSolveResult solve_exact(const MajorizedSubproblem& sub, const Vector* lambda_warm = nullptr);
ExactSolveResult solve_exact(const CanonicalSubproblem& canon, const Vector* lambda_warm = nullptr);

}  // namespace lcpg
