#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lcpg/prox.hpp"
#include "lcpg/rng.hpp"
#include "lcpg/types.hpp"

namespace lcpg {

struct SmoothEval {
    double value = 0.0;
    Vector gradient;
};

/// Value/gradient oracle for a smooth function, optionally a finite sum of
/// n components whose mean it evaluates. Oracles must be pure functions of
/// their inputs; problems built from them are safely shareable.
struct SmoothOracle {
    Index dim = 0;
    Index n_components = 0;  // 0 = monolithic
    std::function<SmoothEval(const Vector&)> eval;
    std::function<SmoothEval(Index, const Vector&)> component_eval;

    SmoothEval operator()(const Vector& x) const {
        if (x.size() != dim) throw StructuralError("SmoothOracle: input dimension mismatch");
        return eval(x);
    }

    SmoothEval component(Index i, const Vector& x) const {
        if (!component_eval) throw StructuralError("SmoothOracle: no component oracle");
        return component_eval(i, x);
    }
};

SmoothOracle constant_oracle(Index dim, double value);
SmoothOracle quadratic_oracle(double curvature, Vector center, double offset = 0.0);
SmoothOracle linear_oracle(Vector slope, double offset = 0.0);

/// Composite psi = f + chi with the gradient Lipschitz modulus of f.
/// concave_smooth marks f as concave, so its linearization alone majorizes
/// it and subproblems may drop the quadratic term (SCAD surrogate path).
struct Composite {
    SmoothOracle smooth;
    ProxTerm chi = ProxTerm::zero();
    double lipschitz = 0.0;
    bool concave_smooth = false;

    double value(const Vector& x) const { return smooth(x).value + chi.value(x); }
};

/// Constrained problem: minimize psi_0 subject to psi_i(x) <= eta_i, with
/// target levels eta, initial levels eta0 and a strictly feasible x0.
/// Construction enforces eta0 < eta componentwise and psi(x0) < eta0
/// strictly (tolerance 0); later runtime feasibility checks use 1e-9.
class ConstrainedProblem {
  public:
    enum class Mode { Nonconvex, Convex, StronglyConvex };

    ConstrainedProblem(Composite objective, std::vector<Composite> constraints, Vector eta, Vector eta0,
                       Vector x0, double mu0 = 0.0, Mode mode = Mode::Nonconvex);

    const Composite& objective() const { return objective_; }
    const std::vector<Composite>& constraints() const { return constraints_; }
    const Vector& eta() const { return eta_; }
    const Vector& eta0() const { return eta0_; }
    const Vector& x0() const { return x0_; }
    double mu0() const { return mu0_; }
    Mode mode() const { return mode_; }
    Index dim() const { return x0_.size(); }
    Index n_constraints() const { return static_cast<Index>(constraints_.size()); }

    /// Vector of constraint curvatures L = (L_1, ..., L_m).
    Vector constraint_lipschitz() const;

  private:
    Composite objective_;
    std::vector<Composite> constraints_;
    Vector eta_, eta0_, x0_;
    double mu0_;
    Mode mode_;
};

/// psi(x): componentwise constraint values f_i(x) + chi_i(x).
Vector evaluate_constraints(const ConstrainedProblem& problem, const Vector& x);

struct FeasibilityReport {
    Vector margins;      // eta0_i - psi_i(x0)
    bool levels_ok = true;  // eta0 < eta componentwise
    bool pass = false;
};

FeasibilityReport validate_strict_feasibility(const ConstrainedProblem& problem);

/// Raw-data variant for inputs that may fail the strict-feasibility
/// requirements (construction of ConstrainedProblem rejects those outright).
FeasibilityReport validate_strict_feasibility(const std::vector<Composite>& constraints, const Vector& eta,
                                              const Vector& eta0, const Vector& x0);

struct LipschitzCheck {
    bool pass = false;
    double worst_ratio = 0.0;
};

/// Samples point pairs uniformly in a ball around x0 and compares gradient
/// difference quotients against the claimed modulus L.
LipschitzCheck check_lipschitz(const SmoothOracle& oracle, double L, int n_samples, double radius,
                               const Vector& x0, std::uint64_t seed);

/// dist(0, d_x Lagrangian(x, lambda)) computed exactly through coordinatewise
/// subgradient intervals. Requires every chi term to be separable.
double kkt_residual_exact(const ConstrainedProblem& problem, const Vector& x, const Vector& lambda);

/// True when all chi terms (objective and constraints) are separable, i.e.
/// the exact KKT residual is available.
bool kkt_exact_supported(const ConstrainedProblem& problem);

}  // namespace lcpg
