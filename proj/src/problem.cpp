#include "lcpg/problem.hpp"

#include <cmath>

namespace lcpg {

SmoothOracle constant_oracle(Index dim, double value) {
    SmoothOracle o;
    o.dim = dim;
    o.eval = [dim, value](const Vector&) { return SmoothEval{value, Vector::Zero(dim)}; };
    return o;
}

SmoothOracle quadratic_oracle(double curvature, Vector center, double offset) {
    SmoothOracle o;
    o.dim = center.size();
    o.eval = [curvature, center = std::move(center), offset](const Vector& x) {
        Vector d = x - center;
        return SmoothEval{0.5 * curvature * d.squaredNorm() + offset, curvature * d};
    };
    return o;
}

SmoothOracle linear_oracle(Vector slope, double offset) {
    SmoothOracle o;
    o.dim = slope.size();
    o.eval = [slope = std::move(slope), offset](const Vector& x) {
        return SmoothEval{slope.dot(x) + offset, slope};
    };
    return o;
}

ConstrainedProblem::ConstrainedProblem(Composite objective, std::vector<Composite> constraints, Vector eta,
                                       Vector eta0, Vector x0, double mu0, Mode mode)
    : objective_(std::move(objective)),
      constraints_(std::move(constraints)),
      eta_(std::move(eta)),
      eta0_(std::move(eta0)),
      x0_(std::move(x0)),
      mu0_(mu0),
      mode_(mode) {
    const Index m = static_cast<Index>(constraints_.size());
    const Index d = x0_.size();
    if (eta_.size() != m || eta0_.size() != m) throw StructuralError("ConstrainedProblem: level vectors must have length m");
    if (objective_.smooth.dim != d) throw StructuralError("ConstrainedProblem: objective dimension mismatch");
    for (const auto& c : constraints_)
        if (c.smooth.dim != d) throw StructuralError("ConstrainedProblem: constraint dimension mismatch");
    if (mu0_ < 0.0) throw StructuralError("ConstrainedProblem: mu0 must be nonnegative");
    for (Index i = 0; i < m; ++i) {
        if (!(eta0_[i] < eta_[i])) throw StructuralError("ConstrainedProblem: eta0 < eta must hold strictly");
        const double psi = constraints_[static_cast<size_t>(i)].value(x0_);
        if (!(psi < eta0_[i])) throw StructuralError("ConstrainedProblem: x0 is not strictly feasible for eta0");
    }
    if (!std::isfinite(objective_.chi.value(x0_)))
        throw StructuralError("ConstrainedProblem: x0 lies outside dom(chi_0)");
}

Vector ConstrainedProblem::constraint_lipschitz() const {
    Vector L(n_constraints());
    for (Index i = 0; i < n_constraints(); ++i) L[i] = constraints_[static_cast<size_t>(i)].lipschitz;
    return L;
}

Vector evaluate_constraints(const ConstrainedProblem& problem, const Vector& x) {
    if (x.size() != problem.dim()) throw StructuralError("evaluate_constraints: dimension mismatch");
    Vector psi(problem.n_constraints());
    for (Index i = 0; i < problem.n_constraints(); ++i)
        psi[i] = problem.constraints()[static_cast<size_t>(i)].value(x);
    return psi;
}

FeasibilityReport validate_strict_feasibility(const std::vector<Composite>& constraints, const Vector& eta,
                                              const Vector& eta0, const Vector& x0) {
    const Index m = static_cast<Index>(constraints.size());
    if (eta.size() != m || eta0.size() != m)
        throw StructuralError("validate_strict_feasibility: level vectors must have length m");
    FeasibilityReport rep;
    rep.margins.resize(m);
    for (Index i = 0; i < m; ++i) {
        if (constraints[static_cast<size_t>(i)].smooth.dim != x0.size())
            throw StructuralError("validate_strict_feasibility: constraint dimension mismatch");
        rep.margins[i] = eta0[i] - constraints[static_cast<size_t>(i)].value(x0);
        if (!(eta0[i] < eta[i])) rep.levels_ok = false;
    }
    rep.pass = rep.levels_ok && (m == 0 || rep.margins.minCoeff() > 0.0);
    return rep;
}

FeasibilityReport validate_strict_feasibility(const ConstrainedProblem& problem) {
    return validate_strict_feasibility(problem.constraints(), problem.eta(), problem.eta0(), problem.x0());
}

LipschitzCheck check_lipschitz(const SmoothOracle& oracle, double L, int n_samples, double radius,
                               const Vector& x0, std::uint64_t seed) {
    if (!(L > 0.0)) throw StructuralError("check_lipschitz: L must be positive");
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Vector x = rng.in_ball(x0, radius);
        Vector y = rng.in_ball(x0, radius);
        while ((x - y).norm() < 1e-12) y = rng.in_ball(x0, radius);
        const double ratio = (oracle(x).gradient - oracle(y).gradient).norm() / (x - y).norm();
        worst = std::max(worst, ratio);
    }
    return {worst <= L * (1.0 + 1e-6), worst};
}

bool kkt_exact_supported(const ConstrainedProblem& problem) {
    if (!problem.objective().chi.separable()) return false;
    for (const auto& c : problem.constraints())
        if (!c.chi.separable()) return false;
    return true;
}

double kkt_residual_exact(const ConstrainedProblem& problem, const Vector& x, const Vector& lambda) {
    if (lambda.size() != problem.n_constraints()) throw StructuralError("kkt_residual_exact: lambda length mismatch");
    if (!kkt_exact_supported(problem)) throw UnsupportedError("kkt_residual_exact: non-separable chi term");
    Vector g = problem.objective().smooth(x).gradient;
    for (Index i = 0; i < problem.n_constraints(); ++i)
        if (lambda[i] != 0.0) g += lambda[i] * problem.constraints()[static_cast<size_t>(i)].smooth(x).gradient;
    double sq = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        Interval iv = subdiff_interval(problem.objective().chi, x, j);
        for (Index i = 0; i < problem.n_constraints(); ++i)
            if (lambda[i] != 0.0)
                iv = iv + subdiff_interval(problem.constraints()[static_cast<size_t>(i)].chi, x, j).scaled(lambda[i]);
        const double dj = dist_to_shifted_interval(g[j], iv);
        sq += dj * dj;
    }
    return std::sqrt(sq);
}

}  // namespace lcpg
