#pragma once

#include <vector>

#include "lcpg/problem.hpp"
#include "lcpg/types.hpp"

namespace lcpg {

/// Structured max-form nonsmooth function g(x) = max_{y in Y} <Ax, y> - p(y)
/// with a prox-friendly set Y and simple p, plus the quantities the
/// smoothing bounds need: y_hat = argmin_{y in Y} ||y||, D_Y = max ||y - y_hat||
/// and the operator norm of A.
struct MaxStructure {
    enum class SetKind { Box, Ball, Simplex };
    enum class PKind { Zero, Linear, DiagQuadratic };

    Matrix A;
    SetKind set_kind = SetKind::Box;
    double box_lo = -1.0, box_hi = 1.0;
    double ball_radius = 1.0;
    PKind p_kind = PKind::Zero;
    Vector p_linear;  // p(y) = <p_linear, y>
    Vector p_diag;    // p(y) = 0.5 * sum_j p_diag_j y_j^2, entries >= 0

    Vector y_hat;
    double D_Y = 0.0;
    double A_norm = 0.0;

    Index range_dim() const { return A.rows(); }
    Index dim() const { return A.cols(); }
};

MaxStructure make_box_structure(Matrix A, double lo, double hi);
MaxStructure make_ball_structure(Matrix A, double radius);
MaxStructure make_simplex_structure(Matrix A);

/// Smoothed composite f^beta = g^beta - h where g^beta adds the proximity
/// term (beta/2)||y - y_hat||^2 inside the max and h is a convex smooth
/// part with modulus L_h.
struct SmoothedComposite {
    MaxStructure structure;
    double beta = 1.0;
    SmoothOracle h;  // empty eval = no convex smooth part
    double L_h = 0.0;

    double L_g_beta() const { return structure.A_norm * structure.A_norm / beta; }
    double L_beta() const { return std::max(L_g_beta(), L_h); }
};

SmoothedComposite make_smoothed(MaxStructure structure, double beta);
SmoothedComposite make_smoothed(MaxStructure structure, double beta, SmoothOracle h, double L_h);

/// beta = 2 nu / D_Y^2; returns +inf (no smoothing needed) when D_Y = 0.
double choose_beta(double nu, double D_Y);

/// Unique maximizer of <Ax, y> - p(y) - (beta/2)||y - y_hat||^2 over Y.
Vector smoothed_argmax(const MaxStructure& s, const Vector& z, double beta);

/// Value and gradient of f^beta at x.
SmoothEval smoothed_eval(const SmoothedComposite& sc, const Vector& x);

/// Exact (unsmoothed) value g(x) via the beta = 0 closed form.
double exact_max_value(const MaxStructure& s, const Vector& x);

/// Exact f(x) = g(x) - h(x).
double exact_value(const SmoothedComposite& sc, const Vector& x);

struct SandwichReport {
    double smoothed = 0.0;
    double gap = 0.0;  // g(x) - g^beta(x)
    bool pass = false;
};

/// Verifies 0 <= g(x) - g^beta(x) <= beta D_Y^2 / 2 at x.
SandwichReport sandwich_check(const SmoothedComposite& sc, const Vector& x);

/// nu-subgradient inequality for a candidate gradient of g at x:
/// g(z) >= g(x) + <grad, z - x> - nu for all probes z.
bool nu_subgradient_holds(const MaxStructure& s, const Vector& x, const Vector& grad, double nu,
                          const std::vector<Vector>& probes);

/// Checks that the smoothed gradient A^T y*(x) is a nu-subgradient of g at x
/// with nu = beta D_Y^2 / 2.
bool nu_subgradient_check(const SmoothedComposite& sc, const Vector& x, const std::vector<Vector>& probes);

/// Projection of w onto the probability simplex, sorted-threshold algorithm
/// with deterministic index ordering.
Vector project_simplex(const Vector& w);

/// Wraps a smoothed composite as a plain smooth oracle (for driver use).
SmoothOracle as_oracle(const SmoothedComposite& sc);

struct SmoothedConstraint {
    SmoothedComposite f;
    ProxTerm chi = ProxTerm::zero();
    double eta = 0.0;
};

/// Problem whose constraints are smoothed max-form composites; the objective
/// smooth part is given directly (smooth it with as_oracle if needed).
struct SmoothedProblem {
    SmoothOracle objective_smooth;
    ProxTerm chi0 = ProxTerm::zero();
    std::vector<SmoothedConstraint> constraints;
};

struct Type3Report {
    double stationarity = 0.0;     // dist(0, smoothed-gradient Lagrangian)
    double complementarity = 0.0;  // sum_i lambda_i |psi_i(x) - eta_i| on the original psi
    double feasibility = 0.0;      // ||[psi(x) - eta]_+||_1 on the original psi
};

Type3Report type3_kkt_report(const SmoothedProblem& problem, const Vector& x, const Vector& lambda, double nu);

}  // namespace lcpg
