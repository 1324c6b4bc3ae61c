#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "lcpg/types.hpp"

namespace lcpg {

/// Diagonal QCQP: minimize (L0/2)||x - a0||^2 subject to
/// (L_i/2)||x - a_i||^2 - b_i <= 0. All curvatures strictly positive.
struct DiagConstraint {
    double L;
    Vector a;
    double b;
};

struct DiagQcqp {
    double L0 = 1.0;
    Vector a0;
    std::vector<DiagConstraint> constraints;

    Index dim() const { return a0.size(); }
    Index m() const { return static_cast<Index>(constraints.size()); }

    double objective(const Vector& x) const { return 0.5 * L0 * (x - a0).squaredNorm(); }
    double constraint_value(Index i, const Vector& x) const {
        const auto& c = constraints[static_cast<size_t>(i)];
        return 0.5 * c.L * (x - c.a).squaredNorm() - c.b;
    }
};

/// Epigraph lift u = (eta, x): minimize e_1^T u subject to
///   g~_0(u) = g_0(x) - eta <= 0,
///   g~_i(u) = g_i(x)       <= 0,  i in [m],
///   g~_{m+1}(u) = ||u||^2/2 - R^2/2 <= 0.
/// The log barrier over these m+2 convex quadratics is self-concordant with
/// parameter upsilon = m + 2.
struct EpigraphForm {
    DiagQcqp q;
    double R = 1.0;

    Index dim_u() const { return q.dim() + 1; }
    Index n_lifted() const { return q.m() + 2; }
    double upsilon() const { return static_cast<double>(q.m() + 2); }

    double gtilde(Index i, const Vector& u) const;
    Vector gtilde_grad(Index i, const Vector& u) const;
    /// Curvature of g~_i as a multiple of the identity on the x block
    /// (g~_{m+1} additionally curves the eta coordinate).
    double curvature(Index i) const;

    /// True when u is strictly interior for every lifted constraint.
    bool interior(const Vector& u) const;
};

struct BarrierState {
    Vector u;
    double tau = 1.0;
    Vector theta;  // theta_i = -1 / g~_i(u), positive on the strict interior
    enum class Phase { Zero, One } phase = Phase::Zero;
};

/// Lifts a diagonal QCQP around a delta-strictly-feasible point x_hat.
/// u_hat = (g_0(x_hat) + delta, x_hat); R dominates every constraint ball so
/// the artificial constraint stays inactive at the optimum.
std::pair<EpigraphForm, Vector> build_epigraph(const DiagQcqp& q, const Vector& x_hat, double delta,
                                               double R_config = 0.0);

/// Solves (N N^T + diag(gamma)) y = rhs either by Sherman-Morrison-Woodbury
/// through the small (cols x cols) system or by dense Cholesky.
Vector smw_solve(const Matrix& N, const Vector& gamma_diag, const Vector& rhs, bool use_smw);

/// Factored Hessian handle for phi(u) = -sum log(-g~_i(u)):
/// H = N N^T + Gamma with N the theta-scaled constraint gradients and Gamma
/// the two-level diagonal (eta coordinate vs x block).
class BarrierHessian {
  public:
    BarrierHessian(const EpigraphForm& e, const Vector& u, const Vector& theta);

    Vector solve(const Vector& rhs) const;
    Matrix dense() const;
    const Matrix& N() const { return N_; }
    Vector gamma_diagonal() const;
    bool smw_branch() const { return use_smw_; }

  private:
    Matrix N_;
    double gamma_top_ = 0.0;
    double gamma_x_ = 0.0;
    bool use_smw_ = true;
    Eigen::LLT<Matrix> small_llt_;
    Eigen::LLT<Matrix> dense_llt_;
    Index d_ = 0;
};

struct BarrierOracle {
    Vector gradient;  // of phi_tau (or the supplied linear term + phi)
    BarrierHessian hessian;
};

/// Gradient and factored Hessian of phi_tau(u) = tau * eta + phi(u).
BarrierOracle barrier_oracle(const EpigraphForm& e, const Vector& u, double tau);

/// Same with a general linear term: <lin, u> + phi(u) (phase-zero auxiliary).
BarrierOracle barrier_oracle_linear(const EpigraphForm& e, const Vector& u, const Vector& lin);

double newton_decrement(const EpigraphForm& e, const Vector& u, double tau);

struct NewtonResult {
    Vector u;
    int steps = 0;
    double decrement = 0.0;
};

/// Damped Newton v <- v - 1/(1+n) H^{-1} grad on <lin, u> + phi(u), run until
/// the decrement drops to kappa. Steps are halved (at most 60 times) if they
/// leave the interior.
NewtonResult damped_newton(const EpigraphForm& e, const Vector& u0, const Vector& lin, double kappa);
NewtonResult damped_newton(const EpigraphForm& e, const Vector& u0, double tau, double kappa);

struct PathFollowingOptions {
    double kappa = 0.25;
    double gamma = 0.25;
    double tau0 = 1.0;
    double R_config = 0.0;
    int max_outer = 100000;
    /// Optional extra path depth: stop at 2*upsilon/tau <= gap_margin * eps.
    double gap_margin = 1.0;
    /// Crossover finish: identify the active set from the barrier duals and
    /// run an equality-KKT Newton to sharpen (x, lambda) past the sqrt(gap)
    /// floor of pure path points. Falls back to the path point on failure.
    bool crossover = true;
};

struct RecoveredDuals {
    Vector lambda;          // multipliers of the original m constraints
    Vector raw;             // 1 / (tau * (-g~_i(u))), i = 0..m+1
    double lambda_ball = 0.0;
    double stationarity_residual = 0.0;  // ||grad g_0(x) + sum lambda_i grad g_i(x)||
};

RecoveredDuals recover_duals(const EpigraphForm& e, const Vector& u, double tau);

struct PathFollowingStats {
    int newton_steps_phase0 = 0;
    int newton_steps_phase1 = 0;
    int outer_phase0 = 0;
    int outer_phase1 = 0;
    double tau_final = 0.0;
    double gap_certificate = 0.0;  // 2 * upsilon / tau_final
};

struct PathFollowingResult {
    Vector x;
    double eta = 0.0;
    Vector lambda;
    PathFollowingStats stats;
};

/// Two-phase path-following barrier method. Requires g_i(x_hat) <= -delta;
/// returns a feasible x with objective gap at most eps (duality-gap
/// certificate 2*upsilon/tau <= eps) and recovered duals.
PathFollowingResult solve_path_following(const DiagQcqp& q, const Vector& x_hat, double delta, double eps,
                                         const PathFollowingOptions& opts = {});

}  // namespace lcpg
