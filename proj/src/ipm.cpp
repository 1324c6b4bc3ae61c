#include "lcpg/ipm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace lcpg {

double EpigraphForm::gtilde(Index i, const Vector& u) const {
    const Index m = q.m();
    if (i == 0) return q.objective(u.tail(q.dim())) - u[0];
    if (i <= m) return q.constraint_value(i - 1, u.tail(q.dim()));
    return 0.5 * u.squaredNorm() - 0.5 * R * R;
}

Vector EpigraphForm::gtilde_grad(Index i, const Vector& u) const {
    const Index m = q.m();
    const Index d = q.dim();
    Vector g = Vector::Zero(d + 1);
    if (i == 0) {
        g[0] = -1.0;
        g.tail(d) = q.L0 * (u.tail(d) - q.a0);
    } else if (i <= m) {
        const auto& c = q.constraints[static_cast<size_t>(i - 1)];
        g.tail(d) = c.L * (u.tail(d) - c.a);
    } else {
        g = u;
    }
    return g;
}

double EpigraphForm::curvature(Index i) const {
    const Index m = q.m();
    if (i == 0) return q.L0;
    if (i <= m) return q.constraints[static_cast<size_t>(i - 1)].L;
    return 1.0;
}

bool EpigraphForm::interior(const Vector& u) const {
    for (Index i = 0; i < n_lifted(); ++i)
        if (gtilde(i, u) >= 0.0) return false;
    return true;
}

std::pair<EpigraphForm, Vector> build_epigraph(const DiagQcqp& q, const Vector& x_hat, double delta,
                                               double R_config) {
    if (!(delta > 0.0)) throw StructuralError("build_epigraph: delta must be positive");
    if (x_hat.size() != q.dim()) throw StructuralError("build_epigraph: dimension mismatch");
    for (const auto& c : q.constraints)
        if (!(c.L > 0.0)) throw StructuralError("build_epigraph: constraint curvatures must be positive");
    double worst = -kInf;
    for (Index i = 0; i < q.m(); ++i) worst = std::max(worst, q.constraint_value(i, x_hat));
    if (worst > -delta)
        throw SolverError("build_epigraph: x_hat is not delta-strictly feasible (worst slack " +
                          std::to_string(worst) + ")");

    Vector u_hat(q.dim() + 1);
    u_hat[0] = q.objective(x_hat) + delta;
    u_hat.tail(q.dim()) = x_hat;

    double reach = u_hat.norm() + q.a0.norm();
    for (const auto& c : q.constraints) reach += c.a.norm() + std::sqrt(std::max(0.0, 2.0 * c.b / c.L));
    EpigraphForm e;
    e.q = q;
    e.R = std::max(R_config, 4.0 * reach);
    return {e, u_hat};
}

Vector smw_solve(const Matrix& N, const Vector& gamma_diag, const Vector& rhs, bool use_smw) {
    if (gamma_diag.minCoeff() <= 0.0) throw SolverError("smw_solve: Gamma must be positive");
    if (use_smw) {
        if (N.cols() == 0) return rhs.cwiseQuotient(gamma_diag);
        Vector gr = rhs.cwiseQuotient(gamma_diag);
        Matrix GN = gamma_diag.cwiseInverse().asDiagonal() * N;
        Matrix small = Matrix::Identity(N.cols(), N.cols()) + N.transpose() * GN;
        Eigen::LLT<Matrix> llt(small);
        if (llt.info() != Eigen::Success) throw SolverError("smw_solve: small system factorization failed");
        return gr - GN * llt.solve(N.transpose() * gr);
    }
    Matrix H = N * N.transpose();
    H += gamma_diag.asDiagonal();
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) throw SolverError("smw_solve: dense factorization failed");
    return llt.solve(rhs);
}

BarrierHessian::BarrierHessian(const EpigraphForm& e, const Vector& u, const Vector& theta) : d_(e.q.dim()) {
    const Index k = e.n_lifted();
    N_.resize(d_ + 1, k);
    gamma_x_ = 0.0;
    for (Index i = 0; i < k; ++i) {
        N_.col(i) = theta[i] * e.gtilde_grad(i, u);
        gamma_x_ += theta[i] * e.curvature(i);
    }
    gamma_top_ = theta[k - 1];  // only the artificial ball curves the eta coordinate
    use_smw_ = e.q.m() < e.q.dim();
    if (use_smw_) {
        // The SMW split amplifies rounding by ||N||^2 / min(Gamma); late on the
        // central path that ratio explodes, so fall back to the dense factor.
        const double rank_scale = N_.colwise().squaredNorm().maxCoeff();
        if (rank_scale > 1e12 * std::min(gamma_top_, gamma_x_)) use_smw_ = false;
    }
    if (use_smw_) {
        Matrix GN = N_;
        GN.row(0) /= gamma_top_;
        GN.bottomRows(d_) /= gamma_x_;
        Matrix small = Matrix::Identity(k, k) + N_.transpose() * GN;
        small_llt_.compute(small);
        if (small_llt_.info() != Eigen::Success) throw SolverError("barrier Hessian: SMW factorization failed");
    } else {
        Matrix H = N_ * N_.transpose();
        H(0, 0) += gamma_top_;
        H.diagonal().tail(d_).array() += gamma_x_;
        dense_llt_.compute(H);
        if (dense_llt_.info() != Eigen::Success) throw SolverError("barrier Hessian: dense factorization failed");
    }
}

Vector BarrierHessian::gamma_diagonal() const {
    Vector g(d_ + 1);
    g[0] = gamma_top_;
    g.tail(d_).setConstant(gamma_x_);
    return g;
}

Vector BarrierHessian::solve(const Vector& rhs) const {
    if (use_smw_) {
        Vector gr = rhs;
        gr[0] /= gamma_top_;
        gr.tail(d_) /= gamma_x_;
        Matrix GN = N_;
        GN.row(0) /= gamma_top_;
        GN.bottomRows(d_) /= gamma_x_;
        return gr - GN * small_llt_.solve(N_.transpose() * gr);
    }
    return dense_llt_.solve(rhs);
}

Matrix BarrierHessian::dense() const {
    Matrix H = N_ * N_.transpose();
    H(0, 0) += gamma_top_;
    H.diagonal().tail(d_).array() += gamma_x_;
    return H;
}

namespace {

Vector compute_theta(const EpigraphForm& e, const Vector& u) {
    Vector theta(e.n_lifted());
    for (Index i = 0; i < e.n_lifted(); ++i) {
        const double gi = e.gtilde(i, u);
        if (gi >= 0.0) throw SolverError("barrier: point is not strictly interior");
        theta[i] = -1.0 / gi;
    }
    return theta;
}

Vector barrier_gradient(const EpigraphForm& e, const Vector& u, const Vector& theta) {
    Vector g = Vector::Zero(e.dim_u());
    for (Index i = 0; i < e.n_lifted(); ++i) g += theta[i] * e.gtilde_grad(i, u);
    return g;
}

}  // namespace

BarrierOracle barrier_oracle_linear(const EpigraphForm& e, const Vector& u, const Vector& lin) {
    Vector theta = compute_theta(e, u);
    BarrierHessian H(e, u, theta);
    Vector grad = barrier_gradient(e, u, theta) + lin;
    return {std::move(grad), std::move(H)};
}

BarrierOracle barrier_oracle(const EpigraphForm& e, const Vector& u, double tau) {
    Vector lin = Vector::Zero(e.dim_u());
    lin[0] = tau;
    return barrier_oracle_linear(e, u, lin);
}

double newton_decrement(const EpigraphForm& e, const Vector& u, double tau) {
    BarrierOracle o = barrier_oracle(e, u, tau);
    return std::sqrt(std::max(0.0, o.gradient.dot(o.hessian.solve(o.gradient))));
}

NewtonResult damped_newton(const EpigraphForm& e, const Vector& u0, const Vector& lin, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw StructuralError("damped_newton: kappa must lie in (0,1)");
    Vector u = u0;
    NewtonResult res;
    for (int it = 0; it < 500; ++it) {
        BarrierOracle o = barrier_oracle_linear(e, u, lin);
        Vector dir = o.hessian.solve(o.gradient);
        const double n = std::sqrt(std::max(0.0, o.gradient.dot(dir)));
        res.decrement = n;
        if (n <= kappa) {
            res.u = std::move(u);
            return res;
        }
        double step = 1.0 / (1.0 + n);
        Vector next = u - step * dir;
        int halvings = 0;
        while (!e.interior(next)) {
            if (++halvings > 60) throw SolverError("damped_newton: could not restore interiority");
            step *= 0.5;
            next = u - step * dir;
        }
        u = std::move(next);
        ++res.steps;
    }
    throw SolverError("damped_newton: iteration limit reached");
}

NewtonResult damped_newton(const EpigraphForm& e, const Vector& u0, double tau, double kappa) {
    Vector lin = Vector::Zero(e.dim_u());
    lin[0] = tau;
    return damped_newton(e, u0, lin, kappa);
}

RecoveredDuals recover_duals(const EpigraphForm& e, const Vector& u, double tau) {
    const Index m = e.q.m();
    const Index d = e.q.dim();
    Vector theta = compute_theta(e, u);
    RecoveredDuals out;
    out.raw = theta / tau;
    const double scale = theta[0];  // epigraph multiplier of g~_0
    out.lambda.resize(m);
    for (Index i = 0; i < m; ++i) out.lambda[i] = theta[i + 1] / scale;
    out.lambda_ball = theta[m + 1] / scale;
    const Vector x = u.tail(d);
    Vector r = e.q.L0 * (x - e.q.a0);
    for (Index i = 0; i < m; ++i) {
        const auto& c = e.q.constraints[static_cast<size_t>(i)];
        r += out.lambda[i] * c.L * (x - c.a);
    }
    out.stationarity_residual = r.norm();
    return out;
}

namespace {

/// Equality-KKT Newton on the active set guessed from the barrier duals:
///   grad g_0(x) + sum_{i in A} lambda_i grad g_i(x) = 0,  g_i(x) = 0 (i in A).
/// Quadratic local convergence sharpens the path point to machine accuracy.
/// Returns false (leaving x, lambda untouched) when identification fails.
bool crossover_polish(const DiagQcqp& q, Vector& x, Vector& lambda) {
    const Index d = q.dim();
    const Index m = q.m();
    std::vector<Index> active;
    for (Index i = 0; i < m; ++i)
        if (lambda[i] > std::sqrt(std::max(0.0, -q.constraint_value(i, x))) + 1e-10) active.push_back(i);
    const Index na = static_cast<Index>(active.size());

    Vector xx = x;
    Vector ll(na);
    for (Index a = 0; a < na; ++a) ll[a] = lambda[active[static_cast<size_t>(a)]];
    double res0 = kInf;
    for (int it = 0; it < 50; ++it) {
        Vector F(d + na);
        F.head(d) = q.L0 * (xx - q.a0);
        Matrix J = Matrix::Zero(d + na, d + na);
        double diag = q.L0;
        for (Index a = 0; a < na; ++a) {
            const auto& c = q.constraints[static_cast<size_t>(active[static_cast<size_t>(a)])];
            F.head(d) += ll[a] * c.L * (xx - c.a);
            F[d + a] = 0.5 * c.L * (xx - c.a).squaredNorm() - c.b;
            J.block(0, d + a, d, 1) = c.L * (xx - c.a);
            J.block(d + a, 0, 1, d) = (c.L * (xx - c.a)).transpose();
            diag += ll[a] * c.L;
        }
        J.topLeftCorner(d, d) = diag * Matrix::Identity(d, d);
        const double res = F.norm();
        if (it == 0) res0 = res;
        if (res <= 1e-12 * (1.0 + q.L0 * q.a0.norm())) break;
        if (res > 10.0 * res0 + 1.0) return false;  // diverging: bad active set
        Eigen::PartialPivLU<Matrix> lu(J);
        Vector step = lu.solve(F);
        if (!step.allFinite()) return false;
        xx -= step.head(d);
        ll -= step.tail(na);
    }
    for (Index a = 0; a < na; ++a)
        if (ll[a] < -1e-10) return false;
    for (Index i = 0; i < m; ++i) {
        const bool in_A = std::find(active.begin(), active.end(), i) != active.end();
        if (!in_A && q.constraint_value(i, xx) > 0.0) return false;
    }
    x = xx;
    lambda.setZero();
    for (Index a = 0; a < na; ++a) lambda[active[static_cast<size_t>(a)]] = std::max(0.0, ll[a]);
    return true;
}

}  // namespace

PathFollowingResult solve_path_following(const DiagQcqp& q, const Vector& x_hat, double delta, double eps,
                                         const PathFollowingOptions& opts) {
    if (!(eps > 0.0)) throw StructuralError("solve_path_following: eps must be positive");
    auto [e, u_hat] = build_epigraph(q, x_hat, delta, opts.R_config);
    const double upsilon = e.upsilon();
    const double ratio = 1.0 + opts.gamma / std::sqrt(upsilon);

    PathFollowingStats stats;

    // Phase zero: reverse path-following on <tau*w, u> + phi(u) toward the
    // analytic center, with w = -grad phi(u_hat) so u_hat is central at tau0.
    BarrierState state;
    state.u = u_hat;
    state.tau = opts.tau0;
    state.theta = compute_theta(e, u_hat);
    state.phase = BarrierState::Phase::Zero;
    Vector w = -barrier_gradient(e, u_hat, state.theta);
    {
        const double target = 0.75 * opts.kappa;
        bool centered = false;
        for (int i = 0; i < opts.max_outer; ++i) {
            state.tau /= ratio;
            NewtonResult nr = damped_newton(e, state.u, Vector(state.tau * w), opts.kappa / 2.0);
            state.u = std::move(nr.u);
            stats.newton_steps_phase0 += nr.steps;
            ++stats.outer_phase0;
            if (newton_decrement(e, state.u, 0.0) <= target) {
                centered = true;
                break;
            }
        }
        if (!centered) throw SolverError("solve_path_following: phase zero iteration budget exceeded");
    }

    // Phase one: tau0 = max{tau : n(phi_tau, u) <= kappa}. Since the Hessian
    // is tau-free, n^2 is a quadratic in tau and the maximizer is explicit.
    state.phase = BarrierState::Phase::One;
    {
        BarrierOracle o = barrier_oracle(e, state.u, 0.0);
        Vector e1 = Vector::Zero(e.dim_u());
        e1[0] = 1.0;
        const Vector He1 = o.hessian.solve(e1);
        const Vector Hg = o.hessian.solve(o.gradient);
        const double a = e1.dot(He1);
        const double b = 2.0 * e1.dot(Hg);
        const double c = o.gradient.dot(Hg) - opts.kappa * opts.kappa;
        const double disc = b * b - 4.0 * a * c;
        if (!(disc > 0.0) || !(a > 0.0)) throw SolverError("solve_path_following: phase-one entry failed");
        state.tau = (-b + std::sqrt(disc)) / (2.0 * a);
    }
    const double eps_eff = eps * std::min(1.0, opts.gap_margin);
    const int s = static_cast<int>(std::ceil(std::sqrt(upsilon) / opts.gamma *
                                             std::log(2.0 * upsilon / (state.tau * eps_eff)))) - 1;
    const int cap = std::max(4 * (s + 1) + 100, 200);
    bool certified = 2.0 * upsilon / state.tau <= eps_eff;
    for (int i = 0; i < cap && !certified; ++i) {
        state.tau *= ratio;
        NewtonResult nr = damped_newton(e, state.u, state.tau, opts.kappa);
        state.u = std::move(nr.u);
        stats.newton_steps_phase1 += nr.steps;
        ++stats.outer_phase1;
        certified = 2.0 * upsilon / state.tau <= eps_eff;
    }
    if (!certified) throw SolverError("solve_path_following: phase one iteration budget exceeded");
    state.theta = compute_theta(e, state.u);

    stats.tau_final = state.tau;
    stats.gap_certificate = 2.0 * upsilon / state.tau;

    if (state.u.norm() > 0.75 * e.R)
        throw SolverError("solve_path_following: artificial ball nearly active; increase R_config");

    PathFollowingResult res;
    res.x = state.u.tail(q.dim());
    res.eta = state.u[0];
    res.lambda = recover_duals(e, state.u, state.tau).lambda;
    if (opts.crossover) crossover_polish(q, res.x, res.lambda);
    for (Index i = 0; i < q.m(); ++i) {
        if (q.constraint_value(i, res.x) > 1e-12)
            throw SolverError("solve_path_following: returned point violates original feasibility");
    }
    res.stats = stats;
    return res;
}

}  // namespace lcpg
