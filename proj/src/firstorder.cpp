#include "lcpg/firstorder.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <functional>

namespace lcpg {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

Vector phi_all(const CanonicalSubproblem& c, const Vector& x) {
    Vector p(c.m());
    for (Index j = 0; j < c.m(); ++j) p[j] = c.phi(j, x);
    return p;
}

double feasibility_norm(const Vector& phi) {
    double sq = 0.0;
    for (Index j = 0; j < phi.size(); ++j) sq += pos(phi[j]) * pos(phi[j]);
    return std::sqrt(sq);
}

/// Projected-gradient residual of the dual: zero exactly at a KKT pair.
double pg_residual(const Vector& lambda, const Vector& phi) {
    double r = 0.0;
    for (Index j = 0; j < lambda.size(); ++j) r = std::max(r, std::abs(std::min(lambda[j], -phi[j])));
    return r;
}

/// Projection onto {lambda >= 0} intersected with {||lambda|| <= B}.
Vector project_dual(Vector lambda, double B) {
    for (Index j = 0; j < lambda.size(); ++j) lambda[j] = pos(lambda[j]);
    const double n = lambda.norm();
    if (n > B) lambda *= B / n;
    return lambda;
}

/// Subgradient of phi_j at x restricted to the support of x (the only rows
/// the threshold map responds to): smooth gradient plus l1 * sign(x).
Vector active_subgradient(const CanonicalSubproblem& c, Index j, const Vector& x) {
    Vector g = c.phi_grad(j, x);
    const double w = c.cons[static_cast<size_t>(j)].l1;
    if (w > 0.0) {
        for (Index t = 0; t < x.size(); ++t) g[t] += x[t] > 0.0 ? w : (x[t] < 0.0 ? -w : 0.0);
    }
    return g;
}

struct DualState {
    Vector lambda;
    Vector x;
    Vector phi;
    double pg = kInf;
    double q = -kInf;  // dual value = lagrangian(x_of(lambda), lambda)
};

DualState eval_state(const CanonicalSubproblem& c, Vector lambda) {
    DualState s;
    s.x = c.x_of(lambda);
    s.phi = phi_all(c, s.x);
    s.pg = pg_residual(lambda, s.phi);
    s.lambda = std::move(lambda);
    s.q = c.lagrangian(s.x, s.lambda);
    return s;
}

/// FISTA-style accelerated projected ascent on the concave dual with
/// backtracking and adaptive restart. Stops when should_stop(state) fires.
DualState dual_ascend(const CanonicalSubproblem& c, DualState s, double B, int max_iter,
                      const std::function<bool(const DualState&)>& should_stop, int* iters_used) {
    const Index m = c.m();
    Vector y = s.lambda;
    double t = 1.0;
    double step = 1.0;
    double q_prev = s.q;
    for (int it = 0; it < max_iter; ++it) {
        if (should_stop(s)) break;
        const Vector xg = c.x_of(y);
        const Vector g = phi_all(c, xg);
        const double qy = c.lagrangian(xg, y);
        Vector next;
        for (int bt = 0; bt < 80; ++bt) {
            next = project_dual(y + step * g, B);
            const Vector d = next - y;
            if (c.dual_value(next) >= qy + g.dot(d) - d.squaredNorm() / (2.0 * step) - 1e-300) break;
            step *= 0.5;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        Vector momentum = next + ((t - 1.0) / t_next) * (next - s.lambda);
        DualState ns = eval_state(c, std::move(next));
        if (ns.q < q_prev) {  // adaptive restart
            y = ns.lambda;
            t = 1.0;
        } else {
            y = project_dual(std::move(momentum), B);
            t = t_next;
        }
        q_prev = ns.q;
        s = std::move(ns);
        step *= 1.25;
        if (iters_used) ++*iters_used;
    }
    (void)m;
    return s;
}

/// Active-set semismooth Newton on the dual, quadratically convergent once
/// the active set and soft-threshold support settle. Line search accepts on
/// dual ascent or residual decrease.
DualState newton_refine(const CanonicalSubproblem& c, DualState s, int max_steps, double tol,
                        int* steps_used) {
    const Index m = c.m();
    DualState best = s;
    const bool has_l1 = c.l1_weight > 0.0;
    for (int it = 0; it < max_steps; ++it) {
        if (s.pg <= tol) break;
        const double gl = c.gamma_of(s.lambda);
        std::vector<Index> active;
        const double act = std::max(10.0 * s.pg, 1e-12);
        for (Index j = 0; j < m; ++j)
            if (s.lambda[j] > 0.0 || s.phi[j] > -act) active.push_back(j);
        if (active.empty()) break;  // pg already reflects pure feasibility

        std::vector<Index> support;
        for (Index t = 0; t < s.x.size(); ++t)
            if (!has_l1 || s.x[t] != 0.0) support.push_back(t);

        const Index na = static_cast<Index>(active.size());
        Matrix W(static_cast<Index>(support.size()), na);
        Vector rhs(na);
        for (Index a = 0; a < na; ++a) {
            const Vector g = active_subgradient(c, active[static_cast<size_t>(a)], s.x);
            for (Index t = 0; t < static_cast<Index>(support.size()); ++t)
                W(t, a) = g[support[static_cast<size_t>(t)]];
            rhs[a] = s.phi[active[static_cast<size_t>(a)]];
        }
        Matrix M = W.transpose() * W / gl;
        const double ridge = 1e-13 * (1.0 + M.trace() / static_cast<double>(na));
        M.diagonal().array() += ridge;
        Eigen::LDLT<Matrix> ldlt(M);
        if (ldlt.info() != Eigen::Success) break;
        const Vector da = ldlt.solve(rhs);

        Vector dir = Vector::Zero(m);
        for (Index a = 0; a < na; ++a) dir[active[static_cast<size_t>(a)]] = da[a];

        bool accepted = false;
        double t = 1.0;
        for (int h = 0; h < 40; ++h, t *= 0.5) {
            Vector cand = s.lambda + t * dir;
            for (Index j = 0; j < m; ++j) cand[j] = pos(cand[j]);
            DualState ns = eval_state(c, std::move(cand));
            if (ns.pg < s.pg * (1.0 - 1e-4 * t) || ns.q > s.q || ns.pg <= tol) {
                s = std::move(ns);
                accepted = true;
                break;
            }
        }
        if (steps_used) ++*steps_used;
        if (!accepted) {
            // safeguarded ascent step along the dual gradient
            double gram = 0.0;
            for (Index j = 0; j < m; ++j) gram += active_subgradient(c, j, s.x).squaredNorm();
            const double step = gl / (gram + gl);
            Vector cand = s.lambda + step * s.phi;
            for (Index j = 0; j < m; ++j) cand[j] = pos(cand[j]);
            DualState ns = eval_state(c, std::move(cand));
            if (ns.q <= s.q && ns.pg >= s.pg) break;  // stagnated
            s = std::move(ns);
        }
        if (s.pg < best.pg) best = s;
    }
    if (s.pg < best.pg) best = s;
    return best;
}

Certificate make_certificate(const CanonicalSubproblem& c, const Vector& x, const Vector& lambda,
                             double eps) {
    Certificate cert;
    cert.eps = eps;
    const double q_ref = c.dual_value(lambda);
    cert.objective_gap_bound = c.objective(x) - q_ref;
    cert.feasibility_norm = feasibility_norm(phi_all(c, x));
    cert.lagrangian_gap_bound = c.lagrangian(x, lambda) - q_ref;
    cert.pass = cert.objective_gap_bound <= eps && cert.feasibility_norm <= eps &&
                cert.lagrangian_gap_bound <= eps;
    return cert;
}

double problem_scale(const CanonicalSubproblem& c) {
    double s = 1.0;  // pg residuals live in constraint-value units
    for (Index j = 0; j < c.m(); ++j) s = std::max(s, std::abs(c.cons[static_cast<size_t>(j)].value));
    return s;
}

}  // namespace

Certificate certificate_check(const CanonicalSubproblem& canon, const Vector& x, const Vector& lambda_ref,
                              double eps) {
    if (lambda_ref.size() != canon.m()) throw StructuralError("certificate_check: lambda length mismatch");
    return make_certificate(canon, x, lambda_ref, eps);
}

Certificate certificate_check(const MajorizedSubproblem& sub, const Vector& x, const Vector& lambda_ref,
                              double eps) {
    return certificate_check(canonicalize(sub), x, lambda_ref, eps);
}

double dual_bound_Bk(double psi0_xk, double psi0_lower_bound, const Vector& delta_k) {
    if (delta_k.size() == 0) throw StructuralError("dual_bound_Bk: empty delta");
    const double dmin = delta_k.minCoeff();
    if (!(dmin > 0.0)) throw StructuralError("dual_bound_Bk: delta must be positive componentwise");
    return (psi0_xk - psi0_lower_bound) / dmin;
}

ExactSolveResult solve_exact(const CanonicalSubproblem& canon, const Vector* lambda_warm) {
    ExactSolveResult res;
    const Index m = canon.m();
    if (m == 0) {
        res.x = canon.x_of(Vector());
        res.lambda = Vector::Zero(canon.source_count);
        res.lambda_canonical = Vector();
        res.kkt_residual = 0.0;
        res.iterations = 1;
        return res;
    }
    const double scale = problem_scale(canon);
    const double tol = 1e-13 * scale;
    Vector l0 = lambda_warm && lambda_warm->size() == m ? *lambda_warm : Vector(Vector::Zero(m));
    DualState s = eval_state(canon, project_dual(std::move(l0), kInf));
    int iters = 0;
    for (int round = 0; round < 4 && s.pg > tol; ++round) {
        const double coarse = std::max(tol, 1e-6 * scale * std::pow(1e-3, round));
        s = dual_ascend(canon, std::move(s), kInf, 5000,
                        [coarse](const DualState& st) { return st.pg <= coarse; }, &iters);
        s = newton_refine(canon, std::move(s), 200, tol, &iters);
    }
    if (s.pg > 1e6 * tol)
        throw SolverError("solve_exact: dual Newton stalled at residual " + std::to_string(s.pg));
    res.x = s.x;
    res.lambda = canon.fold_lambda(s.lambda);
    res.lambda_canonical = s.lambda;
    res.kkt_residual = s.pg;
    res.iterations = iters;
    return res;
}

ExactSolveResult solve_exact(const MajorizedSubproblem& sub, const Vector* lambda_warm) {
    return solve_exact(canonicalize(sub), lambda_warm);
}

PdResult pd_solve(const MajorizedSubproblem& sub, double B, double eps, int max_iter) {
    if (!(eps >= 0.0)) throw StructuralError("pd_solve: eps must be nonnegative");
    if (!(B > 0.0)) throw StructuralError("pd_solve: B must be positive");
    CanonicalSubproblem canon = canonicalize(sub);
    const Index m = canon.m();
    PdResult res;

    if (m == 0) {
        res.x = canon.x_of(Vector());
        res.lambda = Vector::Zero(canon.source_count);
        res.lambda_canonical = Vector();
        res.cert = make_certificate(canon, res.x, Vector(), eps);
        res.iterations = 1;
        res.certified = res.cert.pass;
        return res;
    }

    int iters = 0;
    DualState s = eval_state(canon, Vector::Zero(m));
    s = dual_ascend(canon, std::move(s), B, max_iter,
                    [&](const DualState& st) { return make_certificate(canon, st.x, st.lambda, eps).pass; },
                    &iters);

    // polish toward machine precision; only ever improves the certificate
    s = newton_refine(canon, std::move(s), 100, 1e-14 * problem_scale(canon), &iters);
    s.lambda = project_dual(std::move(s.lambda), B);
    s = eval_state(canon, std::move(s.lambda));

    res.x = s.x;
    res.lambda = canon.fold_lambda(s.lambda);
    res.lambda_canonical = s.lambda;
    res.cert = make_certificate(canon, s.x, s.lambda, eps);
    res.iterations = iters;
    res.certified = res.cert.pass;
    return res;
}

}  // namespace lcpg
