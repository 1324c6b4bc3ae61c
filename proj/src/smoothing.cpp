#include "lcpg/smoothing.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace lcpg {

namespace {

double operator_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace

MaxStructure make_box_structure(Matrix A, double lo, double hi) {
    if (!(lo <= hi)) throw StructuralError("make_box_structure: lo must not exceed hi");
    MaxStructure s;
    s.A = std::move(A);
    s.set_kind = MaxStructure::SetKind::Box;
    s.box_lo = lo;
    s.box_hi = hi;
    const Index a = s.A.rows();
    const double yh = std::clamp(0.0, lo, hi);
    s.y_hat = Vector::Constant(a, yh);
    const double reach = std::max(hi - yh, yh - lo);
    s.D_Y = reach * std::sqrt(static_cast<double>(a));
    s.A_norm = operator_norm(s.A);
    return s;
}

MaxStructure make_ball_structure(Matrix A, double radius) {
    if (!(radius > 0.0)) throw StructuralError("make_ball_structure: radius must be positive");
    MaxStructure s;
    s.A = std::move(A);
    s.set_kind = MaxStructure::SetKind::Ball;
    s.ball_radius = radius;
    s.y_hat = Vector::Zero(s.A.rows());
    s.D_Y = radius;
    s.A_norm = operator_norm(s.A);
    return s;
}

MaxStructure make_simplex_structure(Matrix A) {
    MaxStructure s;
    s.A = std::move(A);
    s.set_kind = MaxStructure::SetKind::Simplex;
    const Index a = s.A.rows();
    if (a < 1) throw StructuralError("make_simplex_structure: empty range");
    s.y_hat = Vector::Constant(a, 1.0 / static_cast<double>(a));
    s.D_Y = std::sqrt(1.0 - 1.0 / static_cast<double>(a));
    s.A_norm = operator_norm(s.A);
    return s;
}

SmoothedComposite make_smoothed(MaxStructure structure, double beta) {
    if (!(beta > 0.0)) throw StructuralError("make_smoothed: beta must be positive");
    SmoothedComposite sc;
    sc.structure = std::move(structure);
    sc.beta = beta;
    return sc;
}

SmoothedComposite make_smoothed(MaxStructure structure, double beta, SmoothOracle h, double L_h) {
    SmoothedComposite sc = make_smoothed(std::move(structure), beta);
    sc.h = std::move(h);
    sc.L_h = L_h;
    return sc;
}

double choose_beta(double nu, double D_Y) {
    if (!(nu > 0.0)) throw StructuralError("choose_beta: nu must be positive");
    if (D_Y == 0.0) return kInf;  // degenerate Y: g is already smooth
    return 2.0 * nu / (D_Y * D_Y);
}

Vector project_simplex(const Vector& w) {
    const Index a = w.size();
    std::vector<Index> order(static_cast<size_t>(a));
    std::iota(order.begin(), order.end(), Index(0));
    std::sort(order.begin(), order.end(), [&](Index i, Index j) { return w[i] != w[j] ? w[i] > w[j] : i < j; });
    double cum = 0.0;
    double theta = 0.0;
    Index count = 0;
    for (Index r = 0; r < a; ++r) {
        cum += w[order[static_cast<size_t>(r)]];
        const double cand = (cum - 1.0) / static_cast<double>(r + 1);
        if (w[order[static_cast<size_t>(r)]] - cand > 0.0) {
            theta = cand;
            count = r + 1;
        }
    }
    (void)count;
    Vector y(a);
    for (Index i = 0; i < a; ++i) y[i] = std::max(0.0, w[i] - theta);
    return y;
}

Vector smoothed_argmax(const MaxStructure& s, const Vector& z, double beta) {
    if (!(beta > 0.0)) throw StructuralError("smoothed_argmax: beta must be positive");
    Vector zz = z;
    if (s.p_kind == MaxStructure::PKind::Linear) zz -= s.p_linear;
    switch (s.set_kind) {
        case MaxStructure::SetKind::Box: {
            Vector y(s.range_dim());
            if (s.p_kind == MaxStructure::PKind::DiagQuadratic) {
                for (Index j = 0; j < y.size(); ++j)
                    y[j] = std::clamp((zz[j] + beta * s.y_hat[j]) / (s.p_diag[j] + beta), s.box_lo, s.box_hi);
            } else {
                for (Index j = 0; j < y.size(); ++j) y[j] = std::clamp(s.y_hat[j] + zz[j] / beta, s.box_lo, s.box_hi);
            }
            return y;
        }
        case MaxStructure::SetKind::Ball: {
            if (s.p_kind == MaxStructure::PKind::DiagQuadratic)
                throw UnsupportedError("smoothed_argmax: ball with diagonal-quadratic p");
            Vector w = s.y_hat + zz / beta;
            const double n = w.norm();
            return n <= s.ball_radius ? w : Vector((s.ball_radius / n) * w);
        }
        case MaxStructure::SetKind::Simplex: {
            if (s.p_kind != MaxStructure::PKind::Zero)
                throw UnsupportedError("smoothed_argmax: simplex supports p = 0 only");
            return project_simplex(s.y_hat + zz / beta);
        }
    }
    throw UnsupportedError("smoothed_argmax: unknown set kind");
}

namespace {

double p_value(const MaxStructure& s, const Vector& y) {
    switch (s.p_kind) {
        case MaxStructure::PKind::Zero:
            return 0.0;
        case MaxStructure::PKind::Linear:
            return s.p_linear.dot(y);
        case MaxStructure::PKind::DiagQuadratic:
            return 0.5 * y.cwiseProduct(y).dot(s.p_diag);
    }
    return 0.0;
}

}  // namespace

SmoothEval smoothed_eval(const SmoothedComposite& sc, const Vector& x) {
    const MaxStructure& s = sc.structure;
    const Vector z = s.A * x;
    const Vector y = smoothed_argmax(s, z, sc.beta);
    double value = z.dot(y) - p_value(s, y) - 0.5 * sc.beta * (y - s.y_hat).squaredNorm();
    Vector grad = s.A.transpose() * y;
    if (sc.h.eval) {
        SmoothEval he = sc.h(x);
        value -= he.value;
        grad -= he.gradient;
    }
    return {value, std::move(grad)};
}

double exact_max_value(const MaxStructure& s, const Vector& x) {
    Vector z = s.A * x;
    if (s.p_kind == MaxStructure::PKind::Linear) z -= s.p_linear;
    switch (s.set_kind) {
        case MaxStructure::SetKind::Box: {
            double v = 0.0;
            if (s.p_kind == MaxStructure::PKind::DiagQuadratic) {
                for (Index j = 0; j < z.size(); ++j) {
                    const double dj = s.p_diag[j];
                    const double y = dj > 0.0 ? std::clamp(z[j] / dj, s.box_lo, s.box_hi)
                                              : (z[j] >= 0.0 ? s.box_hi : s.box_lo);
                    v += z[j] * y - 0.5 * dj * y * y;
                }
            } else {
                for (Index j = 0; j < z.size(); ++j) v += std::max(z[j] * s.box_lo, z[j] * s.box_hi);
            }
            return v;
        }
        case MaxStructure::SetKind::Ball:
            return s.ball_radius * z.norm();
        case MaxStructure::SetKind::Simplex:
            return z.maxCoeff();
    }
    throw UnsupportedError("exact_max_value: unknown set kind");
}

double exact_value(const SmoothedComposite& sc, const Vector& x) {
    double v = exact_max_value(sc.structure, x);
    if (sc.h.eval) v -= sc.h(x).value;
    return v;
}

SandwichReport sandwich_check(const SmoothedComposite& sc, const Vector& x) {
    const MaxStructure& s = sc.structure;
    const Vector z = s.A * x;
    const Vector y = smoothed_argmax(s, z, sc.beta);
    const double smoothed = z.dot(y) - p_value(s, y) - 0.5 * sc.beta * (y - s.y_hat).squaredNorm();
    const double gap = exact_max_value(s, x) - smoothed;
    const double cap = 0.5 * sc.beta * s.D_Y * s.D_Y;
    return {smoothed, gap, gap >= -1e-12 && gap <= cap + 1e-9};
}

bool nu_subgradient_holds(const MaxStructure& s, const Vector& x, const Vector& grad, double nu,
                          const std::vector<Vector>& probes) {
    const double gx = exact_max_value(s, x);
    for (const Vector& z : probes) {
        if (exact_max_value(s, z) < gx + grad.dot(z - x) - nu - 1e-9) return false;
    }
    return true;
}

bool nu_subgradient_check(const SmoothedComposite& sc, const Vector& x, const std::vector<Vector>& probes) {
    const MaxStructure& s = sc.structure;
    const Vector y = smoothed_argmax(s, s.A * x, sc.beta);
    const double nu = 0.5 * sc.beta * s.D_Y * s.D_Y;
    return nu_subgradient_holds(s, x, s.A.transpose() * y, nu, probes);
}

SmoothOracle as_oracle(const SmoothedComposite& sc) {
    SmoothOracle o;
    o.dim = sc.structure.dim();
    o.eval = [sc](const Vector& x) { return smoothed_eval(sc, x); };
    return o;
}

Type3Report type3_kkt_report(const SmoothedProblem& problem, const Vector& x, const Vector& lambda, double nu) {
    (void)nu;  // nu enters through the smoothed gradients being nu-subgradients
    const Index m = static_cast<Index>(problem.constraints.size());
    if (lambda.size() != m) throw StructuralError("type3_kkt_report: lambda length mismatch");
    if (lambda.size() > 0 && lambda.minCoeff() < 0.0) throw StructuralError("type3_kkt_report: lambda must be >= 0");

    Vector g = problem.objective_smooth(x).gradient;
    for (Index i = 0; i < m; ++i)
        if (lambda[i] != 0.0) g += lambda[i] * smoothed_eval(problem.constraints[static_cast<size_t>(i)].f, x).gradient;

    if (!problem.chi0.separable()) throw UnsupportedError("type3_kkt_report: non-separable chi_0");
    double sq = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        Interval iv = subdiff_interval(problem.chi0, x, j);
        for (Index i = 0; i < m; ++i) {
            const auto& c = problem.constraints[static_cast<size_t>(i)];
            if (lambda[i] != 0.0) iv = iv + subdiff_interval(c.chi, x, j).scaled(lambda[i]);
        }
        const double dj = dist_to_shifted_interval(g[j], iv);
        sq += dj * dj;
    }

    Type3Report rep;
    rep.stationarity = std::sqrt(sq);
    for (Index i = 0; i < m; ++i) {
        const auto& c = problem.constraints[static_cast<size_t>(i)];
        const double psi = exact_value(c.f, x) + c.chi.value(x);  // original nonsmooth psi
        rep.complementarity += lambda[i] * std::abs(psi - c.eta);
        rep.feasibility += std::max(0.0, psi - c.eta);
    }
    return rep;
}

}  // namespace lcpg
