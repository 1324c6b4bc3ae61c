#include "lcpg/subproblem.hpp"

#include <cmath>

namespace lcpg {

double CanonicalSubproblem::gamma_of(const Vector& lambda) const {
    double g = gamma;
    for (Index j = 0; j < m(); ++j) g += lambda[j] * cons[static_cast<size_t>(j)].q;
    return g;
}

Vector CanonicalSubproblem::x_of(const Vector& lambda) const {
    const double gl = gamma_of(lambda);
    Vector slope = linear;
    double w = l1_weight;
    for (Index j = 0; j < m(); ++j) {
        const auto& c = cons[static_cast<size_t>(j)];
        slope += lambda[j] * c.grad;
        w += lambda[j] * c.l1;
    }
    Vector v = anchor - slope / gl;
    return w > 0.0 ? soft_threshold(v, w / gl) : v;
}

double CanonicalSubproblem::phi(Index j, const Vector& x) const {
    const auto& c = cons[static_cast<size_t>(j)];
    double v = c.value + c.grad.dot(x - anchor);
    if (c.q > 0.0) v += 0.5 * c.q * (x - anchor).squaredNorm();
    if (c.l1 > 0.0) v += c.l1 * x.lpNorm<1>();
    return v;
}

Vector CanonicalSubproblem::phi_grad(Index j, const Vector& x) const {
    const auto& c = cons[static_cast<size_t>(j)];
    return c.q > 0.0 ? Vector(c.grad + c.q * (x - anchor)) : c.grad;
}

double CanonicalSubproblem::objective(const Vector& x) const {
    double v = linear.dot(x) + 0.5 * gamma * (x - anchor).squaredNorm();
    if (l1_weight > 0.0) v += l1_weight * x.lpNorm<1>();
    return v;
}

double CanonicalSubproblem::lagrangian(const Vector& x, const Vector& lambda) const {
    double v = objective(x);
    for (Index j = 0; j < m(); ++j) v += lambda[j] * phi(j, x);
    return v;
}

double CanonicalSubproblem::dual_value(const Vector& lambda) const {
    return lagrangian(x_of(lambda), lambda);
}

Vector CanonicalSubproblem::fold_lambda(const Vector& lambda) const {
    Vector out = Vector::Zero(source_count);
    for (Index j = 0; j < m(); ++j) {
        const Index src = cons[static_cast<size_t>(j)].source;
        if (src >= 0) out[src] += lambda[j];
    }
    return out;
}

namespace {

CanonicalConstraint ball_constraint(const Vector& anchor, const FlatProx& flat, Index source) {
    CanonicalConstraint ball;
    Vector rel = flat.ball_center.size() == 0 ? anchor : Vector(anchor - flat.ball_center);
    ball.value = 0.5 * rel.squaredNorm() - 0.5 * flat.ball_radius * flat.ball_radius;
    ball.grad = std::move(rel);
    ball.q = 1.0;
    ball.source = source;
    return ball;
}

}  // namespace

CanonicalSubproblem canonicalize(const MajorizedSubproblem& sub) {
    CanonicalSubproblem c;
    c.anchor = sub.anchor;
    c.linear = sub.linear;
    c.gamma = sub.gamma;
    c.source_count = sub.m();

    auto flat0 = flatten(sub.chi0);
    if (!flat0) throw UnsupportedError("canonicalize: chi_0 outside the l1 + ball catalog");
    c.l1_weight = flat0->l1_weight;
    if (flat0->has_ball) c.cons.push_back(ball_constraint(sub.anchor, *flat0, -1));

    for (Index i = 0; i < sub.m(); ++i) {
        const auto& mc = sub.constraints[static_cast<size_t>(i)];
        auto flat = flatten(mc.chi);
        if (!flat) throw UnsupportedError("canonicalize: constraint chi outside the l1 + ball catalog");
        CanonicalConstraint cc;
        cc.source = i;
        cc.l1 = flat->l1_weight;
        cc.value = mc.value_at_anchor - mc.level;
        cc.grad = mc.gradient;
        cc.q = mc.curvature;
        c.cons.push_back(std::move(cc));
        if (flat->has_ball) c.cons.push_back(ball_constraint(sub.anchor, *flat, i));
    }
    return c;
}

std::optional<DiagQcqp> to_diag_qcqp(const CanonicalSubproblem& canon) {
    if (canon.l1_weight > 0.0) return std::nullopt;
    DiagQcqp q;
    q.L0 = canon.gamma;
    q.a0 = canon.anchor - canon.linear / canon.gamma;
    for (const auto& c : canon.cons) {
        if (c.q <= 0.0 || c.l1 > 0.0) return std::nullopt;
        // complete the square: (q/2)||x - (anchor - g/q)||^2 <= -value + ||g||^2/(2q)
        q.constraints.push_back({c.q, Vector(canon.anchor - c.grad / c.q),
                                 -c.value + c.grad.squaredNorm() / (2.0 * c.q)});
    }
    return q;
}

}  // namespace lcpg
