#include "lcpg/prox.hpp"

#include <cmath>

namespace lcpg {

double scad_value(double u, const ScadParams& p) {
    const double a = std::abs(u);
    if (a <= p.beta) return 0.0;
    if (a <= p.beta * p.theta) {
        const double t = a - p.beta;
        return t * t / (2.0 * (p.theta - 1.0));
    }
    return p.beta * a - (p.theta + 1.0) * p.beta * p.beta / 2.0;
}

double scad_grad(double u, const ScadParams& p) {
    const double a = std::abs(u);
    const double s = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
    if (a <= p.beta) return 0.0;
    if (a <= p.beta * p.theta) return s * (a - p.beta) / (p.theta - 1.0);
    return s * p.beta;
}

double ProxTerm::value(const Vector& x) const {
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::L1:
            return weight_ * x.lpNorm<1>();
        case Kind::Ball: {
            const double d = center_.size() == 0 ? x.norm() : (x - center_).norm();
            return d <= weight_ * (1.0 + 1e-12) + 1e-12 ? 0.0 : kInf;
        }
        case Kind::WeightedSum: {
            double v = 0.0;
            for (const auto& [c, sub] : children_) v += c * sub->value(x);
            return v;
        }
    }
    return 0.0;
}

bool ProxTerm::separable() const {
    switch (kind_) {
        case Kind::Zero:
        case Kind::L1:
            return true;
        case Kind::Ball:
            return false;
        case Kind::WeightedSum:
            for (const auto& [c, sub] : children_)
                if (!sub->separable()) return false;
            return true;
    }
    return false;
}

bool ProxTerm::is_zero() const {
    switch (kind_) {
        case Kind::Zero:
            return true;
        case Kind::L1:
        case Kind::Ball:
            return false;
        case Kind::WeightedSum:
            for (const auto& [c, sub] : children_)
                if (!sub->is_zero()) return false;
            return true;
    }
    return false;
}

namespace {

bool flatten_into(const ProxTerm& term, double coeff, FlatProx& out) {
    switch (term.kind()) {
        case ProxTerm::Kind::Zero:
            return true;
        case ProxTerm::Kind::L1:
            out.l1_weight += coeff * term.weight();
            return true;
        case ProxTerm::Kind::Ball:
            if (out.has_ball) return false;  // two balls do not compose
            out.has_ball = true;
            out.ball_radius = term.weight();
            out.ball_center = term.ball_center();
            return true;
        case ProxTerm::Kind::WeightedSum:
            for (const auto& [c, sub] : term.children())
                if (!flatten_into(*sub, coeff * c, out)) return false;
            return true;
    }
    return false;
}

}  // namespace

std::optional<FlatProx> flatten(const ProxTerm& term) {
    FlatProx out;
    if (!flatten_into(term, 1.0, out)) return std::nullopt;
    return out;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

Vector soft_threshold(const Vector& v, double t) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], t);
    return out;
}

namespace {

Vector project_ball(const Vector& x, double radius, const Vector& center) {
    if (center.size() == 0) {
        const double n = x.norm();
        return n <= radius ? x : Vector((radius / n) * x);
    }
    Vector d = x - center;
    const double n = d.norm();
    return n <= radius ? x : Vector(center + (radius / n) * d);
}

}  // namespace

Vector prox(const ProxTerm& term, const Vector& center, double gamma) {
    if (!(gamma > 0.0)) throw StructuralError("prox: gamma must be positive");
    auto flat = flatten(term);
    if (!flat) throw UnsupportedError("prox: no closed-form prox for this composition");
    Vector x = flat->l1_weight > 0.0 ? soft_threshold(center, flat->l1_weight / gamma) : center;
    if (flat->has_ball) {
        // soft-threshold-then-project is exact only for origin-centered balls
        if (flat->l1_weight > 0.0 && flat->ball_center.size() != 0 && flat->ball_center.norm() > 0.0)
            throw UnsupportedError("prox: l1 + off-origin ball has no closed-form prox");
        x = project_ball(x, flat->ball_radius, flat->ball_center);
    }
    return x;
}

Interval subdiff_interval(const ProxTerm& term, const Vector& x, Index j) {
    switch (term.kind()) {
        case ProxTerm::Kind::Zero:
            return {0.0, 0.0};
        case ProxTerm::Kind::L1: {
            const double w = term.weight();
            if (x[j] > 0.0) return {w, w};
            if (x[j] < 0.0) return {-w, -w};
            return {-w, w};
        }
        case ProxTerm::Kind::Ball:
            throw UnsupportedError("subdiff_interval: ball indicator is not separable");
        case ProxTerm::Kind::WeightedSum: {
            Interval acc{0.0, 0.0};
            for (const auto& [c, sub] : term.children()) acc = acc + subdiff_interval(*sub, x, j).scaled(c);
            return acc;
        }
    }
    return {0.0, 0.0};
}

}  // namespace lcpg
