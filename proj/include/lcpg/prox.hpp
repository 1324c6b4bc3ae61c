#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lcpg/types.hpp"

namespace lcpg {

/// Parameters of the folded-concave SCAD building block h_{beta,theta}.
/// theta > 1 keeps the middle-branch denominator 2(theta-1) positive; the
/// induced smoothness modulus of h is 1/(theta-1).
struct ScadParams {
    double beta;
    double theta;

    ScadParams(double beta_, double theta_) : beta(beta_), theta(theta_) {
        if (!(beta > 0.0)) throw StructuralError("ScadParams: beta must be positive");
        if (!(theta > 1.0)) throw StructuralError("ScadParams: theta must exceed 1");
    }

    double smoothness() const { return 1.0 / (theta - 1.0); }
};

double scad_value(double u, const ScadParams& p);
double scad_grad(double u, const ScadParams& p);

/// Catalog of simple convex terms chi: zero, weighted l1, Euclidean-ball
/// indicator, and nonnegative weighted sums of catalog members.
class ProxTerm {
  public:
    enum class Kind { Zero, L1, Ball, WeightedSum };

    static ProxTerm zero() { return ProxTerm(Kind::Zero); }

    static ProxTerm l1(double weight) {
        if (!(weight > 0.0)) throw StructuralError("ProxTerm::l1: weight must be positive");
        ProxTerm t(Kind::L1);
        t.weight_ = weight;
        return t;
    }

    /// Indicator of the ball { x : ||x - center|| <= radius }; an empty
    /// center means the origin in any dimension.
    static ProxTerm ball(double radius, Vector center = Vector()) {
        if (!(radius > 0.0)) throw StructuralError("ProxTerm::ball: radius must be positive");
        ProxTerm t(Kind::Ball);
        t.weight_ = radius;
        t.center_ = std::move(center);
        return t;
    }

    static ProxTerm weighted_sum(std::vector<std::pair<double, ProxTerm>> terms) {
        ProxTerm t(Kind::WeightedSum);
        for (auto& [c, sub] : terms) {
            if (c < 0.0) throw StructuralError("ProxTerm::weighted_sum: coefficients must be >= 0");
            if (c == 0.0) continue;
            t.children_.push_back({c, std::make_shared<ProxTerm>(std::move(sub))});
        }
        return t;
    }

    Kind kind() const { return kind_; }
    double weight() const { return weight_; }  // L1 weight or ball radius
    const Vector& ball_center() const { return center_; }
    const std::vector<std::pair<double, std::shared_ptr<ProxTerm>>>& children() const { return children_; }

    /// Value of the term at x (+inf outside a ball indicator's domain).
    double value(const Vector& x) const;

    /// True when the term admits a coordinatewise-separable subdifferential
    /// (Zero, L1, and scalar-weighted sums thereof).
    bool separable() const;

    bool is_zero() const;

  private:
    explicit ProxTerm(Kind k) : kind_(k) {}

    Kind kind_;
    double weight_ = 0.0;
    Vector center_;
    std::vector<std::pair<double, std::shared_ptr<ProxTerm>>> children_;
};

/// Flattened form of a catalog term: total l1 weight plus at most one ball
/// indicator. Compositions outside this shape have no closed form here.
struct FlatProx {
    double l1_weight = 0.0;
    bool has_ball = false;
    double ball_radius = 0.0;
    Vector ball_center;  // empty = origin
};

/// Flattens a term to l1-plus-ball shape; nullopt when the composition is
/// not representable (e.g. two distinct balls).
std::optional<FlatProx> flatten(const ProxTerm& term);

double soft_threshold(double v, double t);
Vector soft_threshold(const Vector& v, double t);

/// Exact minimizer of term(x) + (gamma/2) ||x - center||^2.
/// Throws UnsupportedError when no closed form exists for the composition;
/// callers fall back to the first-order subsolver's splitting.
Vector prox(const ProxTerm& term, const Vector& center, double gamma);

/// Interval of coordinate-j subgradients of a separable term at x.
Interval subdiff_interval(const ProxTerm& term, const Vector& x, Index j);

}  // namespace lcpg
