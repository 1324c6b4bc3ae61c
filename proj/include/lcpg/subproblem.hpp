#pragma once

#include <optional>
#include <vector>

#include "lcpg/ipm.hpp"
#include "lcpg/prox.hpp"
#include "lcpg/types.hpp"

namespace lcpg {

/// One majorized constraint of the convex subproblem:
///   value_at_anchor + <gradient, x - anchor> + (curvature/2)||x - anchor||^2
///     + chi(x) <= level.
/// curvature = 0 marks a pure linearization (concave smooth part), as used
/// by the piecewise-linear SCAD surrogate.
struct MajorizedConstraint {
    double value_at_anchor = 0.0;
    Vector gradient;
    double curvature = 0.0;
    ProxTerm chi = ProxTerm::zero();
    double level = 0.0;
};

/// Convex proximal subproblem
///   min <linear, x> + (gamma/2)||x - anchor||^2 + chi0(x)  s.t. constraints,
/// gamma-strongly convex with a strictly feasible anchor.
struct MajorizedSubproblem {
    Vector anchor;
    Vector linear;
    double gamma = 1.0;
    ProxTerm chi0 = ProxTerm::zero();
    std::vector<MajorizedConstraint> constraints;

    Index dim() const { return anchor.size(); }
    Index m() const { return static_cast<Index>(constraints.size()); }

    double objective_value(const Vector& x) const {
        return linear.dot(x) + 0.5 * gamma * (x - anchor).squaredNorm() + chi0.value(x);
    }

    /// phi_i(x) = psi_i^k(x) - eta_i^k (feasible iff <= 0).
    double constraint_value(Index i, const Vector& x) const {
        const auto& c = constraints[static_cast<size_t>(i)];
        double v = c.value_at_anchor + c.gradient.dot(x - anchor) - c.level + c.chi.value(x);
        if (c.curvature > 0.0) v += 0.5 * c.curvature * (x - anchor).squaredNorm();
        return v;
    }
};

/// Canonical engine constraint kept in anchored form (value and gradient at
/// the anchor); this avoids the cancellation that completed squares suffer
/// for nearly linear constraints. Ball indicators are lifted to q = 1
/// quadratics with their own anchored data.
struct CanonicalConstraint {
    double value = 0.0;  // phi(anchor) without the l1 part
    Vector grad;         // smooth gradient at the anchor
    double q = 0.0;      // curvature (0 = linear)
    double l1 = 0.0;     // l1 weight carried by the constraint's chi term
    Index source = -1;   // originating constraint index, -1 for a chi_0 ball
};

struct CanonicalSubproblem {
    Vector anchor;
    Vector linear;
    double gamma = 1.0;
    double l1_weight = 0.0;
    std::vector<CanonicalConstraint> cons;
    Index source_count = 0;

    Index dim() const { return anchor.size(); }
    Index m() const { return static_cast<Index>(cons.size()); }

    double gamma_of(const Vector& lambda) const;
    /// argmin_x of the Lagrangian at fixed lambda (soft-threshold closed form).
    Vector x_of(const Vector& lambda) const;
    double phi(Index j, const Vector& x) const;
    Vector phi_grad(Index j, const Vector& x) const;
    double objective(const Vector& x) const;  // includes the l1 term
    double lagrangian(const Vector& x, const Vector& lambda) const;
    double dual_value(const Vector& lambda) const;  // inf_x L(x, lambda)
    /// Folds canonical multipliers back onto the original constraints.
    Vector fold_lambda(const Vector& lambda) const;
};

/// Rewrites a subproblem into canonical form. Throws UnsupportedError when a
/// chi term falls outside the l1 + ball catalog.
CanonicalSubproblem canonicalize(const MajorizedSubproblem& sub);

/// Completed-square export to a diagonal QCQP; available when the canonical
/// form has no l1 weight and only strictly quadratic constraints.
std::optional<DiagQcqp> to_diag_qcqp(const CanonicalSubproblem& canon);

}  // namespace lcpg
