#pragma once

#include "isee/types.hpp"

#include <variant>
#include <vector>

namespace isee {

/// Piecewise-constant control: values[i] on [breakpoints[i], breakpoints[i+1]),
/// with the last interval closed at the horizon.
struct ControlSignal {
    std::vector<double> breakpoints;  // 0 = b_0 < ... < b_n = T
    std::vector<Vector> values;       // one m-vector per interval

    ControlSignal() = default;
    ControlSignal(std::vector<double> breakpoints_, std::vector<Vector> values_);

    /// Constant-zero control on [0,T] split into n_intervals pieces.
    static ControlSignal zero(double horizon, Eigen::Index dim, std::size_t n_intervals);

    std::size_t intervals() const { return values.size(); }
    Eigen::Index dim() const { return values.empty() ? 0 : values.front().size(); }
    double horizon() const { return breakpoints.back(); }

    std::size_t interval_of(double t) const;
    const Vector& value_at(double t) const { return values[interval_of(t)]; }

    /// Exact integral of ||u1 - u2||^2 over [0,T] for two controls sharing
    /// breakpoints (general case handled by merging breakpoints).
    static double distance_sq(const ControlSignal& a, const ControlSignal& b);

    void validate() const;
};

/// Bounded closed convex constraint set for control values, with Euclidean
/// projection. Box and ball families only.
struct AdmissibleSet {
    struct Box {
        Vector lower;
        Vector upper;
    };
    struct Ball {
        Vector center;
        double radius = 1.0;
    };
    std::variant<Box, Ball> shape;

    static AdmissibleSet box(Vector lower, Vector upper);
    static AdmissibleSet ball(Vector center, double radius);

    Eigen::Index dim() const;
    bool is_singleton() const;
    Vector project_value(const Vector& v) const;
    bool contains(const Vector& v, double tol = 1e-12) const;
    void validate() const;
};

/// Per-interval projection of a control signal onto the admissible set.
/// Idempotent and non-expansive.
ControlSignal project(const AdmissibleSet& set, const ControlSignal& u);

}  // namespace isee
