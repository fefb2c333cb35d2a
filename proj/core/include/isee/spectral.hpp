#pragma once

#include "isee/types.hpp"

namespace isee {

/// Diagonal generator of the evolution semigroup: the k-th eigenmode evolves
/// as exp(mu_k * t). bound_M is the user-certified uniform bound on the
/// operator norm of T(t) over the working horizon (always >= 1 when any
/// mu_k <= 0, since T(0) = I).
struct SemigroupSpec {
    Vector mu;
    double bound_M = 1.0;

    SemigroupSpec() = default;
    SemigroupSpec(Vector mu_, double bound_M_);

    Eigen::Index dimension() const { return mu.size(); }

    /// Throws ValidationError unless entries are finite, d >= 1, and
    /// bound_M covers sup_{t in [0,horizon]} ||T(t)||.
    void validate(double horizon) const;
};

/// y -> T(t) y, exact per mode. t = 0 returns y unchanged.
SpectralState semigroup_apply(const SemigroupSpec& sg, double t, const SpectralState& y);

/// Per-mode factor vector exp(mu * t); hot paths cache this per step.
Vector semigroup_factors(const SemigroupSpec& sg, double t);

/// sup over t in [0, horizon] of ||T(t)|| = max_k exp(mu_k t). Attained at
/// t = 0 for dissipative spectra, else at t = horizon on the largest mu.
double operator_bound(const SemigroupSpec& sg, double horizon);

/// Norm of the state in H (the eigenbasis is orthonormal).
double h_norm(const SpectralState& y);

}  // namespace isee
