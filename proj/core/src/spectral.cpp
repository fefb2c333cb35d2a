#include "isee/spectral.hpp"

#include <cmath>

namespace isee {

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

SemigroupSpec::SemigroupSpec(Vector mu_, double bound_M_)
    : mu(std::move(mu_)), bound_M(bound_M_) {}

void SemigroupSpec::validate(double horizon) const {
    if (mu.size() < 1) throw ValidationError("semigroup: dimension must be >= 1");
    if (!all_finite(mu)) throw ValidationError("semigroup: mu entries must be finite");
    if (!(horizon > 0.0)) throw ValidationError("semigroup: horizon must be positive");
    if (!(bound_M >= operator_bound(*this, horizon)))
        throw ValidationError("semigroup: bound_M below sup ||T(t)|| on [0,horizon]");
}

SpectralState semigroup_apply(const SemigroupSpec& sg, double t, const SpectralState& y) {
    if (y.size() != sg.mu.size())
        throw ValidationError("semigroup_apply: state dimension mismatch");
    if (t < 0.0) throw ValidationError("semigroup_apply: negative time");
    if (t == 0.0) return y;
    return (sg.mu.array() * t).exp() * y.array();
}

Vector semigroup_factors(const SemigroupSpec& sg, double t) {
    return (sg.mu.array() * t).exp();
}

double operator_bound(const SemigroupSpec& sg, double horizon) {
    if (!(horizon > 0.0)) throw ValidationError("operator_bound: horizon must be positive");
    const double mu_max = sg.mu.maxCoeff();
    return mu_max <= 0.0 ? 1.0 : std::exp(mu_max * horizon);
}

double h_norm(const SpectralState& y) { return y.norm(); }

}  // namespace isee
