#pragma once

// Shared scenario builders for the unit and acceptance suites.

#include "isee/dynamics.hpp"
#include "isee/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace isee::testing {

inline DriftFn zero_drift() {
    return [](double, const SpectralState&, Vector& out) { out.setZero(); };
}

inline DiffusionFn zero_diffusion() {
    return [](double, const SpectralState&, Matrix& out) { out.setZero(); };
}

inline std::vector<double> uniform_grid(double horizon, std::size_t steps) {
    std::vector<double> g(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        g[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    g.back() = horizon;
    return g;
}

/// Minimal valid system: diagonal spectrum mu, no impulses, zero drift and
/// diffusion, B = 0, one noise mode.
inline ProblemSpec base_spec(Vector mu, double horizon, Vector y0) {
    ProblemSpec spec;
    const double bound = [&] {
        const double mu_max = mu.maxCoeff();
        return mu_max <= 0.0 ? 1.0 : std::exp(mu_max * horizon);
    }();
    spec.sg = SemigroupSpec(std::move(mu), bound);
    const Eigen::Index d = spec.sg.dimension();
    spec.B = Matrix::Zero(d, 1);
    spec.g = zero_drift();
    spec.h = zero_diffusion();
    spec.noise = NoiseSpec(Vector::Ones(1));
    spec.horizon = horizon;
    spec.y0 = std::move(y0);
    return spec;
}

/// Randomized impulsive system with nonlinear drift/diffusion for identity
/// and determinism tests: d <= 8, up to 4 impulses, bounded coefficients.
inline ProblemSpec random_spec(std::uint64_t seed, std::uint64_t trial) {
    const std::uint64_t stream = rng::stream_id(rng::Domain::mc_aux, trial);
    std::uint64_t draw = 0;
    auto u01 = [&] { return rng::uniform01(seed, stream, draw++); };
    auto gauss = [&] { return rng::normal(seed, stream, draw++); };

    const Eigen::Index d = 2 + static_cast<Eigen::Index>(u01() * 6.999);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(u01() * 2.999);
    const Eigen::Index J = 1 + static_cast<Eigen::Index>(u01() * 2.999);
    const double horizon = 0.5 + u01();

    Vector mu(d);
    for (Eigen::Index i = 0; i < d; ++i) mu(i) = -4.0 * u01();
    ProblemSpec spec;
    spec.sg = SemigroupSpec(std::move(mu), 1.0);
    spec.B = Matrix(d, m);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < m; ++c) spec.B(r, c) = 0.5 * gauss();

    const std::size_t n_imp = static_cast<std::size_t>(u01() * 4.999);
    std::vector<double> times;
    for (std::size_t k = 0; k < n_imp; ++k)
        times.push_back(horizon * (0.1 + 0.8 * u01()));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
        ImpulseEvent ev;
        ev.time = t;
        ev.D = Matrix(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c) ev.D(r, c) = 0.3 * gauss();
        ev.E = Matrix(d, m);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < m; ++c) ev.E(r, c) = 0.5 * gauss();
        ev.v = Vector(m);
        for (Eigen::Index c = 0; c < m; ++c) ev.v(c) = gauss();
        spec.impulses.push_back(std::move(ev));
    }

    const double drift_gain = 0.4 * u01();
    spec.g = [drift_gain](double t, const SpectralState& y, Vector& out) {
        out = (drift_gain * y.array() / (1.0 + y.array().abs()) + 0.1 * std::sin(t)).matrix();
    };
    const double diff_gain = 0.3 * u01();
    spec.h = [diff_gain, J](double t, const SpectralState& y, Matrix& out) {
        out.setZero();
        for (Eigen::Index j = 0; j < J; ++j)
            out.col(j) = diff_gain / (1.0 + static_cast<double>(j)) *
                         (y.array() / (1.0 + y.array().square())).matrix() +
                         Vector::Constant(y.size(), 0.05 * std::cos(t));
    };

    Vector lambda(J);
    for (Eigen::Index j = 0; j < J; ++j) lambda(j) = std::pow(0.5, j);
    spec.noise = NoiseSpec(lambda);
    spec.horizon = horizon;
    spec.y0 = Vector(d);
    for (Eigen::Index i = 0; i < d; ++i) spec.y0(i) = gauss();
    return spec;
}

/// Piecewise-constant control with random admissible-scale values.
inline ControlSignal random_control(const ProblemSpec& spec, std::size_t n_intervals,
                                    std::uint64_t seed, std::uint64_t trial,
                                    double scale = 1.0) {
    ControlSignal u = ControlSignal::zero(spec.horizon, spec.control_dim(), n_intervals);
    const std::uint64_t stream = rng::stream_id(rng::Domain::mc_aux, 1000000 + trial);
    std::uint64_t draw = 0;
    for (auto& v : u.values)
        for (Eigen::Index c = 0; c < v.size(); ++c)
            v(c) = scale * rng::normal(seed, stream, draw++);
    return u;
}

}  // namespace isee::testing
