#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "isee/picard.hpp"
#include "isee/scenario.hpp"
#include "isee/wellposedness.hpp"

#include <cmath>

using namespace isee;
using namespace isee::testing;

namespace {

/// Contraction scenario: M = 1, T = 0.25, Lt_g = Lt_h = 0.01, one trivial
/// impulse (N = 1), so k = max{k1, k2} = 0.085.
ProblemSpec contraction_spec(Eigen::Index d = 4) {
    ProblemSpec spec = base_spec(Vector::Constant(d, -1.0), 0.25, Vector::Ones(d));
    ImpulseEvent ev;
    ev.time = 0.125;
    ev.D = Matrix::Zero(d, d);
    ev.E = Matrix::Identity(d, 1);
    ev.v = Vector::Constant(1, 0.2);
    spec.impulses.push_back(std::move(ev));
    spec.B = Matrix::Identity(d, 1);
    spec.g = [](double, const SpectralState& y, Vector& out) { out = 0.1 * y; };
    spec.h = [](double, const SpectralState& y, Matrix& out) {
        out.setZero();
        out.col(0) = 0.1 * y;
    };
    spec.noise = NoiseSpec(Vector::Ones(1));
    return spec;
}

std::vector<NoisePath> ensemble(const ProblemSpec& spec, const std::vector<double>& grid,
                                std::size_t n_paths, std::uint64_t seed) {
    std::vector<NoisePath> out;
    out.reserve(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p)
        out.push_back(sample_increments(spec.noise, grid, seed, p));
    return out;
}

}  // namespace

TEST_CASE("iterate-independent map is fixed after one sweep") {
    ProblemSpec spec = base_spec(Vector::Constant(2, -0.5), 1.0, Vector::Ones(2));
    spec.B = Matrix::Identity(2, 1);
    const auto grid = uniform_grid(1.0, 32);
    ControlSignal u = ControlSignal::zero(1.0, 1, 4);
    u.values[1](0) = 0.7;
    const auto noise = ensemble(spec, grid, 8, 3);
    const auto result = picard_solve(spec, u, noise, spec.y0, 1e-12, 10);
    CHECK(result.converged);
    REQUIRE(result.distances.size() >= 2);
    CHECK(result.distances[0] > 0.0);
    CHECK(result.distances[1] == 0.0);
}

TEST_CASE("fixed point equals the explicit recursion") {
    ProblemSpec spec = contraction_spec();
    const auto grid = make_grid(spec.horizon, 64, spec.impulses);
    ControlSignal u = ControlSignal::zero(spec.horizon, 1, 2);
    u.values[0](0) = 0.5;
    const auto noise = ensemble(spec, grid, 16, 5);
    const auto result = picard_solve(spec, u, noise, spec.y0, 1e-26, 60);
    CHECK(result.converged);
    double worst = 0.0;
    for (std::size_t p = 0; p < noise.size(); ++p) {
        const Path direct = simulate_path(spec, u, noise[p]);
        for (std::size_t n = 0; n < grid.size(); ++n)
            worst = std::max(worst,
                             (direct.states[n] - result.paths[p].states[n]).norm());
        for (std::size_t k = 0; k < direct.plus_states.size(); ++k)
            worst = std::max(
                worst, (direct.plus_states[k] - result.paths[p].plus_states[k]).norm());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("contraction rate respects the theorem constant") {
    ProblemSpec spec = contraction_spec();
    const LipschitzBundle lb{0.01, 0.01, 0.01, 0.01};
    const auto report = theorem2_check(spec, lb);
    REQUIRE(report.verdict_thm2);
    const double k = report.k_thm2;
    CHECK(k == doctest::Approx(0.085).epsilon(1e-12));

    const auto grid = make_grid(spec.horizon, 64, spec.impulses);
    const auto noise = ensemble(spec, grid, 256, 7);
    const auto result =
        picard_solve(spec, ControlSignal::zero(spec.horizon, 1, 2), noise, spec.y0, 1e-8, 20);
    CHECK(result.converged);
    const auto summary = contraction_ratio(result.distances);
    CHECK(summary.tail_max <= k + 0.1);

    // theorem-derived sweep bound: d_n <= d_1 k^{n-1}
    const double d0 = result.distances.front();
    const double bound =
        std::ceil(std::log(1e-8 / d0) / std::log(k)) + 2.0;
    CHECK(static_cast<double>(result.sweeps) <= bound + 1.0);
}

TEST_CASE("distances are non-increasing under contraction across seeds") {
    ProblemSpec spec = contraction_spec();
    const auto grid = make_grid(spec.horizon, 32, spec.impulses);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto noise = ensemble(spec, grid, 32, seed);
        const auto result = picard_solve(spec, ControlSignal::zero(spec.horizon, 1, 2),
                                         noise, spec.y0, 1e-12, 25);
        for (std::size_t i = 1; i + 1 < result.distances.size(); ++i)
            CHECK(result.distances[i + 1] <= result.distances[i]);
    }
}

TEST_CASE("contraction ratios") {
    SUBCASE("geometric sequence") {
        const auto summary = contraction_ratio({1.0, 0.1, 0.01});
        REQUIRE(summary.ratios.size() == 2);
        CHECK(summary.ratios[0] == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(summary.ratios[1] == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(summary.tail_max == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("all-zero distances") {
        const auto summary = contraction_ratio({0.0, 0.0, 0.0});
        CHECK(summary.ratios.empty());
        CHECK(summary.tail_max == 0.0);
    }
    SUBCASE("zero after the first step") {
        const auto summary = contraction_ratio({0.5, 0.0, 0.0});
        REQUIRE(summary.ratios.size() == 1);
        CHECK(summary.tail_max == 0.0);
    }
    SUBCASE("needs three distances") {
        CHECK_THROWS_AS(contraction_ratio({1.0, 0.5}), ValidationError);
    }
}

TEST_CASE("preconditions") {
    ProblemSpec spec = contraction_spec();
    const auto grid = make_grid(spec.horizon, 16, spec.impulses);
    const auto noise = ensemble(spec, grid, 4, 1);
    const ControlSignal u = ControlSignal::zero(spec.horizon, 1, 2);
    CHECK_THROWS_AS(picard_solve(spec, u, noise, spec.y0, 1e-8, 0), ValidationError);
    CHECK_THROWS_AS(picard_solve(spec, u, noise, spec.y0, 0.0, 5), ValidationError);
    CHECK_THROWS_AS(picard_solve(spec, u, {}, spec.y0, 1e-8, 5), ValidationError);
}

TEST_CASE("non-convergence is reported, not thrown") {
    // Expanding map: huge Lipschitz drift, far outside the contraction regime.
    ProblemSpec spec = base_spec(Vector::Constant(1, 0.0), 1.0, Vector::Ones(1));
    spec.g = [](double, const SpectralState& y, Vector& out) { out = 25.0 * y; };
    const auto grid = uniform_grid(1.0, 64);
    const auto noise = ensemble(spec, grid, 4, 2);
    const auto result =
        picard_solve(spec, ControlSignal::zero(1.0, 1, 1), noise, spec.y0, 1e-12, 6);
    CHECK_FALSE(result.converged);
    CHECK(result.sweeps == 6);
    CHECK(result.distances.size() == 6);
    CHECK(result.distances.back() > 0.0);
}

TEST_CASE("demo preset iteration also lands on the explicit recursion") {
    // The preset violates the uniqueness gate (k = 1.6), yet the discretized
    // frozen-argument map still contracts empirically; its limit must agree
    // with simulate_path by the same-quadrature identity.
    const ScenarioConfig cfg = example_preset();
    const ProblemSpec spec = build_problem(cfg);
    const ControlSignal u = initial_control(cfg);
    const auto grid = build_grid(cfg, 64);
    std::vector<NoisePath> noise;
    for (std::size_t p = 0; p < 8; ++p)
        noise.push_back(sample_increments(spec.noise, grid, 13, p));
    const auto result = picard_solve(spec, u, noise, spec.y0, 1e-26, 80);
    CHECK(result.converged);
    double worst = 0.0;
    for (std::size_t p = 0; p < noise.size(); ++p) {
        const Path direct = simulate_path(spec, u, noise[p]);
        for (std::size_t n = 0; n < grid.size(); ++n)
            worst = std::max(worst,
                             (direct.states[n] - result.paths[p].states[n]).norm());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("sweep results do not depend on the thread count") {
    ProblemSpec spec = contraction_spec();
    const auto grid = make_grid(spec.horizon, 32, spec.impulses);
    const auto noise = ensemble(spec, grid, 64, 11);
    const ControlSignal u = ControlSignal::zero(spec.horizon, 1, 2);
    const auto a = picard_solve(spec, u, noise, spec.y0, 1e-10, 15, 1);
    const auto b = picard_solve(spec, u, noise, spec.y0, 1e-10, 15, 8);
    REQUIRE(a.distances.size() == b.distances.size());
    for (std::size_t i = 0; i < a.distances.size(); ++i)
        CHECK(a.distances[i] == b.distances[i]);
}
