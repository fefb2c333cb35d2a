#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isee/qwiener.hpp"
#include "isee/scenario.hpp"
#include "isee/wellposedness.hpp"

#include <cmath>
#include <vector>

using namespace isee;

namespace {
std::vector<double> uniform_grid(double horizon, std::size_t steps) {
    std::vector<double> g(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        g[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    return g;
}
}  // namespace

TEST_CASE("zero covariance gives zero increments") {
    NoiseSpec ns(Vector::Zero(2));
    const auto path = sample_increments(ns, uniform_grid(1.0, 16), 5, 0);
    CHECK(path.dW.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regeneration is bit-identical") {
    Vector lambda(3);
    lambda << 1.0, 0.5, 0.25;
    NoiseSpec ns(lambda);
    const auto grid = uniform_grid(2.0, 64);
    const auto a = sample_increments(ns, grid, 7, 3);
    const auto b = sample_increments(ns, grid, 7, 3);
    CHECK(a.dW == b.dW);
    const auto c = sample_increments(ns, grid, 7, 4);
    CHECK(a.dW != c.dW);
}

TEST_CASE("increment mean and variance") {
    NoiseSpec ns(Vector::Ones(1));
    const std::size_t n = 100000;
    const auto path = sample_increments(ns, uniform_grid(1000.0, n), 13, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += path.dW(static_cast<Eigen::Index>(i), 0);
        sum_sq += path.dW(static_cast<Eigen::Index>(i), 0) * path.dW(static_cast<Eigen::Index>(i), 0);
    }
    const double dt = 0.01;
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    const double se_mean = std::sqrt(dt / n);
    const double se_var = dt * std::sqrt(2.0 / n);
    CHECK(std::abs(mean) <= 3.0 * se_mean);
    CHECK(std::abs(var - dt) <= 3.0 * se_var);
}

TEST_CASE("disjoint increments are uncorrelated") {
    NoiseSpec ns(Vector::Ones(1));
    const std::size_t n = 100000;
    const auto path = sample_increments(ns, uniform_grid(1000.0, n), 17, 0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; i += 2)
        acc += path.dW(static_cast<Eigen::Index>(i), 0) *
               path.dW(static_cast<Eigen::Index>(i + 1), 0);
    const double dt = 0.01;
    const double corr = acc / (static_cast<double>(n / 2) * dt);
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(n / 2)));
}

TEST_CASE("isometry analytic values") {
    NoiseSpec ns(Vector::Ones(1));
    const auto grid = uniform_grid(1.0, 64);

    SUBCASE("unit integrand") {
        const std::vector<double> chi_sq(64, 1.0);
        const auto report = ito_isometry_check(ns, grid, chi_sq, 20000, 3);
        CHECK(report.analytic == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(report.z_score <= 3.0);
    }
    SUBCASE("null integrand") {
        const std::vector<double> chi_sq(64, 0.0);
        const auto report = ito_isometry_check(ns, grid, chi_sq, 1000, 3);
        CHECK(report.mc_estimate == 0.0);
        CHECK(report.analytic == 0.0);
        CHECK(report.z_score == 0.0);
    }
    SUBCASE("amplitude two") {
        const std::vector<double> chi_sq(64, 4.0);
        const auto report = ito_isometry_check(ns, grid, chi_sq, 20000, 3);
        CHECK(report.analytic == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(report.z_score <= 3.0);
    }
}

TEST_CASE("isometry across several modes and random integrands") {
    Vector lambda(4);
    lambda << 1.0, 0.5, 0.25, 0.125;
    NoiseSpec ns(lambda);
    const auto grid = uniform_grid(0.5, 32);
    std::vector<double> chi_sq(32);
    for (std::size_t i = 0; i < 32; ++i) chi_sq[i] = 0.5 + 0.1 * static_cast<double>(i % 7);
    const auto report = ito_isometry_check(ns, grid, chi_sq, 40000, 11);
    double expected = 0.0;
    for (std::size_t i = 0; i < 32; ++i) expected += chi_sq[i] * (grid[i + 1] - grid[i]);
    CHECK(report.analytic == doctest::Approx(expected).epsilon(1e-12));
    CHECK(report.z_score <= 3.0);
}

TEST_CASE("matrix diffusion increments reproduce the weighted-norm isometry") {
    // Freezing the demo diffusion at one (t, y) and accumulating H * dW over
    // [0,1] must give E||sum||^2 = l20_norm_sq(H) * T: the coefficient-matrix
    // convention and the lambda-weighted norm describe the same operator.
    const ScenarioConfig cfg = example_preset();
    const ProblemSpec spec = build_problem(cfg);
    Vector y = Vector::Zero(spec.state_dim());
    y(0) = 1.5;
    Matrix coeffs(spec.state_dim(), spec.noise.modes());
    spec.h(0.3, y, coeffs);
    const double norm_sq = l20_norm_sq(coeffs, spec.noise);
    REQUIRE(norm_sq > 0.0);

    const auto grid = uniform_grid(1.0, 32);
    const std::size_t n_paths = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        const NoisePath noise = sample_increments(spec.noise, grid, 23, p);
        Vector acc = Vector::Zero(spec.state_dim());
        for (Eigen::Index n = 0; n < noise.steps(); ++n)
            acc += coeffs * noise.dW.row(n).transpose();
        const double v = acc.squaredNorm();
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(n_paths);
    const double var = sum_sq / static_cast<double>(n_paths) - mean * mean;
    const double se = std::sqrt(var / static_cast<double>(n_paths));
    CHECK(std::abs(mean - norm_sq) <= 3.0 * se);
}

TEST_CASE("isometry estimate is thread-count independent") {
    Vector lambda(2);
    lambda << 1.0, 0.25;
    NoiseSpec ns(lambda);
    const auto grid = uniform_grid(1.0, 16);
    const std::vector<double> chi_sq(16, 0.75);
    const auto a = ito_isometry_check(ns, grid, chi_sq, 5000, 21, 1);
    const auto b = ito_isometry_check(ns, grid, chi_sq, 5000, 21, 8);
    CHECK(a.mc_estimate == b.mc_estimate);
    CHECK(a.standard_error == b.standard_error);
    CHECK(a.z_score == b.z_score);
}

TEST_CASE("preconditions") {
    NoiseSpec ns(Vector::Ones(1));
    CHECK_THROWS_AS(sample_increments(ns, {0.0, 0.5, 0.25}, 1, 0), ValidationError);
    CHECK_THROWS_AS(sample_increments(ns, {0.5, 1.0}, 1, 0), ValidationError);
    CHECK_THROWS_AS(ito_isometry_check(ns, {0.0}, {}, 1000, 1), ValidationError);
    CHECK_THROWS_AS(ito_isometry_check(ns, uniform_grid(1.0, 4), {1.0, 1.0, 1.0, 1.0}, 50, 1),
                    ValidationError);
    Vector bad(2);
    bad << 1.0, -0.5;
    CHECK_THROWS_AS(NoiseSpec(bad).validate(), ValidationError);
}
