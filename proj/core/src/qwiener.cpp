#include "isee/qwiener.hpp"

#include "isee/parallel.hpp"
#include "isee/rng.hpp"

#include <cmath>
#include <limits>

namespace isee {

NoiseSpec::NoiseSpec(Vector lambda_) : lambda(std::move(lambda_)) {
    trace = lambda.size() > 0 ? lambda.sum() : 0.0;
}

void NoiseSpec::validate() const {
    if (lambda.size() < 1) throw ValidationError("noise: at least one mode required");
    if (!all_finite(lambda)) throw ValidationError("noise: eigenvalues must be finite");
    if ((lambda.array() < 0.0).any())
        throw ValidationError("noise: eigenvalues must be nonnegative");
    if (!std::isfinite(trace) || std::abs(trace - lambda.sum()) > 1e-12)
        throw ValidationError("noise: trace does not match the eigenvalue sum");
}

void validate_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw ValidationError("grid: needs at least two nodes");
    if (grid.front() != 0.0) throw ValidationError("grid: must start at 0");
    for (std::size_t n = 0; n + 1 < grid.size(); ++n)
        if (!(grid[n] < grid[n + 1]))
            throw ValidationError("grid: times must be strictly increasing");
}

NoisePath sample_increments(const NoiseSpec& ns, const std::vector<double>& grid,
                            std::uint64_t seed, std::uint64_t path_index) {
    validate_grid(grid);
    const auto n_steps = static_cast<Eigen::Index>(grid.size() - 1);
    const Eigen::Index J = ns.modes();
    const Vector sqrt_lambda = ns.lambda.array().sqrt();

    NoisePath path;
    path.grid = grid;
    path.dW.resize(n_steps, J);
    const std::uint64_t stream = rng::stream_id(rng::Domain::noise, path_index);
    for (Eigen::Index n = 0; n < n_steps; ++n) {
        const double sqrt_dt = std::sqrt(grid[n + 1] - grid[n]);
        for (Eigen::Index j = 0; j < J; ++j) {
            const std::uint64_t draw = static_cast<std::uint64_t>(n) * J + j;
            path.dW(n, j) = sqrt_lambda(j) * sqrt_dt * rng::normal(seed, stream, draw);
        }
    }
    return path;
}

IsometryReport ito_isometry_check(const NoiseSpec& ns, const std::vector<double>& grid,
                                  const std::vector<double>& integrand_sq_norms,
                                  std::size_t n_paths, std::uint64_t seed, int threads) {
    validate_grid(grid);
    ns.validate();
    if (n_paths < 100) throw ValidationError("ito_isometry_check: n_paths must be >= 100");
    const std::size_t n_steps = grid.size() - 1;
    if (integrand_sq_norms.size() != n_steps)
        throw ValidationError("ito_isometry_check: one integrand value per step required");

    const Eigen::Index J = ns.modes();
    const Vector sqrt_lambda = ns.lambda.array().sqrt();

    // Canonical realization of chi(s_n): the given squared norm spread
    // uniformly over the noise modes, image along one fixed unit vector.
    // The distribution of || int chi dW ||^2 depends only on the norms.
    IsometryReport report;
    report.n_paths = n_paths;
    std::vector<double> amp(n_steps, 0.0);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double c = integrand_sq_norms[n];
        if (c < 0.0) throw ValidationError("ito_isometry_check: negative squared norm");
        report.analytic += c * (grid[n + 1] - grid[n]);
        amp[n] = ns.trace > 0.0 ? std::sqrt(c / ns.trace) : 0.0;
    }
    if (ns.trace == 0.0) {
        for (double c : integrand_sq_norms)
            if (c > 0.0)
                throw ValidationError(
                    "ito_isometry_check: nonzero integrand with zero covariance");
        report.analytic = 0.0;
    }

    std::vector<double> sample(n_paths, 0.0);
    parallel_for(n_paths, threads, [&](std::size_t p) {
        const std::uint64_t stream = rng::stream_id(rng::Domain::noise, p);
        double integral = 0.0;
        for (std::size_t n = 0; n < n_steps; ++n) {
            if (amp[n] == 0.0) continue;
            const double sqrt_dt = std::sqrt(grid[n + 1] - grid[n]);
            double mode_sum = 0.0;
            for (Eigen::Index j = 0; j < J; ++j) {
                const std::uint64_t draw =
                    static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(J) + j;
                mode_sum += sqrt_lambda(j) * rng::normal(seed, stream, draw);
            }
            integral += amp[n] * sqrt_dt * mode_sum;
        }
        sample[p] = integral * integral;
    });

    // Chunked reduction in fixed order, see parallel.hpp.
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t lo = 0; lo < n_paths; lo += kReduceChunk) {
        double s = 0.0, s2 = 0.0;
        const std::size_t hi = std::min(lo + kReduceChunk, n_paths);
        for (std::size_t p = lo; p < hi; ++p) {
            s += sample[p];
            s2 += sample[p] * sample[p];
        }
        sum += s;
        sum_sq += s2;
    }
    const double mean = sum / static_cast<double>(n_paths);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(n_paths) - mean * mean);
    report.mc_estimate = mean;
    report.standard_error = std::sqrt(var / static_cast<double>(n_paths));
    const double deviation = std::abs(report.mc_estimate - report.analytic);
    if (report.standard_error > 0.0)
        report.z_score = deviation / report.standard_error;
    else
        report.z_score = deviation == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return report;
}

}  // namespace isee
