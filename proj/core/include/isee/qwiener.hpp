#pragma once

#include "isee/types.hpp"

#include <cstdint>
#include <vector>

namespace isee {

/// Trace-class covariance of the driving Wiener process, truncated to J
/// eigenvalues lambda_j >= 0.
struct NoiseSpec {
    Vector lambda;
    double trace = 0.0;

    NoiseSpec() = default;
    explicit NoiseSpec(Vector lambda_);

    Eigen::Index modes() const { return lambda.size(); }
    void validate() const;
};

/// Increments of the truncated Q-Wiener process on a time grid. Row n holds
/// the increments over (grid[n], grid[n+1]]; column j is the coefficient of
/// noise mode j and has variance lambda_j * dt. Bit-identical regeneration
/// from the same (seed, path_index) is part of the contract.
struct NoisePath {
    std::vector<double> grid;
    Matrix dW;  // (grid.size()-1) x J

    Eigen::Index steps() const { return dW.rows(); }
    Eigen::Index modes() const { return dW.cols(); }
};

/// Validates a simulation grid: strictly increasing, starting at 0.
void validate_grid(const std::vector<double>& grid);

NoisePath sample_increments(const NoiseSpec& ns, const std::vector<double>& grid,
                            std::uint64_t seed, std::uint64_t path_index);

/// Monte-Carlo check of E|| int chi dW ||^2 against the analytic value
/// sum_n ||chi(s_n)||^2 dt_n, for a deterministic integrand given by its
/// per-step squared norms (the lambda-weighted Hilbert-Schmidt norm).
struct IsometryReport {
    double mc_estimate = 0.0;
    double analytic = 0.0;
    double standard_error = 0.0;
    double z_score = 0.0;
    std::size_t n_paths = 0;
};

IsometryReport ito_isometry_check(const NoiseSpec& ns, const std::vector<double>& grid,
                                  const std::vector<double>& integrand_sq_norms,
                                  std::size_t n_paths, std::uint64_t seed,
                                  int threads = 0);

}  // namespace isee
