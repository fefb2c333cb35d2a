#pragma once

#include "isee/dynamics.hpp"

#include <vector>

namespace isee {

/// Successive-approximation solve of the discretized mild-solution equation:
/// sweep n+1 re-integrates with drift/diffusion frozen on iterate n. The
/// fixed point is the explicit recursion computed by simulate_path.
struct PicardResult {
    std::vector<Path> paths;         // final iterate, one per noise realization
    std::vector<double> distances;   // ensemble PC distance between sweeps
    bool converged = false;
    std::size_t sweeps = 0;
};

/// Ensemble distance is sup over grid nodes (left limits plus the stored
/// post-jump states) of the path-mean squared difference. Stops when the
/// distance falls below tol or after max_iter sweeps.
PicardResult picard_solve(const ProblemSpec& spec, const ControlSignal& control,
                          const std::vector<NoisePath>& noise_ensemble,
                          const SpectralState& y_init, double tol, std::size_t max_iter,
                          int threads = 0);

struct ContractionSummary {
    std::vector<double> ratios;  // d_{n+1} / d_n, zero denominators skipped
    double tail_max = 0.0;       // max over the trailing half of ratios
};

ContractionSummary contraction_ratio(const std::vector<double>& distances);

}  // namespace isee
