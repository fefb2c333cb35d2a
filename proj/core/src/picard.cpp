#include "isee/picard.hpp"

#include "isee/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace isee {

namespace {

double ensemble_distance(const std::vector<Path>& a, const std::vector<Path>& b) {
    const std::size_t n_paths = a.size();
    const std::size_t n_nodes = a.front().grid.size();
    const std::size_t n_imp = a.front().plus_states.size();
    double worst = 0.0;
    for (std::size_t n = 0; n < n_nodes; ++n) {
        double sum = 0.0;
        for (std::size_t lo = 0; lo < n_paths; lo += kReduceChunk) {
            double s = 0.0;
            const std::size_t hi = std::min(lo + kReduceChunk, n_paths);
            for (std::size_t p = lo; p < hi; ++p)
                s += (a[p].states[n] - b[p].states[n]).squaredNorm();
            sum += s;
        }
        worst = std::max(worst, sum / static_cast<double>(n_paths));
    }
    for (std::size_t k = 0; k < n_imp; ++k) {
        double sum = 0.0;
        for (std::size_t lo = 0; lo < n_paths; lo += kReduceChunk) {
            double s = 0.0;
            const std::size_t hi = std::min(lo + kReduceChunk, n_paths);
            for (std::size_t p = lo; p < hi; ++p)
                s += (a[p].plus_states[k] - b[p].plus_states[k]).squaredNorm();
            sum += s;
        }
        worst = std::max(worst, sum / static_cast<double>(n_paths));
    }
    return worst;
}

}  // namespace

PicardResult picard_solve(const ProblemSpec& spec, const ControlSignal& control,
                          const std::vector<NoisePath>& noise_ensemble,
                          const SpectralState& y_init, double tol, std::size_t max_iter,
                          int threads) {
    if (!(tol > 0.0)) throw ValidationError("picard: tol must be positive");
    if (max_iter < 1) throw ValidationError("picard: max_iter must be >= 1");
    if (noise_ensemble.empty()) throw ValidationError("picard: empty noise ensemble");
    if (y_init.size() != spec.state_dim())
        throw ValidationError("picard: initial iterate dimension mismatch");
    for (const auto& np : noise_ensemble)
        if (np.grid != noise_ensemble.front().grid)
            throw ValidationError("picard: all noise paths must share one grid");

    const GridKernel kernel(spec, control, noise_ensemble.front().grid);
    const std::size_t n_paths = noise_ensemble.size();
    const std::size_t n_steps = kernel.steps();

    // Iterate 0 is the constant-in-time path y_init.
    std::vector<Path> old_paths(n_paths);
    std::vector<std::vector<SpectralState>> frozen(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        old_paths[p].grid = kernel.grid();
        old_paths[p].states.assign(kernel.grid().size(), y_init);
        old_paths[p].plus_states.assign(spec.impulses.size(), y_init);
        frozen[p].assign(n_steps, y_init);
    }

    PicardResult result;
    std::vector<Path> new_paths(n_paths);
    for (std::size_t sweep = 1; sweep <= max_iter; ++sweep) {
        parallel_for(n_paths, threads, [&](std::size_t p) {
            new_paths[p] = kernel.run_frozen(noise_ensemble[p], frozen[p]);
        });
        const double dist = ensemble_distance(new_paths, old_paths);
        result.distances.push_back(dist);
        result.sweeps = sweep;
        std::swap(old_paths, new_paths);
        if (dist < tol) {
            result.converged = true;
            break;
        }
        for (std::size_t p = 0; p < n_paths; ++p) frozen[p] = departure_states(old_paths[p]);
    }
    result.paths = std::move(old_paths);
    return result;
}

ContractionSummary contraction_ratio(const std::vector<double>& distances) {
    if (distances.size() < 3)
        throw ValidationError("contraction_ratio: need at least 3 recorded distances");
    ContractionSummary summary;
    for (std::size_t n = 0; n + 1 < distances.size(); ++n) {
        if (distances[n] == 0.0) continue;
        summary.ratios.push_back(distances[n + 1] / distances[n]);
    }
    if (summary.ratios.empty()) return summary;
    const std::size_t start = summary.ratios.size() / 2;
    for (std::size_t i = start; i < summary.ratios.size(); ++i)
        summary.tail_max = std::max(summary.tail_max, summary.ratios[i]);
    return summary;
}

}  // namespace isee
