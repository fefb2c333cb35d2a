#pragma once

#include "isee/control_signal.hpp"
#include "isee/qwiener.hpp"
#include "isee/spectral.hpp"
#include "isee/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace isee {

/// Scheduled state jump y(t+) = (I + D) y(t-) + E v at time t.
struct ImpulseEvent {
    double time = 0.0;
    Matrix D;  // d x d
    Matrix E;  // d x m
    Vector v;  // m
};

/// Drift callback: writes g(t, y) into out (length d).
using DriftFn = std::function<void(double, const SpectralState&, Vector&)>;
/// Diffusion callback: writes the d x J per-mode coefficient matrix of
/// h(t, y) into out; column j multiplies the increment of noise mode j.
using DiffusionFn = std::function<void(double, const SpectralState&, Matrix&)>;

/// Complete description of the controlled impulsive system.
struct ProblemSpec {
    SemigroupSpec sg;
    Matrix B;  // d x m
    std::vector<ImpulseEvent> impulses;
    DriftFn g;
    DiffusionFn h;
    NoiseSpec noise;
    double horizon = 1.0;
    SpectralState y0;

    Eigen::Index state_dim() const { return sg.dimension(); }
    Eigen::Index control_dim() const { return B.cols(); }

    /// Checks dimensions, finiteness, and the impulse schedule
    /// 0 < t_1 < ... < t_n < horizon (impulses at 0 or T are rejected).
    void validate() const;
};

/// Piecewise trajectory on a grid containing every impulse time. states[n]
/// holds the left limit y(t_n-); the post-jump value at impulse k lives in
/// plus_states[k].
struct Path {
    std::vector<double> grid;
    std::vector<SpectralState> states;
    std::vector<SpectralState> plus_states;   // one per impulse
    std::vector<std::size_t> impulse_nodes;   // grid index of each impulse time

    /// State the integrator steps from at node n: the post-jump value at
    /// impulse nodes, the node state otherwise.
    const SpectralState& departure_state(std::size_t n) const;
};

/// y(t+) = (I + D) y(t-) + E v.
SpectralState apply_impulse(const SpectralState& y_minus, const ImpulseEvent& ev);

/// Per-grid precomputation (step widths, semigroup factors, control term,
/// impulse nodes) shared across many paths on the same grid. The referenced
/// spec must outlive the kernel.
class GridKernel {
public:
    GridKernel(const ProblemSpec& spec, const ControlSignal& control,
               std::vector<double> grid);

    const std::vector<double>& grid() const { return grid_; }
    std::size_t steps() const { return n_steps_; }

    /// Explicit recursion: drift/diffusion sampled on the evolving state.
    Path run(const NoisePath& noise) const;

    /// One fixed-point sweep: drift/diffusion sampled on a frozen iterate
    /// (one state per step, the departure value of the previous iterate).
    Path run_frozen(const NoisePath& noise,
                    const std::vector<SpectralState>& frozen) const;

private:
    void check_noise(const NoisePath& noise) const;
    Path run_impl(const NoisePath& noise, const std::vector<SpectralState>* frozen) const;

    const ProblemSpec* spec_;
    std::vector<double> grid_;
    std::size_t n_steps_ = 0;
    std::vector<double> dt_;
    std::vector<Vector> exp_factors_;
    std::vector<Vector> bu_dt_;
    std::vector<std::ptrdiff_t> impulse_at_node_;
    std::vector<std::size_t> impulse_nodes_;
};

/// Departure value per step of a computed path (post-jump at impulse nodes).
std::vector<SpectralState> departure_states(const Path& path);

/// One exponential-Euler step: T(dt) [ y + (B u + g(t,y)) dt + h(t,y) dW ].
/// Drift, control and diffusion are sampled at the left endpoint.
SpectralState step_exponential_euler(const ProblemSpec& spec, double t, double dt,
                                     const Vector& u_t, const SpectralState& y,
                                     const Vector& dW_row);

/// Integrates the mild form piecewise over the noise grid, restarting from
/// the post-jump state at every impulse time. The grid must contain every
/// impulse time and every control breakpoint.
Path simulate_path(const ProblemSpec& spec, const ControlSignal& control,
                   const NoisePath& noise);

/// Post-jump state after impulse k (1-based) evaluated through the unrolled
/// product representation: semigroup/impulse composition applied to y0, the
/// three propagated integrals (control, drift, diffusion), and the impulse
/// input sum. Uses the same quadrature nodes, iterates and increments as
/// simulate_path, so agreement with Path::plus_states[k-1] is a rounding-level
/// identity rather than a discretization statement.
SpectralState closed_form_plus_state(const ProblemSpec& spec, const ControlSignal& control,
                                     const NoisePath& noise, std::size_t k);

/// Ensemble second-moment statistics over independently driven paths.
struct EnsembleReport {
    std::vector<double> grid;
    std::vector<double> mean_sq_norm;  // per node, left limits
    double sup_mean_sq_norm = 0.0;
    double argmax_time = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> path_indices;
};

EnsembleReport monte_carlo(const ProblemSpec& spec, const ControlSignal& control,
                           const std::vector<double>& grid, std::size_t n_paths,
                           std::uint64_t seed, int threads = 0);

/// Uniform grid on [0, horizon] refined so that every impulse time and
/// every extra breakpoint is a node (nearby nodes snap instead of piling up).
std::vector<double> make_grid(double horizon, std::size_t steps,
                              const std::vector<ImpulseEvent>& impulses,
                              const std::vector<double>& extra = {});

}  // namespace isee
