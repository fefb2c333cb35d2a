#include "isee/dynamics.hpp"

#include "isee/parallel.hpp"
#include "isee/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isee {

void ProblemSpec::validate() const {
    sg.validate(horizon);
    const Eigen::Index d = state_dim();
    const Eigen::Index m = control_dim();
    if (B.rows() != d) throw ValidationError("problem: B must have d rows");
    if (!all_finite(B)) throw ValidationError("problem: B must be finite");
    if (y0.size() != d) throw ValidationError("problem: y0 dimension mismatch");
    if (!all_finite(y0)) throw ValidationError("problem: y0 must be finite");
    if (!g || !h) throw ValidationError("problem: drift and diffusion callbacks required");
    noise.validate();
    double prev = 0.0;
    for (std::size_t k = 0; k < impulses.size(); ++k) {
        const auto& ev = impulses[k];
        if (!(ev.time > prev))
            throw ValidationError("problem: impulse times must be strictly increasing");
        if (!(ev.time > 0.0 && ev.time < horizon))
            throw ValidationError("problem: impulse time outside (0, horizon)");
        if (ev.D.rows() != d || ev.D.cols() != d)
            throw ValidationError("problem: impulse D must be d x d");
        if (ev.E.rows() != d || ev.E.cols() != m)
            throw ValidationError("problem: impulse E must be d x m");
        if (ev.v.size() != m)
            throw ValidationError("problem: impulse input dimension mismatch");
        if (!all_finite(ev.D) || !all_finite(ev.E) || !all_finite(ev.v))
            throw ValidationError("problem: impulse data must be finite");
        prev = ev.time;
    }
}

const SpectralState& Path::departure_state(std::size_t n) const {
    const auto it = std::lower_bound(impulse_nodes.begin(), impulse_nodes.end(), n);
    if (it != impulse_nodes.end() && *it == n)
        return plus_states[static_cast<std::size_t>(it - impulse_nodes.begin())];
    return states[n];
}

SpectralState apply_impulse(const SpectralState& y_minus, const ImpulseEvent& ev) {
    if (ev.D.cols() != y_minus.size())
        throw ValidationError("apply_impulse: state dimension mismatch");
    if (ev.E.cols() != ev.v.size())
        throw ValidationError("apply_impulse: impulse input dimension mismatch");
    return y_minus + ev.D * y_minus + ev.E * ev.v;
}

SpectralState step_exponential_euler(const ProblemSpec& spec, double t, double dt,
                                     const Vector& u_t, const SpectralState& y,
                                     const Vector& dW_row) {
    if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
    if (y.size() != spec.state_dim()) throw ValidationError("step: state dimension mismatch");
    if (u_t.size() != spec.control_dim())
        throw ValidationError("step: control dimension mismatch");
    if (dW_row.size() != spec.noise.modes())
        throw ValidationError("step: noise dimension mismatch");
    Vector g_out(y.size());
    Matrix h_out(y.size(), spec.noise.modes());
    spec.g(t, y, g_out);
    spec.h(t, y, h_out);
    const Vector acc = y + (spec.B * u_t + g_out) * dt + h_out * dW_row;
    return semigroup_factors(spec.sg, dt).cwiseProduct(acc);
}

// --- GridKernel ---------------------------------------------------------------

GridKernel::GridKernel(const ProblemSpec& spec, const ControlSignal& control,
                       std::vector<double> grid)
    : spec_(&spec), grid_(std::move(grid)) {
    spec.validate();
    control.validate();
    validate_grid(grid_);
    if (control.dim() != spec.control_dim())
        throw ValidationError("kernel: control dimension mismatch");
    if (grid_.back() != spec.horizon)
        throw ValidationError("kernel: grid must end at the horizon");
    n_steps_ = grid_.size() - 1;

    auto node_of = [&](double t) -> std::ptrdiff_t {
        const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
        if (it == grid_.end() || *it != t) return -1;
        return it - grid_.begin();
    };
    impulse_at_node_.assign(grid_.size(), -1);
    impulse_nodes_.resize(spec.impulses.size());
    for (std::size_t k = 0; k < spec.impulses.size(); ++k) {
        const std::ptrdiff_t node = node_of(spec.impulses[k].time);
        if (node < 0) {
            std::ostringstream msg;
            msg << "kernel: grid does not contain impulse time " << spec.impulses[k].time;
            throw ValidationError(msg.str());
        }
        impulse_at_node_[static_cast<std::size_t>(node)] = static_cast<std::ptrdiff_t>(k);
        impulse_nodes_[k] = static_cast<std::size_t>(node);
    }
    for (double b : control.breakpoints)
        if (b != 0.0 && b != spec.horizon && node_of(b) < 0)
            throw ValidationError("kernel: grid does not contain a control breakpoint");

    dt_.resize(n_steps_);
    exp_factors_.resize(n_steps_);
    bu_dt_.resize(n_steps_);
    for (std::size_t n = 0; n < n_steps_; ++n) {
        dt_[n] = grid_[n + 1] - grid_[n];
        exp_factors_[n] = semigroup_factors(spec.sg, dt_[n]);
        bu_dt_[n] = spec.B * control.value_at(grid_[n]) * dt_[n];
    }
}

void GridKernel::check_noise(const NoisePath& noise) const {
    if (noise.grid != grid_) throw ValidationError("kernel: noise grid mismatch");
    if (noise.modes() != spec_->noise.modes())
        throw ValidationError("kernel: noise mode count mismatch");
}

Path GridKernel::run_impl(const NoisePath& noise,
                          const std::vector<SpectralState>* frozen) const {
    check_noise(noise);
    if (frozen && frozen->size() != n_steps_)
        throw ValidationError("kernel: frozen iterate must supply one state per step");

    const Eigen::Index d = spec_->state_dim();
    const Eigen::Index J = spec_->noise.modes();
    Path path;
    path.grid = grid_;
    path.states.resize(grid_.size());
    path.plus_states.resize(spec_->impulses.size());
    path.impulse_nodes = impulse_nodes_;

    Vector g_out(d);
    Matrix h_out(d, J);
    Vector acc(d);
    SpectralState y = spec_->y0;
    path.states[0] = y;
    for (std::size_t n = 0; n < n_steps_; ++n) {
        const double t = grid_[n];
        const SpectralState& arg = frozen ? (*frozen)[n] : y;
        spec_->g(t, arg, g_out);
        spec_->h(t, arg, h_out);
        acc = y + bu_dt_[n] + g_out * dt_[n];
        acc.noalias() += h_out * noise.dW.row(n).transpose();
        y = exp_factors_[n].cwiseProduct(acc);
        if (!all_finite(y)) {
            std::ostringstream msg;
            msg << "simulate: state became non-finite at t=" << grid_[n + 1];
            throw std::runtime_error(msg.str());
        }
        path.states[n + 1] = y;
        const std::ptrdiff_t k = impulse_at_node_[n + 1];
        if (k >= 0) {
            y = apply_impulse(y, spec_->impulses[static_cast<std::size_t>(k)]);
            path.plus_states[static_cast<std::size_t>(k)] = y;
        }
    }
    return path;
}

Path GridKernel::run(const NoisePath& noise) const { return run_impl(noise, nullptr); }

Path GridKernel::run_frozen(const NoisePath& noise,
                            const std::vector<SpectralState>& frozen) const {
    return run_impl(noise, &frozen);
}

std::vector<SpectralState> departure_states(const Path& path) {
    std::vector<SpectralState> out(path.grid.size() - 1);
    for (std::size_t n = 0; n + 1 < path.grid.size(); ++n) out[n] = path.departure_state(n);
    return out;
}

Path simulate_path(const ProblemSpec& spec, const ControlSignal& control,
                   const NoisePath& noise) {
    return GridKernel(spec, control, noise.grid).run(noise);
}

// --- Unrolled post-jump representation ------------------------------------------

SpectralState closed_form_plus_state(const ProblemSpec& spec, const ControlSignal& control,
                                     const NoisePath& noise, std::size_t k) {
    if (k < 1 || k > spec.impulses.size())
        throw ValidationError("closed_form_plus_state: impulse index out of range");
    const GridKernel kernel(spec, control, noise.grid);
    const Path path = kernel.run(noise);
    const std::vector<double>& grid = noise.grid;
    const Eigen::Index d = spec.state_dim();
    const Eigen::Index J = spec.noise.modes();

    // Impulse times bracketing each interval; t_0 = 0.
    auto impulse_time = [&](std::size_t i) { return spec.impulses[i - 1].time; };
    auto interval_start_node = [&](std::size_t i) {
        return i == 1 ? std::size_t{0} : path.impulse_nodes[i - 2];
    };
    auto interval_end_node = [&](std::size_t i) { return path.impulse_nodes[i - 1]; };

    // One composition factor: v -> (I + D_j) T(t_j - t_{j-1}) v.
    auto apply_factor = [&](std::size_t j, SpectralState v) -> SpectralState {
        const double span = impulse_time(j) - (j == 1 ? 0.0 : impulse_time(j - 1));
        v = semigroup_apply(spec.sg, span, v);
        return v + spec.impulses[j - 1].D * v;
    };
    // v -> prod_{j=k}^{i} factor_j v, rightmost factor first.
    auto propagate = [&](std::size_t from, SpectralState v) -> SpectralState {
        for (std::size_t j = from; j <= k; ++j) v = apply_factor(j, std::move(v));
        return v;
    };

    SpectralState total = propagate(1, spec.y0);

    Vector g_out(d);
    Matrix h_out(d, J);
    for (std::size_t i = 1; i <= k; ++i) {
        const double t_i = impulse_time(i);
        SpectralState integral_u = Vector::Zero(d);
        SpectralState integral_g = Vector::Zero(d);
        SpectralState integral_h = Vector::Zero(d);
        for (std::size_t n = interval_start_node(i); n < interval_end_node(i); ++n) {
            const double t_n = grid[n];
            const double dt = grid[n + 1] - grid[n];
            const Vector factors = semigroup_factors(spec.sg, t_i - t_n);
            const SpectralState& y_n = path.departure_state(n);
            spec.g(t_n, y_n, g_out);
            spec.h(t_n, y_n, h_out);
            integral_u += factors.cwiseProduct(spec.B * control.value_at(t_n)) * dt;
            integral_g += factors.cwiseProduct(g_out) * dt;
            integral_h += factors.cwiseProduct(h_out * noise.dW.row(n).transpose());
        }
        SpectralState inner = integral_u + integral_g + integral_h;
        inner += spec.impulses[i - 1].D * inner;  // (I + D_i) acts before propagation
        total += propagate(i + 1, std::move(inner));
    }

    for (std::size_t i = 2; i <= k; ++i) {
        const auto& prev = spec.impulses[i - 2];
        total += propagate(i, prev.E * prev.v);
    }
    const auto& last = spec.impulses[k - 1];
    total += last.E * last.v;
    return total;
}

// --- Ensemble statistics ---------------------------------------------------------

EnsembleReport monte_carlo(const ProblemSpec& spec, const ControlSignal& control,
                           const std::vector<double>& grid, std::size_t n_paths,
                           std::uint64_t seed, int threads) {
    if (n_paths < 1) throw ValidationError("monte_carlo: n_paths must be >= 1");
    const GridKernel kernel(spec, control, grid);
    const std::size_t n_nodes = grid.size();
    const std::size_t n_chunks = (n_paths + kReduceChunk - 1) / kReduceChunk;

    // Chunk-local accumulation; parallel_for hands each chunk to one worker.
    std::vector<double> chunk_acc(n_chunks * n_nodes, 0.0);
    parallel_for(n_paths, threads, [&](std::size_t p) {
        const NoisePath noise = sample_increments(spec.noise, grid, seed, p);
        const Path path = kernel.run(noise);
        double* acc = chunk_acc.data() + (p / kReduceChunk) * n_nodes;
        for (std::size_t n = 0; n < n_nodes; ++n) acc[n] += path.states[n].squaredNorm();
    });

    EnsembleReport report;
    report.grid = grid;
    report.seed = seed;
    report.mean_sq_norm.assign(n_nodes, 0.0);
    for (std::size_t c = 0; c < n_chunks; ++c)
        for (std::size_t n = 0; n < n_nodes; ++n)
            report.mean_sq_norm[n] += chunk_acc[c * n_nodes + n];
    for (std::size_t n = 0; n < n_nodes; ++n) {
        report.mean_sq_norm[n] /= static_cast<double>(n_paths);
        if (report.mean_sq_norm[n] >= report.sup_mean_sq_norm) {
            report.sup_mean_sq_norm = report.mean_sq_norm[n];
            report.argmax_time = grid[n];
        }
    }
    report.path_indices.resize(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) report.path_indices[p] = p;
    return report;
}

std::vector<double> make_grid(double horizon, std::size_t steps,
                              const std::vector<ImpulseEvent>& impulses,
                              const std::vector<double>& extra) {
    if (!(horizon > 0.0)) throw ValidationError("make_grid: horizon must be positive");
    if (steps < 1) throw ValidationError("make_grid: at least one step required");
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        grid[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    grid.front() = 0.0;
    grid.back() = horizon;

    std::vector<double> specials;
    specials.reserve(impulses.size() + extra.size());
    for (const auto& ev : impulses) specials.push_back(ev.time);
    for (double b : extra)
        if (b > 0.0 && b < horizon) specials.push_back(b);

    const double tol = 1e-9 * horizon;
    for (double s : specials) {
        const auto it = std::lower_bound(grid.begin(), grid.end(), s);
        if (it != grid.end() && std::abs(*it - s) <= tol) {
            *it = s;  // snap the nearby node onto the special time
        } else if (it != grid.begin() && std::abs(*(it - 1) - s) <= tol) {
            *(it - 1) = s;
        } else {
            grid.insert(it, s);
        }
    }
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    validate_grid(grid);
    return grid;
}

}  // namespace isee
