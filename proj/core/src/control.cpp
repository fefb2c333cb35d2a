#include "isee/control.hpp"

#include "isee/parallel.hpp"
#include "isee/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isee {

// --- ControlSignal ---------------------------------------------------------

ControlSignal::ControlSignal(std::vector<double> breakpoints_, std::vector<Vector> values_)
    : breakpoints(std::move(breakpoints_)), values(std::move(values_)) {}

ControlSignal ControlSignal::zero(double horizon, Eigen::Index dim, std::size_t n_intervals) {
    ControlSignal u;
    u.breakpoints.resize(n_intervals + 1);
    for (std::size_t i = 0; i <= n_intervals; ++i)
        u.breakpoints[i] = horizon * static_cast<double>(i) / static_cast<double>(n_intervals);
    u.breakpoints.front() = 0.0;
    u.breakpoints.back() = horizon;
    u.values.assign(n_intervals, Vector::Zero(dim));
    return u;
}

void ControlSignal::validate() const {
    if (values.empty() || breakpoints.size() != values.size() + 1)
        throw ValidationError("control: breakpoints must bracket the value intervals");
    if (breakpoints.front() != 0.0)
        throw ValidationError("control: first breakpoint must be 0");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw ValidationError("control: breakpoints must be strictly increasing");
    const Eigen::Index m = values.front().size();
    for (const auto& v : values) {
        if (v.size() != m) throw ValidationError("control: inconsistent value dimensions");
        if (!all_finite(v)) throw ValidationError("control: values must be finite");
    }
}

std::size_t ControlSignal::interval_of(double t) const {
    if (t >= breakpoints.back()) return values.size() - 1;
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto idx = static_cast<std::size_t>(it - breakpoints.begin());
    return idx == 0 ? 0 : idx - 1;
}

double ControlSignal::distance_sq(const ControlSignal& a, const ControlSignal& b) {
    std::vector<double> merged;
    merged.reserve(a.breakpoints.size() + b.breakpoints.size());
    std::merge(a.breakpoints.begin(), a.breakpoints.end(), b.breakpoints.begin(),
               b.breakpoints.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double mid = 0.5 * (merged[i] + merged[i + 1]);
        acc += (a.value_at(mid) - b.value_at(mid)).squaredNorm() * (merged[i + 1] - merged[i]);
    }
    return acc;
}

// --- AdmissibleSet ----------------------------------------------------------

AdmissibleSet AdmissibleSet::box(Vector lower, Vector upper) {
    AdmissibleSet s;
    s.shape = Box{std::move(lower), std::move(upper)};
    s.validate();
    return s;
}

AdmissibleSet AdmissibleSet::ball(Vector center, double radius) {
    AdmissibleSet s;
    s.shape = Ball{std::move(center), radius};
    s.validate();
    return s;
}

void AdmissibleSet::validate() const {
    if (const auto* b = std::get_if<Box>(&shape)) {
        if (b->lower.size() != b->upper.size() || b->lower.size() == 0)
            throw ValidationError("admissible box: bound dimensions mismatch");
        if (!all_finite(b->lower) || !all_finite(b->upper))
            throw ValidationError("admissible box: bounds must be finite");
        if ((b->lower.array() > b->upper.array()).any())
            throw ValidationError("admissible box: lower bound exceeds upper bound");
    } else {
        const auto& c = std::get<Ball>(shape);
        if (c.center.size() == 0 || !all_finite(c.center))
            throw ValidationError("admissible ball: center must be finite and nonempty");
        if (!(c.radius >= 0.0) || !std::isfinite(c.radius))
            throw ValidationError("admissible ball: radius must be nonnegative");
    }
}

Eigen::Index AdmissibleSet::dim() const {
    if (const auto* b = std::get_if<Box>(&shape)) return b->lower.size();
    return std::get<Ball>(shape).center.size();
}

bool AdmissibleSet::is_singleton() const {
    if (const auto* b = std::get_if<Box>(&shape)) return b->lower == b->upper;
    return std::get<Ball>(shape).radius == 0.0;
}

Vector AdmissibleSet::project_value(const Vector& v) const {
    if (const auto* b = std::get_if<Box>(&shape))
        return v.cwiseMax(b->lower).cwiseMin(b->upper);
    const auto& c = std::get<Ball>(shape);
    const Vector offset = v - c.center;
    const double dist = offset.norm();
    if (dist <= c.radius) return v;
    return c.center + offset * (c.radius / dist);
}

bool AdmissibleSet::contains(const Vector& v, double tol) const {
    return (v - project_value(v)).norm() <= tol;
}

ControlSignal project(const AdmissibleSet& set, const ControlSignal& u) {
    ControlSignal out = u;
    for (auto& v : out.values) v = set.project_value(v);
    return out;
}

// --- RunningCost and audits --------------------------------------------------

void RunningCost::validate() const {
    if (!l) throw ValidationError("cost: integrand callback required");
    if (!(d2 > 0.0)) throw ValidationError("cost: d2 must be positive");
    if (d1 < 0.0) throw ValidationError("cost: d1 must be nonnegative");
}

CostEstimate cost(const ProblemSpec& spec, const ControlSignal& control,
                  const RunningCost& rc, const std::vector<double>& grid,
                  std::size_t n_paths, std::uint64_t seed, int threads) {
    rc.validate();
    if (n_paths < 2) throw ValidationError("cost: n_paths must be >= 2");
    const GridKernel kernel(spec, control, grid);

    std::vector<double> per_path(n_paths, 0.0);
    std::vector<std::string> failure(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t p) {
        const NoisePath noise = sample_increments(spec.noise, grid, seed, p);
        const Path path = kernel.run(noise);
        double acc = 0.0;
        for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
            const double t = grid[n];
            const double dt = grid[n + 1] - grid[n];
            const double value = rc.l(t, path.departure_state(n), control.value_at(t));
            if (!std::isfinite(value)) {
                std::ostringstream msg;
                msg << "cost: non-finite integrand at t=" << t << " on path " << p;
                failure[p] = msg.str();
                return;
            }
            acc += value * dt;
        }
        per_path[p] = acc;
    });
    for (const auto& msg : failure)
        if (!msg.empty()) throw std::runtime_error(msg);

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t lo = 0; lo < n_paths; lo += kReduceChunk) {
        double s = 0.0, s2 = 0.0;
        const std::size_t hi = std::min(lo + kReduceChunk, n_paths);
        for (std::size_t p = lo; p < hi; ++p) {
            s += per_path[p];
            s2 += per_path[p] * per_path[p];
        }
        sum += s;
        sum_sq += s2;
    }
    CostEstimate est;
    est.n_paths = n_paths;
    est.j = sum / static_cast<double>(n_paths);
    const double var = std::max(0.0, sum_sq / static_cast<double>(n_paths) - est.j * est.j);
    est.standard_error = std::sqrt(var / static_cast<double>(n_paths));
    return est;
}

A4Audit audit_A4(const RunningCost& rc, const ProblemSpec& spec, std::size_t n_samples,
                 std::uint64_t seed, double state_radius_sq, double control_radius) {
    rc.validate();
    if (n_samples < 1) throw ValidationError("audit_A4: n_samples must be >= 1");
    const Eigen::Index d = spec.state_dim();
    const Eigen::Index m = spec.control_dim();
    A4Audit audit;
    const std::uint64_t stream = rng::stream_id(rng::Domain::audit, 4);
    std::uint64_t draw = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double t = spec.horizon * rng::uniform01(seed, stream, draw++);
        Vector y(d), u(m);
        for (Eigen::Index i = 0; i < d; ++i) y(i) = rng::normal(seed, stream, draw++);
        for (Eigen::Index i = 0; i < m; ++i) u(i) = rng::normal(seed, stream, draw++);
        const double y_cap = std::sqrt(state_radius_sq) * rng::uniform01(seed, stream, draw++);
        if (y.norm() > 0.0) y *= y_cap / y.norm();
        const double u_cap = control_radius * rng::uniform01(seed, stream, draw++);
        if (u.norm() > 0.0) u *= u_cap / u.norm();

        double lhs;
        try {
            lhs = rc.l(t, y, u);
        } catch (const std::exception& e) {
            audit.callback_errors.push_back(std::string("integrand threw: ") + e.what());
            continue;
        }
        const double rhs = rc.xi(t) + rc.d1 * y.squaredNorm() + rc.d2 * u.squaredNorm();
        if (!(lhs >= rhs)) audit.violations.push_back({t, lhs, rhs});
    }
    return audit;
}

ConvexityAudit audit_A3(const RunningCost& rc, const ProblemSpec& spec,
                        std::size_t n_samples, std::uint64_t seed, double radius,
                        double tol) {
    rc.validate();
    const Eigen::Index d = spec.state_dim();
    const Eigen::Index m = spec.control_dim();
    ConvexityAudit audit;
    const std::uint64_t stream = rng::stream_id(rng::Domain::audit, 3);
    std::uint64_t draw = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double t = spec.horizon * rng::uniform01(seed, stream, draw++);
        Vector y(d), u(m), w(m);
        for (Eigen::Index i = 0; i < d; ++i) y(i) = radius * rng::normal(seed, stream, draw++);
        for (Eigen::Index i = 0; i < m; ++i) u(i) = radius * rng::normal(seed, stream, draw++);
        for (Eigen::Index i = 0; i < m; ++i) w(i) = radius * rng::normal(seed, stream, draw++);
        double mid, lhs_u, lhs_w;
        try {
            mid = rc.l(t, y, 0.5 * (u + w));
            lhs_u = rc.l(t, y, u);
            lhs_w = rc.l(t, y, w);
        } catch (const std::exception& e) {
            audit.callback_errors.push_back(std::string("integrand threw: ") + e.what());
            continue;
        }
        if (!(mid <= 0.5 * (lhs_u + lhs_w) + tol))
            audit.violations.push_back({t, mid, 0.5 * (lhs_u + lhs_w)});
    }
    return audit;
}

// --- Continuous dependence ----------------------------------------------------

DependenceReport continuous_dependence(const ProblemSpec& spec, const LipschitzBundle& lb,
                                       const ControlSignal& u1, const ControlSignal& u2,
                                       const std::vector<double>& grid, std::size_t n_paths,
                                       std::uint64_t seed, int threads) {
    lb.validate();
    if (n_paths < 2)
        throw ValidationError("continuous_dependence: n_paths must be >= 2");

    DependenceReport report;
    const double M = spec.sg.bound_M;
    const double T = spec.horizon;
    const double lip_mix = T * T * lb.Lt_g + T * lb.Lt_h;
    const double N = composition_constants(spec).N;
    const double norm_B = spectral_norm(spec.B);
    const double den1 = 1.0 - 3.0 * M * M * lip_mix;
    const double den2 = 1.0 - 6.0 * M * M * (N + 1.0) * lip_mix;
    report.denominator_1 = den1;
    report.denominator_2 = den2;
    if (den1 <= 0.0 || den2 <= 0.0) {
        report.applicable = false;
        return report;
    }
    report.applicable = true;
    report.c_star = std::max(3.0 * M * M * norm_B * norm_B / den1,
                             6.0 * M * M * T * (N + 1.0) * norm_B * norm_B / den2);
    report.control_dist_sq = ControlSignal::distance_sq(u1, u2);

    const GridKernel kernel1(spec, u1, grid);
    const GridKernel kernel2(spec, u2, grid);
    const std::size_t n_nodes = grid.size();
    std::vector<double> diff_sq(n_paths * n_nodes, 0.0);
    parallel_for(n_paths, threads, [&](std::size_t p) {
        const NoisePath noise = sample_increments(spec.noise, grid, seed, p);
        const Path a = kernel1.run(noise);
        const Path b = kernel2.run(noise);
        for (std::size_t n = 0; n < n_nodes; ++n)
            diff_sq[p * n_nodes + n] = (a.states[n] - b.states[n]).squaredNorm();
    });

    // sup over nodes of the path-mean squared difference; the standard error
    // is taken at the argmax node.
    double best_mean = 0.0, best_se = 0.0;
    for (std::size_t n = 0; n < n_nodes; ++n) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t lo = 0; lo < n_paths; lo += kReduceChunk) {
            double s = 0.0, s2 = 0.0;
            const std::size_t hi = std::min(lo + kReduceChunk, n_paths);
            for (std::size_t p = lo; p < hi; ++p) {
                const double v = diff_sq[p * n_nodes + n];
                s += v;
                s2 += v * v;
            }
            sum += s;
            sum_sq += s2;
        }
        const double mean = sum / static_cast<double>(n_paths);
        if (mean >= best_mean) {
            best_mean = mean;
            const double var =
                std::max(0.0, sum_sq / static_cast<double>(n_paths) - mean * mean);
            best_se = std::sqrt(var / static_cast<double>(n_paths));
        }
    }
    report.lhs_pc_sq = best_mean;
    report.lhs_standard_error = best_se;
    report.bound_satisfied =
        report.lhs_pc_sq <= report.c_star * report.control_dist_sq + 3.0 * best_se;
    return report;
}

// --- Derivative-free search -----------------------------------------------------

OptimizeResult optimize(const ProblemSpec& spec, const RunningCost& rc,
                        const AdmissibleSet& ad, const ControlSignal& u_init,
                        const std::vector<double>& grid, const OptimizeOptions& opts) {
    rc.validate();
    ad.validate();
    if (opts.budget < 1) throw ValidationError("optimize: budget must be >= 1");
    if (ad.dim() != u_init.dim())
        throw ValidationError("optimize: admissible set dimension mismatch");

    OptimizeResult result;
    std::size_t evals = 0;
    auto evaluate = [&](const ControlSignal& u) {
        ++evals;
        return cost(spec, u, rc, grid, opts.cost_paths, opts.cost_seed, opts.threads);
    };

    ControlSignal u = project(ad, u_init);
    CostEstimate j = evaluate(u);
    result.u_star = u;
    result.j_star = j;
    result.history.push_back({0, j.j, j.j, 0.0});
    if (ad.is_singleton() || opts.budget < 3) {
        result.evaluations = evals;
        return result;
    }

    const std::size_t n_int = u.intervals();
    const Eigen::Index m = u.dim();
    const double stability = opts.stability > 0.0
                                 ? opts.stability
                                 : 0.1 * static_cast<double>(opts.budget) / 3.0;

    std::size_t iter = 0;
    while (evals + 3 <= opts.budget) {
        ++iter;
        const double a_n = opts.step / std::pow(static_cast<double>(iter) + stability, 0.602);
        const double c_n = opts.perturbation / std::pow(static_cast<double>(iter), 0.101);

        // Rademacher direction, one entry per control coefficient.
        const std::uint64_t stream = rng::stream_id(rng::Domain::search, iter);
        ControlSignal u_plus = u, u_minus = u;
        std::vector<Vector> delta(n_int, Vector(m));
        std::uint64_t draw = 0;
        for (std::size_t i = 0; i < n_int; ++i)
            for (Eigen::Index c = 0; c < m; ++c)
                delta[i](c) = rng::rademacher(opts.seed, stream, draw++);
        for (std::size_t i = 0; i < n_int; ++i) {
            u_plus.values[i] += c_n * delta[i];
            u_minus.values[i] -= c_n * delta[i];
        }
        u_plus = project(ad, u_plus);
        u_minus = project(ad, u_minus);

        const CostEstimate j_plus = evaluate(u_plus);
        const CostEstimate j_minus = evaluate(u_minus);
        if (j_plus.j < result.j_star.j) {
            result.j_star = j_plus;
            result.u_star = u_plus;
        }
        if (j_minus.j < result.j_star.j) {
            result.j_star = j_minus;
            result.u_star = u_minus;
        }

        const double slope = (j_plus.j - j_minus.j) / (2.0 * c_n);
        double step_norm_sq = 0.0;
        for (std::size_t i = 0; i < n_int; ++i) {
            const Vector step = a_n * slope * delta[i];
            u.values[i] -= step;
            step_norm_sq += step.squaredNorm();
        }
        u = project(ad, u);
        const CostEstimate j_cur = evaluate(u);
        if (j_cur.j < result.j_star.j) {
            result.j_star = j_cur;
            result.u_star = u;
        }
        result.history.push_back({iter, result.j_star.j, j_cur.j, std::sqrt(step_norm_sq)});
    }
    result.evaluations = evals;
    return result;
}

}  // namespace isee
