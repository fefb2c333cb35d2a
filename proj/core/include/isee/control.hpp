#pragma once

#include "isee/control_signal.hpp"
#include "isee/dynamics.hpp"
#include "isee/wellposedness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isee {

/// Running cost integrand l(t, y, u) together with its coercivity data:
/// l(t,y,u) >= xi(t) + d1 ||y||^2 + d2 ||u||^2 pointwise.
struct RunningCost {
    std::function<double(double, const SpectralState&, const Vector&)> l;
    std::function<double(double)> xi = [](double) { return 0.0; };
    double d1 = 0.0;
    double d2 = 1.0;

    void validate() const;
};

struct CostEstimate {
    double j = 0.0;
    double standard_error = 0.0;
    std::size_t n_paths = 0;
};

/// Monte-Carlo estimate of J(u) = E int_0^T l(t, y(t), u(t)) dt with
/// left-endpoint quadrature along each simulated path. Deterministic in
/// (seed, control); path p always draws noise stream p (common random
/// numbers across control evaluations).
CostEstimate cost(const ProblemSpec& spec, const ControlSignal& control,
                  const RunningCost& rc, const std::vector<double>& grid,
                  std::size_t n_paths, std::uint64_t seed, int threads = 0);

struct A4Audit {
    struct Violation {
        double t;
        double lhs;
        double rhs;
    };
    std::vector<Violation> violations;
    std::vector<std::string> callback_errors;
    bool passed() const { return violations.empty() && callback_errors.empty(); }
};
using ConvexityAudit = A4Audit;

/// Samples (t, y, u) and checks the coercivity inequality pointwise (which
/// implies the expectation form).
A4Audit audit_A4(const RunningCost& rc, const ProblemSpec& spec, std::size_t n_samples,
                 std::uint64_t seed, double state_radius_sq = 16.0,
                 double control_radius = 4.0);

/// Midpoint convexity check of u -> l(t, y, u) by random sampling.
ConvexityAudit audit_A3(const RunningCost& rc, const ProblemSpec& spec,
                        std::size_t n_samples, std::uint64_t seed, double radius = 2.0,
                        double tol = 1e-9);

/// Empirical check of the solution-map Lipschitz bound
/// sup_t E||y^{u1} - y^{u2}||^2 <= C* int ||u1 - u2||^2 dt with common noise.
struct DependenceReport {
    bool applicable = false;
    double c_star = 0.0;
    double lhs_pc_sq = 0.0;
    double lhs_standard_error = 0.0;
    double control_dist_sq = 0.0;
    double denominator_1 = 0.0;
    double denominator_2 = 0.0;
    bool bound_satisfied = false;
};

DependenceReport continuous_dependence(const ProblemSpec& spec, const LipschitzBundle& lb,
                                       const ControlSignal& u1, const ControlSignal& u2,
                                       const std::vector<double>& grid, std::size_t n_paths,
                                       std::uint64_t seed, int threads = 0);

/// Projected simultaneous-perturbation search over piecewise-constant
/// controls. Gradient estimates and all comparisons reuse one fixed noise
/// seed, so the objective is deterministic and comparisons are exact.
struct OptimizeOptions {
    std::size_t budget = 2000;     // total cost() evaluations allowed
    std::uint64_t seed = 0;        // perturbation stream
    std::uint64_t cost_seed = 0;   // common-random-number seed for cost()
    std::size_t cost_paths = 128;
    double step = 0.2;             // a0 in a_n = a0 / (n + A)^0.602
    double perturbation = 0.1;     // c0 in c_n = c0 / n^0.101
    double stability = 0.0;        // A; 0 picks budget/30
    int threads = 0;
};

struct HistoryRow {
    std::size_t iteration;
    double j_best;
    double j_current;
    double step_norm;
};

struct OptimizeResult {
    ControlSignal u_star;
    CostEstimate j_star;
    std::vector<HistoryRow> history;
    std::size_t evaluations = 0;
};

OptimizeResult optimize(const ProblemSpec& spec, const RunningCost& rc,
                        const AdmissibleSet& ad, const ControlSignal& u_init,
                        const std::vector<double>& grid, const OptimizeOptions& opts);

}  // namespace isee
