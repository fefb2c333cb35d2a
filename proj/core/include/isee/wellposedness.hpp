#pragma once

#include "isee/dynamics.hpp"
#include "isee/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace isee {

/// Growth constants (L_g, L_h) and local Lipschitz constants (Lt_g, Lt_h)
/// for the drift and diffusion, all on squared norms:
///   ||g(t,y)||^2        <= L_g (1 + ||y||^2)
///   ||g(t,y)-g(t,z)||^2 <= Lt_g ||y - z||^2
/// and likewise for h in the lambda-weighted Hilbert-Schmidt norm.
struct LipschitzBundle {
    double L_g = 0.0;
    double L_h = 0.0;
    double Lt_g = 0.0;
    double Lt_h = 0.0;

    void validate() const;
};

/// Composition constants of the impulse/semigroup chain,
///   C_i = prod_{j=k}^{i+1} (1 + ||D_j||) ||T(t_j - t_{j-1})|| (1 + ||D_i||),
///   N   = sum C_i^2,
/// in two variants: ||T(dt)|| evaluated exactly from the diagonal spectrum,
/// and bounded by M. Empty schedule gives C = {} and N = 0.
struct CompositionConstants {
    std::vector<double> C;
    double N = 0.0;
    std::vector<double> C_mbound;
    double N_mbound = 0.0;
};

CompositionConstants composition_constants(const ProblemSpec& spec);

/// Every sufficient-condition constant with both theorem verdicts. The
/// primary fields use the exact-||T|| composition constants; the M-bound
/// variants are carried alongside.
struct ConstantsReport {
    double M = 1.0;
    double horizon = 0.0;
    std::size_t n_impulses = 0;
    std::vector<double> C;
    double N = 0.0;
    std::vector<double> C_mbound;
    double N_mbound = 0.0;

    double script_N = 0.0;  // M^2 + M^2 (T^2 L_g + T L_h)
    double script_S = 0.0;  // M^2 T^2 L_g + M^2 T L_h
    double K0 = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double k_thm1 = 0.0;

    double k1 = 0.0;  // 2 M^2 T^2 (Lt_g + Lt_h)
    double k2 = 0.0;  // 4 M^4 (N + T^2) (Lt_g + Lt_h)
    double k_thm2 = 0.0;

    bool verdict_thm1 = false;
    bool verdict_thm2 = false;
    std::string binding_thm1;  // first violated gate, empty when the verdict holds
    std::string binding_thm2;
    std::string binding_constraint() const;

    std::string r0_formula;
    std::vector<std::string> notes;
};

/// Existence conditions: max{script_N, K0} < 1/9 and max{M^2, k} < 1.
/// m_override substitutes a diagnostic M without touching the spec.
ConstantsReport theorem1_check(const ProblemSpec& spec, const LipschitzBundle& lb,
                               std::optional<double> m_override = std::nullopt);

/// Uniqueness condition: k = max{k1, k2} < 1.
ConstantsReport theorem2_check(const ProblemSpec& spec, const LipschitzBundle& lb,
                               std::optional<double> m_override = std::nullopt);

std::string constants_to_json(const ConstantsReport& report, int indent = 2);

/// Largest horizon in (last impulse time, t_hi] with a true uniqueness
/// verdict, located by bisection (k1, k2 are increasing in T). Returns
/// nullopt when no horizon in range passes.
std::optional<double> max_horizon_thm2(const ProblemSpec& spec, const LipschitzBundle& lb,
                                       double t_hi, double tol = 1e-9);

/// Sampled audit of a claimed squared Lipschitz or growth constant.
/// Violations require the observed ratio to exceed claimed * (1 + 1e-9),
/// so analytically valid constants are never flagged on rounding noise.
struct RatioAudit {
    double max_observed_ratio = 0.0;
    struct Violation {
        double t;
        double ratio;
    };
    std::vector<Violation> violations;
    std::vector<std::string> callback_errors;
    bool passed() const { return violations.empty() && callback_errors.empty(); }
};

enum class Channel { drift, diffusion };

/// max over samples of ||f(t,y)-f(t,z)||^2 / ||y-z||^2 with
/// ||y||^2, ||z||^2 <= radius_sq (diffusion measured in the lambda-weighted
/// Hilbert-Schmidt norm).
RatioAudit audit_lipschitz(const ProblemSpec& spec, Channel channel, double claimed,
                           std::size_t n_samples, double radius_sq, std::uint64_t seed);

/// max over samples of ||f(t,y)||^2 / (1 + ||y||^2).
RatioAudit audit_growth(const ProblemSpec& spec, Channel channel, double claimed,
                        std::size_t n_samples, double radius_sq, std::uint64_t seed);

/// Squared lambda-weighted Hilbert-Schmidt norm of a d x J coefficient
/// matrix: sum_j lambda_j ||column_j||^2.
double l20_norm_sq(const Matrix& coeffs, const NoiseSpec& ns);

}  // namespace isee
