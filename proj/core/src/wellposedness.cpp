#include "isee/wellposedness.hpp"

#include "isee/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace isee {

void LipschitzBundle::validate() const {
    for (double c : {L_g, L_h, Lt_g, Lt_h})
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ValidationError("lipschitz bundle: constants must be finite and >= 0");
}

double l20_norm_sq(const Matrix& coeffs, const NoiseSpec& ns) {
    if (coeffs.cols() != ns.modes())
        throw ValidationError("l20_norm_sq: column count must match the noise modes");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j)
        acc += ns.lambda(j) * coeffs.col(j).squaredNorm();
    return acc;
}

CompositionConstants composition_constants(const ProblemSpec& spec) {
    spec.validate();
    CompositionConstants out;
    const std::size_t k = spec.impulses.size();
    if (k == 0) return out;

    std::vector<double> norm_D(k), exact_T(k), bound_T(k);
    double prev_time = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        norm_D[j] = spectral_norm(spec.impulses[j].D);
        const double span = spec.impulses[j].time - prev_time;
        // Exact operator norm of the diagonal semigroup over one span.
        exact_T[j] = std::exp(spec.sg.mu.maxCoeff() * span);
        bound_T[j] = spec.sg.bound_M;
        prev_time = spec.impulses[j].time;
    }

    out.C.resize(k);
    out.C_mbound.resize(k);
    for (std::size_t i = 1; i <= k; ++i) {
        double exact = 1.0 + norm_D[i - 1];
        double coarse = exact;
        for (std::size_t j = i + 1; j <= k; ++j) {
            exact *= (1.0 + norm_D[j - 1]) * exact_T[j - 1];
            coarse *= (1.0 + norm_D[j - 1]) * bound_T[j - 1];
        }
        out.C[i - 1] = exact;
        out.C_mbound[i - 1] = coarse;
        out.N += exact * exact;
        out.N_mbound += coarse * coarse;
    }
    return out;
}

namespace {

ConstantsReport build_report(const ProblemSpec& spec, const LipschitzBundle& lb,
                             std::optional<double> m_override) {
    lb.validate();
    ConstantsReport r;
    const std::size_t k = spec.impulses.size();
    r.M = m_override.value_or(spec.sg.bound_M);
    r.horizon = spec.horizon;
    r.n_impulses = k;
    const double M = r.M;
    const double T = spec.horizon;

    const CompositionConstants comp = composition_constants(spec);
    r.C = comp.C;
    r.N = comp.N;
    r.C_mbound = comp.C_mbound;
    r.N_mbound = comp.N_mbound;

    const double norm_B = spectral_norm(spec.B);
    const double growth_mix = T * T * lb.L_g + T * lb.L_h;
    const double lip_mix = lb.Lt_g + lb.Lt_h;

    double prod_1pD_sq = 1.0;  // empty product over an empty schedule
    std::vector<double> norm_D(k), norm_E(k), v_sq(k);
    for (std::size_t j = 0; j < k; ++j) {
        norm_D[j] = spectral_norm(spec.impulses[j].D);
        norm_E[j] = spectral_norm(spec.impulses[j].E);
        v_sq[j] = spec.impulses[j].v.squaredNorm();
        prod_1pD_sq *= (1.0 + norm_D[j]) * (1.0 + norm_D[j]);
    }
    const double m_pow = std::pow(M, 2.0 * static_cast<double>(k) + 2.0);

    r.script_N = M * M + M * M * growth_mix;
    r.script_S = M * M * growth_mix;
    r.K0 = m_pow * prod_1pD_sq + (std::pow(M, 4) + M * M) * norm_B * norm_B * r.N * growth_mix;
    double impulse_input = 0.0;
    if (k >= 1) {
        for (std::size_t i = 2; i <= k; ++i) {
            double tail = 1.0;
            for (std::size_t j = i; j <= k; ++j) tail *= (1.0 + norm_D[j - 1]) * (1.0 + norm_D[j - 1]);
            impulse_input += tail * norm_E[i - 2] * norm_E[i - 2] * v_sq[i - 2];
        }
        impulse_input += norm_E[k - 1] * norm_E[k - 1] * v_sq[k - 1];
    }
    r.K1 = M * M * impulse_input +
           (std::pow(M, 4) + M * M) * norm_B * norm_B * r.N * growth_mix;
    r.K2 = (std::pow(M, 4) * r.N + M * M) * norm_B * norm_B * T;
    r.k_thm1 = 3.0 * m_pow * prod_1pD_sq + 3.0 * std::pow(M, 4) * r.N * growth_mix;

    r.k1 = 2.0 * M * M * T * T * lip_mix;
    r.k2 = 4.0 * std::pow(M, 4) * (r.N + T * T) * lip_mix;
    r.k_thm2 = std::max(r.k1, r.k2);

    const double third_sq = 1.0 / 9.0;
    r.verdict_thm1 = std::max(r.script_N, r.K0) < third_sq && std::max(M * M, r.k_thm1) < 1.0;
    auto fmt = [](const char* name, double value, const char* gate) {
        std::ostringstream os;
        os << name << " " << gate << " violated (" << name << " = " << value << ")";
        return os.str();
    };
    if (!r.verdict_thm1) {
        if (!(r.script_N < third_sq))
            r.binding_thm1 = fmt("script_N", r.script_N, "< 1/9");
        else if (!(r.K0 < third_sq))
            r.binding_thm1 = fmt("K0", r.K0, "< 1/9");
        else if (!(M * M < 1.0))
            r.binding_thm1 = fmt("M^2", M * M, "< 1");
        else
            r.binding_thm1 = fmt("k", r.k_thm1, "< 1");
    }
    r.verdict_thm2 = r.k_thm2 < 1.0;
    if (!r.verdict_thm2)
        r.binding_thm2 = fmt("k = max{k1, k2}", r.k_thm2, "< 1");

    {
        std::ostringstream os;
        os << "r0 >= max{ 4*(" << r.script_S << " + " << M * M * norm_B * norm_B * T
           << "*U2) / (1 - 4*" << r.script_N << "), 9*(" << r.K1 << " + " << r.K2
           << "*U2) / (1 - 9*" << r.K0
           << ") }, U2 = int_0^T E||u||^2 dt (supply to evaluate; requires positive "
              "denominators)";
        r.r0_formula = os.str();
    }
    r.notes.push_back(
        "All verdicts check sufficient conditions only; a false verdict does not "
        "assert that no mild solution exists.");
    if (M >= 1.0)
        r.notes.push_back(
            "max{M^2, k} < 1 cannot hold for M >= 1 (and the semigroup bound forces "
            "M >= 1 whenever some mode is non-expanding); reported as computed.");
    return r;
}

}  // namespace

std::string ConstantsReport::binding_constraint() const {
    if (binding_thm1.empty()) return binding_thm2;
    if (binding_thm2.empty()) return binding_thm1;
    return binding_thm1 + "; " + binding_thm2;
}

ConstantsReport theorem1_check(const ProblemSpec& spec, const LipschitzBundle& lb,
                               std::optional<double> m_override) {
    return build_report(spec, lb, m_override);
}

ConstantsReport theorem2_check(const ProblemSpec& spec, const LipschitzBundle& lb,
                               std::optional<double> m_override) {
    return build_report(spec, lb, m_override);
}

std::string constants_to_json(const ConstantsReport& r, int indent) {
    nlohmann::json j;
    j["M"] = r.M;
    j["horizon"] = r.horizon;
    j["n_impulses"] = r.n_impulses;
    j["C"] = r.C;
    j["N"] = r.N;
    j["C_m_bound"] = r.C_mbound;
    j["N_m_bound"] = r.N_mbound;
    j["script_N"] = r.script_N;
    j["script_S"] = r.script_S;
    j["K0"] = r.K0;
    j["K1"] = r.K1;
    j["K2"] = r.K2;
    j["k_thm1"] = r.k_thm1;
    j["k1"] = r.k1;
    j["k2"] = r.k2;
    j["k_thm2"] = r.k_thm2;
    j["verdict_thm1"] = r.verdict_thm1;
    j["verdict_thm2"] = r.verdict_thm2;
    j["binding_constraint"] = r.binding_constraint();
    j["binding_thm1"] = r.binding_thm1;
    j["binding_thm2"] = r.binding_thm2;
    j["conditions"] = {"max{script_N, K0} < 1/9", "max{M^2, k} < 1",
                       "k = max{k1, k2} < 1"};
    j["r0_formula"] = r.r0_formula;
    j["notes"] = r.notes;
    return j.dump(indent);
}

std::optional<double> max_horizon_thm2(const ProblemSpec& spec, const LipschitzBundle& lb,
                                       double t_hi, double tol) {
    const double t_min = spec.impulses.empty() ? 0.0 : spec.impulses.back().time;
    if (!(t_hi > t_min)) throw ValidationError("max_horizon_thm2: t_hi must exceed t_min");
    auto verdict_at = [&](double T) {
        ProblemSpec trial = spec;
        trial.horizon = T;
        trial.sg.bound_M = std::max(spec.sg.bound_M, operator_bound(spec.sg, T));
        return theorem2_check(trial, lb).verdict_thm2;
    };
    if (verdict_at(t_hi)) return t_hi;
    double lo = t_min + tol;
    if (!verdict_at(lo)) return std::nullopt;
    double hi = t_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (verdict_at(mid) ? lo : hi) = mid;
    }
    return lo;
}

namespace {

RatioAudit run_ratio_audit(const ProblemSpec& spec, Channel channel, double claimed,
                           std::size_t n_samples, double radius_sq, std::uint64_t seed,
                           bool lipschitz) {
    if (n_samples < 1) throw ValidationError("audit: n_samples must be >= 1");
    if (!(radius_sq > 0.0)) throw ValidationError("audit: radius must be positive");
    const Eigen::Index d = spec.state_dim();
    const Eigen::Index J = spec.noise.modes();
    RatioAudit audit;
    const std::uint64_t stream =
        rng::stream_id(rng::Domain::audit, channel == Channel::drift ? 0 : 1);
    std::uint64_t draw = 0;
    Vector ga(d), gb(d);
    Matrix ha(d, J), hb(d, J);

    auto sample_state = [&](Vector& y) {
        for (Eigen::Index i = 0; i < d; ++i) y(i) = rng::normal(seed, stream, draw++);
        const double target = std::sqrt(radius_sq) * rng::uniform01(seed, stream, draw++);
        const double norm = y.norm();
        if (norm > 0.0) y *= target / norm;
    };

    for (std::size_t s = 0; s < n_samples; ++s) {
        const double t = spec.horizon * rng::uniform01(seed, stream, draw++);
        Vector y(d), z(d);
        sample_state(y);
        sample_state(z);
        double num = 0.0, den = 1.0;
        try {
            if (lipschitz) {
                den = (y - z).squaredNorm();
                if (den == 0.0) continue;
                if (channel == Channel::drift) {
                    spec.g(t, y, ga);
                    spec.g(t, z, gb);
                    num = (ga - gb).squaredNorm();
                } else {
                    spec.h(t, y, ha);
                    spec.h(t, z, hb);
                    num = l20_norm_sq(ha - hb, spec.noise);
                }
            } else {
                den = 1.0 + y.squaredNorm();
                if (channel == Channel::drift) {
                    spec.g(t, y, ga);
                    num = ga.squaredNorm();
                } else {
                    spec.h(t, y, ha);
                    num = l20_norm_sq(ha, spec.noise);
                }
            }
        } catch (const std::exception& e) {
            audit.callback_errors.push_back(std::string("callback threw: ") + e.what());
            continue;
        }
        const double ratio = num / den;
        audit.max_observed_ratio = std::max(audit.max_observed_ratio, ratio);
        if (ratio > claimed * (1.0 + 1e-9) + 1e-300)
            audit.violations.push_back({t, ratio});
    }
    return audit;
}

}  // namespace

RatioAudit audit_lipschitz(const ProblemSpec& spec, Channel channel, double claimed,
                           std::size_t n_samples, double radius_sq, std::uint64_t seed) {
    return run_ratio_audit(spec, channel, claimed, n_samples, radius_sq, seed, true);
}

RatioAudit audit_growth(const ProblemSpec& spec, Channel channel, double claimed,
                        std::size_t n_samples, double radius_sq, std::uint64_t seed) {
    return run_ratio_audit(spec, channel, claimed, n_samples, radius_sq, seed, false);
}

}  // namespace isee
