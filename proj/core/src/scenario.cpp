#include "isee/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace isee {

using nlohmann::json;

ConfigError::ConfigError(std::string summary, std::vector<std::string> issues_)
    : std::runtime_error([&] {
          std::string msg = std::move(summary);
          for (const auto& issue : issues_) msg += "\n  - " + issue;
          return msg;
      }()),
      issues_list(std::move(issues_)) {}

namespace {

using Issues = std::vector<std::string>;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed, Issues& issues) {
    if (!j.is_object()) {
        issues.push_back(where + ": expected an object");
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known) issues.push_back(where + ": unknown key \"" + it.key() + "\"");
    }
}

template <typename T>
void read(const json& j, const std::string& where, const char* key, T& out, Issues& issues,
          bool required = false) {
    const auto it = j.find(key);
    if (it == j.end()) {
        if (required) issues.push_back(where + ": missing required key \"" + key + "\"");
        return;
    }
    if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && it->get<long long>() < 0) {
            issues.push_back(where + ": key \"" + std::string(key) +
                             "\" must be nonnegative");
            return;
        }
    }
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        issues.push_back(where + ": key \"" + std::string(key) + "\" has the wrong type");
    }
}

SpectrumConfig parse_spectrum(const json& j, const std::string& where, Issues& issues) {
    SpectrumConfig cfg;
    read(j, where, "family", cfg.family, issues, true);
    if (cfg.family == "explicit") {
        check_keys(j, where, {"family", "values"}, issues);
        read(j, where, "values", cfg.values, issues, true);
    } else if (cfg.family == "sine_dirichlet") {
        check_keys(j, where, {"family", "shift"}, issues);
        read(j, where, "shift", cfg.shift, issues);
    } else if (cfg.family == "constant") {
        check_keys(j, where, {"family", "value"}, issues);
        read(j, where, "value", cfg.value, issues);
    } else {
        issues.push_back(where + ": unknown spectrum family \"" + cfg.family + "\"");
    }
    return cfg;
}

MatrixConfig parse_matrix(const json& j, const std::string& where, Issues& issues) {
    MatrixConfig cfg;
    read(j, where, "kind", cfg.kind, issues, true);
    if (cfg.kind == "zero" || cfg.kind == "identity") {
        check_keys(j, where, {"kind", "cols"}, issues);
    } else if (cfg.kind == "scaled_identity") {
        check_keys(j, where, {"kind", "scale", "cols"}, issues);
        read(j, where, "scale", cfg.scale, issues, true);
    } else if (cfg.kind == "dense") {
        check_keys(j, where, {"kind", "values"}, issues);
        read(j, where, "values", cfg.values, issues, true);
    } else {
        issues.push_back(where + ": unknown matrix kind \"" + cfg.kind + "\"");
    }
    read(j, where, "cols", cfg.cols, issues);
    return cfg;
}

VectorConfig parse_vector(const json& j, const std::string& where, Issues& issues) {
    VectorConfig cfg;
    read(j, where, "kind", cfg.kind, issues, true);
    if (cfg.kind == "zero") {
        check_keys(j, where, {"kind"}, issues);
    } else if (cfg.kind == "unit") {
        check_keys(j, where, {"kind", "index", "scale"}, issues);
        read(j, where, "index", cfg.index, issues);
        read(j, where, "scale", cfg.scale, issues);
    } else if (cfg.kind == "dense") {
        check_keys(j, where, {"kind", "values"}, issues);
        read(j, where, "values", cfg.values, issues, true);
    } else {
        issues.push_back(where + ": unknown vector kind \"" + cfg.kind + "\"");
    }
    return cfg;
}

DriftConfig parse_drift(const json& j, Issues& issues) {
    const std::string where = "drift";
    DriftConfig cfg;
    read(j, where, "family", cfg.family, issues, true);
    if (cfg.family == "zero") {
        check_keys(j, where, {"family"}, issues);
    } else if (cfg.family == "linear") {
        check_keys(j, where, {"family", "gain"}, issues);
        read(j, where, "gain", cfg.gain, issues, true);
    } else if (cfg.family == "affine_drift") {
        check_keys(j, where, {"family", "forcing_amp", "forcing_mode", "gain_offset"}, issues);
        read(j, where, "forcing_amp", cfg.forcing_amp, issues, true);
        read(j, where, "forcing_mode", cfg.forcing_mode, issues);
        read(j, where, "gain_offset", cfg.gain_offset, issues, true);
    } else if (cfg.family == "saturating") {
        check_keys(j, where, {"family", "scale"}, issues);
        read(j, where, "scale", cfg.scale, issues, true);
    } else if (cfg.family == "trig_forcing") {
        check_keys(j, where, {"family", "amp", "freq", "phase", "mode"}, issues);
        read(j, where, "amp", cfg.amp, issues, true);
        read(j, where, "freq", cfg.freq, issues);
        read(j, where, "phase", cfg.phase, issues);
        read(j, where, "mode", cfg.mode, issues);
    } else {
        issues.push_back(where + ": unknown drift family \"" + cfg.family + "\"");
    }
    return cfg;
}

DiffusionConfig parse_diffusion(const json& j, Issues& issues) {
    const std::string where = "diffusion";
    DiffusionConfig cfg;
    read(j, where, "family", cfg.family, issues, true);
    if (cfg.family == "zero") {
        check_keys(j, where, {"family"}, issues);
    } else if (cfg.family == "constant") {
        check_keys(j, where, {"family", "sigma", "state_mode", "noise_mode"}, issues);
        read(j, where, "sigma", cfg.sigma, issues, true);
        read(j, where, "state_mode", cfg.state_mode, issues);
        read(j, where, "noise_mode", cfg.noise_mode, issues);
    } else if (cfg.family == "linear") {
        check_keys(j, where, {"family", "gain", "noise_mode"}, issues);
        read(j, where, "gain", cfg.gain, issues, true);
        read(j, where, "noise_mode", cfg.noise_mode, issues);
    } else if (cfg.family == "saturating_scalar") {
        check_keys(j, where, {"family", "amp", "state_mode", "noise_mode"}, issues);
        read(j, where, "amp", cfg.amp, issues, true);
        read(j, where, "state_mode", cfg.state_mode, issues);
        read(j, where, "noise_mode", cfg.noise_mode, issues);
    } else {
        issues.push_back(where + ": unknown diffusion family \"" + cfg.family + "\"");
    }
    return cfg;
}

NoiseConfig parse_noise(const json& j, Issues& issues) {
    const std::string where = "noise";
    NoiseConfig cfg;
    read(j, where, "family", cfg.family, issues, true);
    read(j, where, "modes", cfg.modes, issues, true);
    if (cfg.family == "explicit") {
        check_keys(j, where, {"family", "modes", "values"}, issues);
        read(j, where, "values", cfg.values, issues, true);
    } else if (cfg.family == "geometric") {
        check_keys(j, where, {"family", "modes", "first", "ratio"}, issues);
        read(j, where, "first", cfg.first, issues, true);
        read(j, where, "ratio", cfg.ratio, issues, true);
    } else {
        issues.push_back(where + ": unknown noise family \"" + cfg.family + "\"");
    }
    return cfg;
}

CostConfig parse_cost(const json& j, Issues& issues) {
    const std::string where = "cost";
    CostConfig cfg;
    check_keys(j, where, {"family", "state_weight", "control_weight"}, issues);
    read(j, where, "family", cfg.family, issues, true);
    if (cfg.family != "quadratic")
        issues.push_back(where + ": unknown cost family \"" + cfg.family + "\"");
    read(j, where, "state_weight", cfg.state_weight, issues);
    read(j, where, "control_weight", cfg.control_weight, issues);
    return cfg;
}

AdmissibleConfig parse_admissible(const json& j, Issues& issues) {
    const std::string where = "admissible";
    AdmissibleConfig cfg;
    read(j, where, "kind", cfg.kind, issues, true);
    if (cfg.kind == "ball") {
        check_keys(j, where, {"kind", "radius"}, issues);
        read(j, where, "radius", cfg.radius, issues, true);
    } else if (cfg.kind == "box") {
        check_keys(j, where, {"kind", "lower", "upper"}, issues);
        read(j, where, "lower", cfg.lower, issues, true);
        read(j, where, "upper", cfg.upper, issues, true);
    } else {
        issues.push_back(where + ": unknown admissible kind \"" + cfg.kind + "\"");
    }
    return cfg;
}

std::size_t matrix_cols(const MatrixConfig& cfg, std::size_t d) {
    if (cfg.kind == "dense") return cfg.values.empty() ? 0 : cfg.values.front().size();
    return cfg.cols > 0 ? cfg.cols : d;
}

void validate_config(const ScenarioConfig& cfg, Issues& issues) {
    if (cfg.dimension < 1 || cfg.dimension > 65536)
        issues.push_back("dimension: must be in [1, 65536]");
    if (!(cfg.horizon > 0.0)) issues.push_back("horizon: must be positive");
    if (cfg.grid_steps < 1 || cfg.grid_steps > 100000000)
        issues.push_back("grid_steps: must be in [1, 1e8]");
    if (cfg.paths < 1 || cfg.paths > 1000000000)
        issues.push_back("paths: must be in [1, 1e9]");
    if (cfg.control_intervals < 1 || cfg.control_intervals > 1000000)
        issues.push_back("control_intervals: must be in [1, 1e6]");
    if (cfg.noise.modes > 65536) issues.push_back("noise: modes must be <= 65536");

    if (cfg.spectrum.family == "explicit" && cfg.spectrum.values.size() != cfg.dimension)
        issues.push_back("spectrum: explicit values must have length = dimension");

    const std::size_t d = cfg.dimension;
    const std::size_t m = matrix_cols(cfg.B, d);
    if (cfg.B.kind == "dense") {
        if (cfg.B.values.size() != d)
            issues.push_back("B: dense matrix must have d rows");
        for (const auto& row : cfg.B.values)
            if (row.size() != m) issues.push_back("B: ragged dense matrix");
    }

    double prev = 0.0;
    for (std::size_t k = 0; k < cfg.impulses.size(); ++k) {
        const auto& imp = cfg.impulses[k];
        const std::string where = "impulses[" + std::to_string(k) + "]";
        if (!(imp.time > 0.0 && imp.time < cfg.horizon))
            issues.push_back(where + ": impulse time outside (0,T)");
        else if (!(imp.time > prev))
            issues.push_back(where + ": impulse times must be strictly increasing");
        prev = imp.time;
        if (imp.D.kind == "dense" &&
            (imp.D.values.size() != d ||
             (d > 0 && imp.D.values.front().size() != d)))
            issues.push_back(where + ": D must be d x d");
        if (imp.E.kind == "dense" &&
            (imp.E.values.size() != d ||
             (d > 0 && imp.E.values.front().size() != m)))
            issues.push_back(where + ": E must be d x m");
        if (imp.v.kind == "dense" && imp.v.values.size() != m)
            issues.push_back(where + ": v must have length m");
        if (imp.v.kind == "unit" && imp.v.index >= m)
            issues.push_back(where + ": v unit index out of range");
    }

    if (cfg.initial.kind == "dense" && cfg.initial.values.size() != d)
        issues.push_back("initial: dense vector must have length d");
    if (cfg.initial.kind == "unit" && cfg.initial.index >= d)
        issues.push_back("initial: unit index out of range");

    if (cfg.noise.modes < 1) issues.push_back("noise: modes must be >= 1");
    if (cfg.noise.family == "explicit") {
        if (cfg.noise.values.size() != cfg.noise.modes)
            issues.push_back("noise: explicit values must have length = modes");
        for (double v : cfg.noise.values)
            if (!(v >= 0.0)) issues.push_back("noise: eigenvalues must be >= 0");
    } else if (cfg.noise.family == "geometric") {
        if (!(cfg.noise.first >= 0.0)) issues.push_back("noise: first must be >= 0");
        if (!(cfg.noise.ratio >= 0.0)) issues.push_back("noise: ratio must be >= 0");
    }

    if (!(cfg.bound_M >= 1.0) && cfg.spectrum.family != "explicit")
        issues.push_back("bound_M: must be >= 1 for the built-in spectra");

    for (double c : {cfg.lipschitz.L_g, cfg.lipschitz.L_h, cfg.lipschitz.Lt_g,
                     cfg.lipschitz.Lt_h})
        if (!(c >= 0.0) || !std::isfinite(c))
            issues.push_back("lipschitz: constants must be finite and >= 0");

    if (!(cfg.cost.control_weight > 0.0))
        issues.push_back("cost: control_weight must be positive");
    if (!(cfg.cost.state_weight >= 0.0))
        issues.push_back("cost: state_weight must be >= 0");

    if (cfg.admissible.kind == "ball") {
        if (!(cfg.admissible.radius >= 0.0))
            issues.push_back("admissible: radius must be >= 0");
    } else if (cfg.admissible.kind == "box") {
        if (cfg.admissible.lower.size() != m || cfg.admissible.upper.size() != m)
            issues.push_back("admissible: box bounds must have length m");
        else
            for (std::size_t i = 0; i < m; ++i)
                if (cfg.admissible.lower[i] > cfg.admissible.upper[i])
                    issues.push_back("admissible: lower bound exceeds upper bound");
    }
}

json matrix_json(const MatrixConfig& cfg) {
    json j;
    j["kind"] = cfg.kind;
    if (cfg.kind == "scaled_identity") j["scale"] = cfg.scale;
    if (cfg.kind == "dense") j["values"] = cfg.values;
    if (cfg.cols > 0 && cfg.kind != "dense") j["cols"] = cfg.cols;
    return j;
}

json vector_json(const VectorConfig& cfg) {
    json j;
    j["kind"] = cfg.kind;
    if (cfg.kind == "unit") {
        j["index"] = cfg.index;
        j["scale"] = cfg.scale;
    }
    if (cfg.kind == "dense") j["values"] = cfg.values;
    return j;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error", {e.what()});
    }
    Issues issues;
    ScenarioConfig cfg;
    check_keys(j, "config",
               {"name", "dimension", "spectrum", "bound_M", "B", "impulses", "drift",
                "diffusion", "noise", "horizon", "initial", "grid_steps", "seed", "paths",
                "lipschitz", "cost", "admissible", "control_intervals"},
               issues);
    if (!j.is_object()) throw ConfigError("config validation failed", issues);

    read(j, "config", "name", cfg.name, issues);
    read(j, "config", "dimension", cfg.dimension, issues, true);
    read(j, "config", "bound_M", cfg.bound_M, issues);
    read(j, "config", "horizon", cfg.horizon, issues, true);
    read(j, "config", "grid_steps", cfg.grid_steps, issues);
    read(j, "config", "seed", cfg.seed, issues);
    read(j, "config", "paths", cfg.paths, issues);
    read(j, "config", "control_intervals", cfg.control_intervals, issues);

    if (j.contains("spectrum")) cfg.spectrum = parse_spectrum(j["spectrum"], "spectrum", issues);
    else issues.push_back("config: missing required key \"spectrum\"");
    if (j.contains("B")) cfg.B = parse_matrix(j["B"], "B", issues);
    else issues.push_back("config: missing required key \"B\"");
    if (j.contains("drift")) cfg.drift = parse_drift(j["drift"], issues);
    else issues.push_back("config: missing required key \"drift\"");
    if (j.contains("diffusion")) cfg.diffusion = parse_diffusion(j["diffusion"], issues);
    else issues.push_back("config: missing required key \"diffusion\"");
    if (j.contains("noise")) cfg.noise = parse_noise(j["noise"], issues);
    else issues.push_back("config: missing required key \"noise\"");
    if (j.contains("initial")) cfg.initial = parse_vector(j["initial"], "initial", issues);
    if (j.contains("cost")) cfg.cost = parse_cost(j["cost"], issues);
    if (j.contains("admissible")) cfg.admissible = parse_admissible(j["admissible"], issues);

    if (j.contains("impulses")) {
        if (!j["impulses"].is_array()) {
            issues.push_back("impulses: expected an array");
        } else {
            std::size_t k = 0;
            for (const auto& ji : j["impulses"]) {
                const std::string where = "impulses[" + std::to_string(k) + "]";
                check_keys(ji, where, {"time", "D", "E", "v"}, issues);
                ImpulseConfig imp;
                read(ji, where, "time", imp.time, issues, true);
                if (ji.contains("D")) imp.D = parse_matrix(ji["D"], where + ".D", issues);
                else issues.push_back(where + ": missing required key \"D\"");
                if (ji.contains("E")) imp.E = parse_matrix(ji["E"], where + ".E", issues);
                else issues.push_back(where + ": missing required key \"E\"");
                if (ji.contains("v")) imp.v = parse_vector(ji["v"], where + ".v", issues);
                else issues.push_back(where + ": missing required key \"v\"");
                cfg.impulses.push_back(std::move(imp));
                ++k;
            }
        }
    }

    if (j.contains("lipschitz")) {
        const auto& jl = j["lipschitz"];
        check_keys(jl, "lipschitz", {"L_g", "L_h", "Lt_g", "Lt_h"}, issues);
        read(jl, "lipschitz", "L_g", cfg.lipschitz.L_g, issues);
        read(jl, "lipschitz", "L_h", cfg.lipschitz.L_h, issues);
        read(jl, "lipschitz", "Lt_g", cfg.lipschitz.Lt_g, issues);
        read(jl, "lipschitz", "Lt_h", cfg.lipschitz.Lt_h, issues);
    }

    if (issues.empty()) validate_config(cfg, issues);
    if (!issues.empty()) throw ConfigError("config validation failed", issues);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open config file", {path});
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["dimension"] = cfg.dimension;
    {
        json js;
        js["family"] = cfg.spectrum.family;
        if (cfg.spectrum.family == "explicit") js["values"] = cfg.spectrum.values;
        if (cfg.spectrum.family == "sine_dirichlet") js["shift"] = cfg.spectrum.shift;
        if (cfg.spectrum.family == "constant") js["value"] = cfg.spectrum.value;
        j["spectrum"] = js;
    }
    j["bound_M"] = cfg.bound_M;
    j["B"] = matrix_json(cfg.B);
    {
        json arr = json::array();
        for (const auto& imp : cfg.impulses) {
            json ji;
            ji["time"] = imp.time;
            ji["D"] = matrix_json(imp.D);
            ji["E"] = matrix_json(imp.E);
            ji["v"] = vector_json(imp.v);
            arr.push_back(std::move(ji));
        }
        j["impulses"] = std::move(arr);
    }
    {
        json jd;
        jd["family"] = cfg.drift.family;
        if (cfg.drift.family == "linear") jd["gain"] = cfg.drift.gain;
        if (cfg.drift.family == "affine_drift") {
            jd["forcing_amp"] = cfg.drift.forcing_amp;
            jd["forcing_mode"] = cfg.drift.forcing_mode;
            jd["gain_offset"] = cfg.drift.gain_offset;
        }
        if (cfg.drift.family == "saturating") jd["scale"] = cfg.drift.scale;
        if (cfg.drift.family == "trig_forcing") {
            jd["amp"] = cfg.drift.amp;
            jd["freq"] = cfg.drift.freq;
            jd["phase"] = cfg.drift.phase;
            jd["mode"] = cfg.drift.mode;
        }
        j["drift"] = jd;
    }
    {
        json jh;
        jh["family"] = cfg.diffusion.family;
        if (cfg.diffusion.family == "constant") {
            jh["sigma"] = cfg.diffusion.sigma;
            jh["state_mode"] = cfg.diffusion.state_mode;
            jh["noise_mode"] = cfg.diffusion.noise_mode;
        }
        if (cfg.diffusion.family == "linear") {
            jh["gain"] = cfg.diffusion.gain;
            jh["noise_mode"] = cfg.diffusion.noise_mode;
        }
        if (cfg.diffusion.family == "saturating_scalar") {
            jh["amp"] = cfg.diffusion.amp;
            jh["state_mode"] = cfg.diffusion.state_mode;
            jh["noise_mode"] = cfg.diffusion.noise_mode;
        }
        j["diffusion"] = jh;
    }
    {
        json jn;
        jn["modes"] = cfg.noise.modes;
        jn["family"] = cfg.noise.family;
        if (cfg.noise.family == "explicit") jn["values"] = cfg.noise.values;
        if (cfg.noise.family == "geometric") {
            jn["first"] = cfg.noise.first;
            jn["ratio"] = cfg.noise.ratio;
        }
        j["noise"] = jn;
    }
    j["horizon"] = cfg.horizon;
    j["initial"] = vector_json(cfg.initial);
    j["grid_steps"] = cfg.grid_steps;
    j["seed"] = cfg.seed;
    j["paths"] = cfg.paths;
    j["lipschitz"] = {{"L_g", cfg.lipschitz.L_g},
                      {"L_h", cfg.lipschitz.L_h},
                      {"Lt_g", cfg.lipschitz.Lt_g},
                      {"Lt_h", cfg.lipschitz.Lt_h}};
    j["cost"] = {{"family", cfg.cost.family},
                 {"state_weight", cfg.cost.state_weight},
                 {"control_weight", cfg.cost.control_weight}};
    {
        json ja;
        ja["kind"] = cfg.admissible.kind;
        if (cfg.admissible.kind == "ball") ja["radius"] = cfg.admissible.radius;
        if (cfg.admissible.kind == "box") {
            ja["lower"] = cfg.admissible.lower;
            ja["upper"] = cfg.admissible.upper;
        }
        j["admissible"] = ja;
    }
    j["control_intervals"] = cfg.control_intervals;
    return j.dump(2) + "\n";
}

namespace {

Vector build_spectrum(const ScenarioConfig& cfg) {
    const auto d = static_cast<Eigen::Index>(cfg.dimension);
    Vector mu(d);
    if (cfg.spectrum.family == "explicit") {
        for (Eigen::Index i = 0; i < d; ++i) mu(i) = cfg.spectrum.values[static_cast<std::size_t>(i)];
    } else if (cfg.spectrum.family == "sine_dirichlet") {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double k = static_cast<double>(i + 1);
            mu(i) = -(k * k * std::numbers::pi * std::numbers::pi + cfg.spectrum.shift);
        }
    } else {
        mu.setConstant(cfg.spectrum.value);
    }
    return mu;
}

Matrix build_matrix(const MatrixConfig& cfg, Eigen::Index rows, Eigen::Index cols) {
    if (cfg.kind == "zero") return Matrix::Zero(rows, cols);
    if (cfg.kind == "identity") return Matrix::Identity(rows, cols);
    if (cfg.kind == "scaled_identity")
        return cfg.scale * Matrix::Identity(rows, cols);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = cfg.values[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

Vector build_vector(const VectorConfig& cfg, Eigen::Index size) {
    Vector v = Vector::Zero(size);
    if (cfg.kind == "unit") v(static_cast<Eigen::Index>(cfg.index)) = cfg.scale;
    if (cfg.kind == "dense")
        for (Eigen::Index i = 0; i < size; ++i) v(i) = cfg.values[static_cast<std::size_t>(i)];
    return v;
}

DriftFn build_drift(const DriftConfig& cfg) {
    if (cfg.family == "zero")
        return [](double, const SpectralState&, Vector& out) { out.setZero(); };
    if (cfg.family == "linear") {
        const double gain = cfg.gain;
        return [gain](double, const SpectralState& y, Vector& out) { out = gain * y; };
    }
    if (cfg.family == "affine_drift") {
        const double amp = cfg.forcing_amp;
        const double offset = cfg.gain_offset;
        const auto mode = static_cast<Eigen::Index>(cfg.forcing_mode);
        return [amp, offset, mode](double t, const SpectralState& y, Vector& out) {
            out = y / (t + offset);
            out(mode) += amp * std::cos(t);
        };
    }
    if (cfg.family == "saturating") {
        const double scale = cfg.scale;
        return [scale](double, const SpectralState& y, Vector& out) {
            out = (scale * y.array() / (1.0 + y.array().abs())).matrix();
        };
    }
    const double amp = cfg.amp, freq = cfg.freq, phase = cfg.phase;
    const auto mode = static_cast<Eigen::Index>(cfg.mode);
    return [amp, freq, phase, mode](double t, const SpectralState&, Vector& out) {
        out.setZero();
        out(mode) = amp * std::sin(freq * t + phase);
    };
}

DiffusionFn build_diffusion(const DiffusionConfig& cfg) {
    if (cfg.family == "zero")
        return [](double, const SpectralState&, Matrix& out) { out.setZero(); };
    if (cfg.family == "constant") {
        const double sigma = cfg.sigma;
        const auto r = static_cast<Eigen::Index>(cfg.state_mode);
        const auto c = static_cast<Eigen::Index>(cfg.noise_mode);
        return [sigma, r, c](double, const SpectralState&, Matrix& out) {
            out.setZero();
            out(r, c) = sigma;
        };
    }
    if (cfg.family == "linear") {
        const double gain = cfg.gain;
        const auto c = static_cast<Eigen::Index>(cfg.noise_mode);
        return [gain, c](double, const SpectralState& y, Matrix& out) {
            out.setZero();
            out.col(c) = gain * y;
        };
    }
    const double amp = cfg.amp;
    const auto r = static_cast<Eigen::Index>(cfg.state_mode);
    const auto c = static_cast<Eigen::Index>(cfg.noise_mode);
    // Scalar diffusion saturating in the state norm, one noise mode.
    return [amp, r, c](double t, const SpectralState& y, Matrix& out) {
        out.setZero();
        const double norm = y.norm();
        out(r, c) = amp * (2.0 / (1.0 + std::exp(t)) + norm / (1.0 + norm));
    };
}

Vector build_noise_values(const NoiseConfig& cfg) {
    const auto J = static_cast<Eigen::Index>(cfg.modes);
    Vector lambda(J);
    if (cfg.family == "explicit") {
        for (Eigen::Index j = 0; j < J; ++j) lambda(j) = cfg.values[static_cast<std::size_t>(j)];
    } else {
        double v = cfg.first;
        for (Eigen::Index j = 0; j < J; ++j) {
            lambda(j) = v;
            v *= cfg.ratio;
        }
    }
    return lambda;
}

}  // namespace

ProblemSpec build_problem(const ScenarioConfig& cfg) {
    const auto d = static_cast<Eigen::Index>(cfg.dimension);
    const auto m = static_cast<Eigen::Index>(matrix_cols(cfg.B, cfg.dimension));
    ProblemSpec spec;
    spec.sg = SemigroupSpec(build_spectrum(cfg), cfg.bound_M);
    spec.B = build_matrix(cfg.B, d, m);
    for (const auto& imp : cfg.impulses) {
        ImpulseEvent ev;
        ev.time = imp.time;
        ev.D = build_matrix(imp.D, d, d);
        ev.E = build_matrix(imp.E, d, m);
        ev.v = build_vector(imp.v, m);
        spec.impulses.push_back(std::move(ev));
    }
    spec.g = build_drift(cfg.drift);
    spec.h = build_diffusion(cfg.diffusion);
    spec.noise = NoiseSpec(build_noise_values(cfg.noise));
    spec.horizon = cfg.horizon;
    spec.y0 = build_vector(cfg.initial, d);
    spec.validate();
    return spec;
}

RunningCost build_cost(const ScenarioConfig& cfg) {
    RunningCost rc;
    const double wy = cfg.cost.state_weight;
    const double wu = cfg.cost.control_weight;
    rc.l = [wy, wu](double, const SpectralState& y, const Vector& u) {
        return wy * y.squaredNorm() + wu * u.squaredNorm();
    };
    rc.d1 = wy;
    rc.d2 = wu;
    return rc;
}

AdmissibleSet build_admissible(const ScenarioConfig& cfg) {
    const auto m = static_cast<Eigen::Index>(matrix_cols(cfg.B, cfg.dimension));
    if (cfg.admissible.kind == "ball")
        return AdmissibleSet::ball(Vector::Zero(m), cfg.admissible.radius);
    Vector lower(m), upper(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        lower(i) = cfg.admissible.lower[static_cast<std::size_t>(i)];
        upper(i) = cfg.admissible.upper[static_cast<std::size_t>(i)];
    }
    return AdmissibleSet::box(std::move(lower), std::move(upper));
}

ControlSignal initial_control(const ScenarioConfig& cfg) {
    const auto m = static_cast<Eigen::Index>(matrix_cols(cfg.B, cfg.dimension));
    return ControlSignal::zero(cfg.horizon, m, cfg.control_intervals);
}

std::vector<double> build_grid(const ScenarioConfig& cfg, std::size_t steps_override) {
    const ProblemSpec spec = build_problem(cfg);
    const ControlSignal u = initial_control(cfg);
    std::vector<double> extra(u.breakpoints.begin() + 1, u.breakpoints.end() - 1);
    return make_grid(cfg.horizon, steps_override > 0 ? steps_override : cfg.grid_steps,
                     spec.impulses, extra);
}

ScenarioConfig example_preset() {
    ScenarioConfig cfg;
    cfg.name = "example";
    cfg.dimension = 32;
    cfg.spectrum.family = "sine_dirichlet";
    cfg.spectrum.shift = 0.25;
    cfg.bound_M = 1.0;
    cfg.B.kind = "identity";

    ImpulseConfig imp;
    imp.time = 0.5;
    imp.D.kind = "identity";
    imp.E.kind = "identity";
    imp.v.kind = "unit";
    imp.v.index = 0;
    imp.v.scale = 1.0 / std::numbers::sqrt2;  // sine-basis coefficient of sin(pi x)
    cfg.impulses.push_back(imp);

    cfg.drift.family = "affine_drift";
    cfg.drift.forcing_amp = 0.4;
    cfg.drift.forcing_mode = 0;
    cfg.drift.gain_offset = 5.0;

    cfg.diffusion.family = "saturating_scalar";
    cfg.diffusion.amp = 0.2;
    cfg.diffusion.state_mode = 0;
    cfg.diffusion.noise_mode = 0;

    cfg.noise.modes = 16;
    cfg.noise.family = "geometric";
    cfg.noise.first = 1.0;
    cfg.noise.ratio = 0.5;

    cfg.horizon = 1.0;
    cfg.initial.kind = "zero";
    cfg.grid_steps = 512;
    cfg.seed = 0;
    cfg.paths = 1000;
    cfg.lipschitz = {0.4, 0.4, 0.04, 0.04};
    cfg.cost = {"quadratic", 1.0, 1.0};
    cfg.admissible.kind = "ball";
    cfg.admissible.radius = 1.0;
    cfg.control_intervals = 16;
    return cfg;
}

}  // namespace isee
