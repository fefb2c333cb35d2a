#pragma once

#include "isee/control.hpp"
#include "isee/dynamics.hpp"
#include "isee/wellposedness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isee {

/// Config parse/validation failure carrying every detected violation.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string summary, std::vector<std::string> issues_);
    const std::vector<std::string>& issues() const { return issues_list; }

private:
    std::vector<std::string> issues_list;
};

// Declarative scenario description. Drift/diffusion come from a closed
// registry of parameterized families so the Lipschitz audits stay
// meaningful and files stay portable.

struct SpectrumConfig {
    std::string family = "explicit";  // explicit | sine_dirichlet | constant
    std::vector<double> values;       // explicit
    double shift = 0.0;               // sine_dirichlet: mu_k = -(k^2 pi^2 + shift)
    double value = 0.0;               // constant
};

struct MatrixConfig {
    std::string kind = "zero";  // zero | identity | scaled_identity | dense
    double scale = 1.0;
    std::vector<std::vector<double>> values;
    std::size_t cols = 0;  // column count for the structured kinds; 0 = square
};

struct VectorConfig {
    std::string kind = "zero";  // zero | unit | dense
    std::size_t index = 0;
    double scale = 1.0;
    std::vector<double> values;
};

struct ImpulseConfig {
    double time = 0.0;
    MatrixConfig D;
    MatrixConfig E;
    VectorConfig v;
};

struct DriftConfig {
    std::string family = "zero";  // zero | linear | affine_drift | saturating | trig_forcing
    double gain = 0.0;            // linear
    double forcing_amp = 0.0;     // affine_drift
    std::size_t forcing_mode = 0;
    double gain_offset = 1.0;
    double scale = 0.0;  // saturating
    double amp = 0.0;    // trig_forcing
    double freq = 1.0;
    double phase = 0.0;
    std::size_t mode = 0;
};

struct DiffusionConfig {
    std::string family = "zero";  // zero | constant | linear | saturating_scalar
    double sigma = 0.0;           // constant
    double gain = 0.0;            // linear
    double amp = 0.0;             // saturating_scalar
    std::size_t state_mode = 0;
    std::size_t noise_mode = 0;
};

struct NoiseConfig {
    std::size_t modes = 16;
    std::string family = "geometric";  // explicit | geometric
    std::vector<double> values;
    double first = 1.0;
    double ratio = 0.5;
};

struct CostConfig {
    std::string family = "quadratic";
    double state_weight = 1.0;
    double control_weight = 1.0;
};

struct AdmissibleConfig {
    std::string kind = "ball";  // ball | box
    double radius = 1.0;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::size_t dimension = 32;
    SpectrumConfig spectrum;
    double bound_M = 1.0;
    MatrixConfig B;
    std::vector<ImpulseConfig> impulses;
    DriftConfig drift;
    DiffusionConfig diffusion;
    NoiseConfig noise;
    double horizon = 1.0;
    VectorConfig initial;
    std::size_t grid_steps = 512;
    std::uint64_t seed = 0;
    std::size_t paths = 1000;
    LipschitzBundle lipschitz;
    CostConfig cost;
    AdmissibleConfig admissible;
    std::size_t control_intervals = 16;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
/// Canonical rendering: sorted keys, two-space indent, shortest float
/// round-trip. serialize(parse(serialize(c))) == serialize(c).
std::string serialize_config(const ScenarioConfig& cfg);

ProblemSpec build_problem(const ScenarioConfig& cfg);
RunningCost build_cost(const ScenarioConfig& cfg);
AdmissibleSet build_admissible(const ScenarioConfig& cfg);
ControlSignal initial_control(const ScenarioConfig& cfg);
std::vector<double> build_grid(const ScenarioConfig& cfg, std::size_t steps_override = 0);

/// Built-in demo scenario: dissipative diagonal dynamics on the unit
/// interval, one unit impulse at t = 1/2 with a sine-profile input,
/// trigonometric-forcing drift with a 1/(t+5) linear gain, and a saturating
/// scalar diffusion on the first noise mode; quadratic running cost.
ScenarioConfig example_preset();

}  // namespace isee
