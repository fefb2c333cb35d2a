#pragma once

#include "isee/control_signal.hpp"
#include "isee/dynamics.hpp"

#include <string>
#include <vector>

namespace isee {

// CSV renderers for the library outputs. Doubles are printed with 17
// significant digits, so equal values always produce equal bytes.

std::string format_double(double v);

/// Columns: t, mode_0 ... mode_{d-1}; left limits at impulse nodes.
std::string path_csv(const Path& path);

/// Side channel of post-jump states: k, t_k, mode_0 ... mode_{d-1}.
std::string plus_states_csv(const Path& path);

/// Columns: t, mean_sq_norm.
std::string ensemble_csv(const EnsembleReport& report);

/// Columns: iteration, distance, ratio (empty ratio on the first row or
/// after a zero denominator).
std::string iterate_distances_csv(const std::vector<double>& distances);

/// Columns: t_left, t_right, u_0 ... u_{m-1}.
std::string control_csv(const ControlSignal& u);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace isee
