#include "isee/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace isee {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string path_csv(const Path& path) {
    std::string out = "t";
    const Eigen::Index d = path.states.empty() ? 0 : path.states.front().size();
    for (Eigen::Index i = 0; i < d; ++i) out += ",mode_" + std::to_string(i);
    out += "\n";
    for (std::size_t n = 0; n < path.grid.size(); ++n) {
        out += format_double(path.grid[n]);
        for (Eigen::Index i = 0; i < d; ++i) out += "," + format_double(path.states[n](i));
        out += "\n";
    }
    return out;
}

std::string plus_states_csv(const Path& path) {
    std::string out = "k,t_k";
    const Eigen::Index d = path.states.empty() ? 0 : path.states.front().size();
    for (Eigen::Index i = 0; i < d; ++i) out += ",mode_" + std::to_string(i);
    out += "\n";
    for (std::size_t k = 0; k < path.plus_states.size(); ++k) {
        out += std::to_string(k + 1) + "," + format_double(path.grid[path.impulse_nodes[k]]);
        for (Eigen::Index i = 0; i < d; ++i)
            out += "," + format_double(path.plus_states[k](i));
        out += "\n";
    }
    return out;
}

std::string ensemble_csv(const EnsembleReport& report) {
    std::string out = "t,mean_sq_norm\n";
    for (std::size_t n = 0; n < report.grid.size(); ++n)
        out += format_double(report.grid[n]) + "," + format_double(report.mean_sq_norm[n]) +
               "\n";
    return out;
}

std::string iterate_distances_csv(const std::vector<double>& distances) {
    std::string out = "iteration,distance,ratio\n";
    for (std::size_t n = 0; n < distances.size(); ++n) {
        out += std::to_string(n + 1) + "," + format_double(distances[n]) + ",";
        if (n > 0 && distances[n - 1] != 0.0)
            out += format_double(distances[n] / distances[n - 1]);
        out += "\n";
    }
    return out;
}

std::string control_csv(const ControlSignal& u) {
    std::string out = "t_left,t_right";
    const Eigen::Index m = u.dim();
    for (Eigen::Index i = 0; i < m; ++i) out += ",u_" + std::to_string(i);
    out += "\n";
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        out += format_double(u.breakpoints[i]) + "," + format_double(u.breakpoints[i + 1]);
        for (Eigen::Index c = 0; c < m; ++c) out += "," + format_double(u.values[i](c));
        out += "\n";
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << content;
    if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace isee
