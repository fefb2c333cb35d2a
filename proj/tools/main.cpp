// Command-line front end: scenario loading, subcommand dispatch, CSV/JSON
// artifact writing. Subcommands: check, simulate, picard, optimize, example.

#include <CLI11.hpp>
#include <json.hpp>

#include "isee/control.hpp"
#include "isee/csvio.hpp"
#include "isee/parallel.hpp"
#include "isee/picard.hpp"
#include "isee/scenario.hpp"
#include "isee/wellposedness.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace isee;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t paths = 0;
    bool paths_set = false;
    double dt = 0.0;
    int threads = 0;
};

/// Removes everything it recorded unless commit() ran first.
class OutputGuard {
public:
    ~OutputGuard() {
        if (committed_) return;
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
    void write(const fs::path& p, const std::string& content) {
        write_text_file(p.string(), content);
        written_.push_back(p);
    }
    void commit() { committed_ = true; }

private:
    std::vector<fs::path> written_;
    bool committed_ = false;
};

ScenarioConfig load_scenario(const Options& opt) {
    ScenarioConfig cfg = opt.config_path.empty() ? example_preset()
                                                 : load_config(opt.config_path);
    if (opt.seed_set) cfg.seed = opt.seed;
    if (opt.paths_set) cfg.paths = opt.paths;
    if (opt.dt > 0.0)
        cfg.grid_steps = static_cast<std::size_t>(std::ceil(cfg.horizon / opt.dt));
    return cfg;
}

void write_scenario(OutputGuard& guard, const fs::path& dir, const ScenarioConfig& cfg) {
    guard.write(dir / "scenario.json", serialize_config(cfg));
}

int run_check(const Options& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    const ProblemSpec spec = build_problem(cfg);
    const ConstantsReport report = theorem1_check(spec, cfg.lipschitz);
    fs::create_directories(opt.out_dir);
    OutputGuard guard;
    write_scenario(guard, opt.out_dir, cfg);
    guard.write(fs::path(opt.out_dir) / "constants.json", constants_to_json(report) + "\n");
    guard.commit();
    std::cout << "check: verdict_thm1=" << (report.verdict_thm1 ? "true" : "false")
              << " verdict_thm2=" << (report.verdict_thm2 ? "true" : "false");
    if (!report.binding_constraint().empty())
        std::cout << " binding: " << report.binding_constraint();
    std::cout << "\n";
    return 0;
}

int run_simulate(const Options& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    const ProblemSpec spec = build_problem(cfg);
    const ControlSignal u = initial_control(cfg);
    const auto grid = build_grid(cfg);
    const NoisePath noise = sample_increments(spec.noise, grid, cfg.seed, 0);
    const Path path = simulate_path(spec, u, noise);
    const EnsembleReport ensemble =
        monte_carlo(spec, u, grid, cfg.paths, cfg.seed, opt.threads);

    fs::create_directories(opt.out_dir);
    OutputGuard guard;
    write_scenario(guard, opt.out_dir, cfg);
    guard.write(fs::path(opt.out_dir) / "path.csv", path_csv(path));
    guard.write(fs::path(opt.out_dir) / "path_plus.csv", plus_states_csv(path));
    guard.write(fs::path(opt.out_dir) / "ensemble.csv", ensemble_csv(ensemble));
    guard.commit();
    std::cout << "simulate: " << cfg.paths << " paths, sup_t mean||y||^2 = "
              << format_double(ensemble.sup_mean_sq_norm) << " at t = "
              << format_double(ensemble.argmax_time) << "\n";
    return 0;
}

int run_picard(const Options& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    const ProblemSpec spec = build_problem(cfg);
    const ControlSignal u = initial_control(cfg);
    const auto grid = build_grid(cfg);
    const std::size_t ensemble_size = opt.paths_set ? cfg.paths : 256;
    std::vector<NoisePath> ensemble;
    ensemble.reserve(ensemble_size);
    for (std::size_t p = 0; p < ensemble_size; ++p)
        ensemble.push_back(sample_increments(spec.noise, grid, cfg.seed, p));

    const double tol = 1e-8;
    const std::size_t max_iter = 50;
    const PicardResult result =
        picard_solve(spec, u, ensemble, spec.y0, tol, max_iter, opt.threads);

    nlohmann::json report;
    report["converged"] = result.converged;
    report["sweeps"] = result.sweeps;
    report["tolerance"] = tol;
    report["ensemble_size"] = ensemble_size;
    report["final_distance"] = result.distances.empty() ? 0.0 : result.distances.back();
    if (result.distances.size() >= 3) {
        const auto summary = contraction_ratio(result.distances);
        report["tail_contraction_ratio"] = summary.tail_max;
    }

    fs::create_directories(opt.out_dir);
    OutputGuard guard;
    write_scenario(guard, opt.out_dir, cfg);
    guard.write(fs::path(opt.out_dir) / "picard.csv",
                iterate_distances_csv(result.distances));
    guard.write(fs::path(opt.out_dir) / "picard_report.json", report.dump(2) + "\n");
    guard.commit();
    std::cout << "picard: " << (result.converged ? "converged" : "did not converge")
              << " after " << result.sweeps << " sweeps, last distance "
              << format_double(report["final_distance"].get<double>()) << "\n";
    return result.converged ? 0 : 1;
}

int run_optimize(const Options& opt, std::size_t budget, std::size_t default_cost_paths,
                 const ScenarioConfig& cfg, nlohmann::json* summary_out = nullptr,
                 OutputGuard* outer_guard = nullptr) {
    const ProblemSpec spec = build_problem(cfg);
    const RunningCost rc = build_cost(cfg);
    const AdmissibleSet set = build_admissible(cfg);
    const auto grid = build_grid(cfg);

    OptimizeOptions opts;
    opts.budget = budget;
    opts.seed = cfg.seed;
    opts.cost_seed = cfg.seed;
    opts.cost_paths = opt.paths_set ? cfg.paths : default_cost_paths;
    opts.threads = opt.threads;
    const OptimizeResult result =
        optimize(spec, rc, set, initial_control(cfg), grid, opts);

    std::string history = "iteration,J_best,J_current,step_norm\n";
    for (const auto& row : result.history)
        history += std::to_string(row.iteration) + "," + format_double(row.j_best) + "," +
                   format_double(row.j_current) + "," + format_double(row.step_norm) + "\n";

    fs::create_directories(opt.out_dir);
    OutputGuard local_guard;
    OutputGuard& guard = outer_guard ? *outer_guard : local_guard;
    if (!outer_guard) write_scenario(guard, opt.out_dir, cfg);
    guard.write(fs::path(opt.out_dir) / "history.csv", history);
    guard.write(fs::path(opt.out_dir) / "control.csv", control_csv(result.u_star));

    nlohmann::json report;
    report["J_init"] = result.history.front().j_current;
    report["J_star"] = result.j_star.j;
    report["J_star_standard_error"] = result.j_star.standard_error;
    report["evaluations"] = result.evaluations;
    report["budget"] = budget;
    guard.write(fs::path(opt.out_dir) / "optimize_report.json", report.dump(2) + "\n");
    if (summary_out) *summary_out = report;
    if (!outer_guard) guard.commit();
    std::cout << "optimize: J " << format_double(report["J_init"].get<double>()) << " -> "
              << format_double(result.j_star.j) << " in " << result.evaluations
              << " evaluations\n";
    return 0;
}

int run_example(const Options& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    const ProblemSpec spec = build_problem(cfg);
    const ControlSignal u = initial_control(cfg);
    const auto grid = build_grid(cfg);

    fs::create_directories(opt.out_dir);
    OutputGuard guard;
    write_scenario(guard, opt.out_dir, cfg);

    // 1. certify the sufficient conditions
    const ConstantsReport constants = theorem1_check(spec, cfg.lipschitz);
    guard.write(fs::path(opt.out_dir) / "constants.json",
                constants_to_json(constants) + "\n");

    // 2. ensemble statistics
    const std::size_t n_paths = opt.paths_set ? cfg.paths : 10000;
    const EnsembleReport ensemble =
        monte_carlo(spec, u, grid, n_paths, cfg.seed, opt.threads);
    guard.write(fs::path(opt.out_dir) / "ensemble.csv", ensemble_csv(ensemble));

    // 3. control search (lean ensemble; common random numbers keep the
    // comparisons coherent)
    nlohmann::json opt_report;
    Options sub = opt;
    sub.paths_set = false;
    run_optimize(sub, 500, 32, cfg, &opt_report, &guard);

    nlohmann::json summary;
    summary["scenario"] = cfg.name;
    summary["verdict_thm1"] = constants.verdict_thm1;
    summary["verdict_thm2"] = constants.verdict_thm2;
    summary["binding_constraint"] = constants.binding_constraint();
    summary["ensemble_paths"] = n_paths;
    summary["sup_mean_sq_norm"] = ensemble.sup_mean_sq_norm;
    summary["optimize"] = opt_report;
    summary["artifacts"] = {"scenario.json", "constants.json", "ensemble.csv",
                            "history.csv",  "control.csv",    "optimize_report.json"};
    guard.write(fs::path(opt.out_dir) / "summary.json", summary.dump(2) + "\n");
    guard.commit();
    std::cout << "example: wrote constants, ensemble (" << n_paths
              << " paths) and optimization history to " << opt.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) try {
    CLI::App app{"impulsive stochastic evolution equations: simulation, "
                 "well-posedness certificates, and control search"};
    app.require_subcommand(1);

    Options opt;
    std::string cmd;
    for (const char* name : {"check", "simulate", "picard", "optimize", "example"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "scenario file (JSON)");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "noise seed")
            ->each([&opt](const std::string&) { opt.seed_set = true; });
        sub->add_option("--paths", opt.paths, "Monte-Carlo path count")
            ->each([&opt](const std::string&) { opt.paths_set = true; });
        sub->add_option("--dt", opt.dt, "target step width (overrides grid_steps)");
        sub->add_option("--threads", opt.threads,
                        "worker threads (default: ISEE_THREADS or hardware)");
        sub->callback([&cmd, name] { cmd = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd == "check") return run_check(opt);
        if (cmd == "simulate") return run_simulate(opt);
        if (cmd == "picard") return run_picard(opt);
        if (cmd == "optimize") {
            const ScenarioConfig cfg = load_scenario(opt);
            return run_optimize(opt, 2000, 128, cfg);
        }
        return run_example(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
} catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
}
