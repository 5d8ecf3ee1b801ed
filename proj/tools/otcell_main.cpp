// Command-line front end: run one association, sweep hotspot widths, or
// compare the fixed-point solver against the exhaustive oracle.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otcell/otcell.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitCheckFailed = 3;

int thread_cap() {
    if (const char* env = std::getenv("OTCELL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::string describe_density(bool uniform, const std::string& density_file, double sigma,
                             const std::vector<double>& center) {
    if (uniform) return "uniform";
    if (!density_file.empty()) return "file " + density_file;
    std::ostringstream os;
    os << "gaussian sigma " << otcell::detail::format_double(sigma) << " center "
       << otcell::detail::format_double(center[0]) << " "
       << otcell::detail::format_double(center[1]);
    return os.str();
}

struct RunOptions {
    std::string scenario_path;
    std::vector<int> grid{200, 200};
    std::string method = "ot";
    double sigma = 1000.0;
    std::vector<double> center{1300.0, 1300.0};
    bool uniform = false;
    std::string density_file;
    double payload_bits = 0.0;  // 0 = keep scenario value
    std::string out_dir;
    otcell::SolverConfig solver;
};

otcell::DensityGrid make_density(const otcell::Scenario& sc, const RunOptions& opt) {
    if (!opt.density_file.empty()) return otcell::load_density_grid(opt.density_file);
    if (opt.uniform) return otcell::uniform_density(sc.area, opt.grid[0], opt.grid[1]);
    return otcell::truncated_gaussian_density(sc.area, opt.center[0], opt.center[1], opt.sigma,
                                              opt.grid[0], opt.grid[1]);
}

void write_node_stats(const otcell::Scenario& sc, const std::vector<otcell::NodeStats>& stats,
                      const std::filesystem::path& path) {
    std::string out = "node_id,kind,x,y,mass,load,delay_contribution_s,mean_snr\n";
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const otcell::NodeSpec& n = sc.nodes[k];
        const otcell::NodeStats& s = stats[k];
        out += std::to_string(s.node_id);
        out += ',';
        out += otcell::to_string(n.kind);
        out += ',' + otcell::detail::format_double(n.x) + ',' + otcell::detail::format_double(n.y);
        out += ',' + otcell::detail::format_double(s.mass) + ',' +
               otcell::detail::format_double(s.load) + ',' +
               otcell::detail::format_double(s.delay_contribution) + ',' +
               otcell::detail::format_double(s.mean_snr) + '\n';
    }
    otcell::detail::write_file_atomic(path, out);
}

int cmd_run(const RunOptions& opt) {
    const otcell::Scenario base = otcell::load_scenario(opt.scenario_path);
    otcell::Scenario sc = base;
    if (opt.payload_bits > 0.0) sc.payload_bits = opt.payload_bits;
    otcell::validate_scenario(sc);
    const otcell::DensityGrid grid = make_density(sc, opt);

    otcell::Partition part;
    otcell::SolveTrace trace;
    if (opt.method == "snr") {
        part = otcell::snr_association(sc, grid);
        trace.converged = true;
    } else {
        auto [p, t] = otcell::ot_association(sc, grid, opt.solver);
        part = std::move(p);
        trace = std::move(t);
    }

    const double objective = otcell::average_delay(sc, grid, part);
    const std::vector<otcell::NodeStats> stats = otcell::per_cell_stats(sc, grid, part);

    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    otcell::save_partition_labels(part, dir / ("labels_" + opt.method + ".txt"));
    otcell::save_partition_masses(part, dir / ("masses_" + opt.method + ".csv"));
    write_node_stats(sc, stats, dir / ("nodes_" + opt.method + ".csv"));

    std::ostringstream summary;
    summary << "method " << opt.method << "\n"
            << "density " << describe_density(opt.uniform, opt.density_file, opt.sigma, opt.center)
            << "\n"
            << "grid " << grid.nx << " " << grid.ny << "\n"
            << "objective_s " << otcell::detail::format_double(objective) << "\n";
    if (opt.method == "ot")
        summary << "converged " << (trace.converged ? 1 : 0) << "\n"
                << "iterations " << trace.iterations << "\n";
    otcell::detail::write_file_atomic(dir / ("summary_" + opt.method + ".txt"), summary.str());

    std::cout << "objective_s " << otcell::detail::format_double(objective) << "\n";
    if (opt.method == "ot") {
        std::string tr = "iter,objective_s,mass_change\n";
        for (std::size_t i = 0; i < trace.objective.size(); ++i)
            tr += std::to_string(i + 1) + ',' + otcell::detail::format_double(trace.objective[i]) +
                  ',' + otcell::detail::format_double(trace.mass_change[i]) + '\n';
        otcell::detail::write_file_atomic(dir / "trace_ot.csv", tr);
        std::cout << "converged " << (trace.converged ? 1 : 0) << "\n";
        if (!trace.converged) return kExitNotConverged;
    }
    return 0;
}

int cmd_sweep(const std::string& scenario_path, std::vector<double> sigmas,
              const std::vector<int>& grid, const std::vector<double>& center,
              double payload_bits, const otcell::SolverConfig& solver,
              const std::string& out_csv) {
    otcell::Scenario sc = otcell::load_scenario(scenario_path);
    if (payload_bits > 0.0) sc.payload_bits = payload_bits;
    otcell::validate_scenario(sc);
    const std::vector<otcell::SweepRow> rows = otcell::sweep_sigma(
        sc, sigmas, center[0], center[1], grid[0], grid[1], solver, thread_cap());
    std::ostringstream os;
    otcell::write_sweep_csv(os, rows);
    const std::filesystem::path path(out_csv);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    otcell::detail::write_file_atomic(path, os.str());
    std::cout << os.str();
    return 0;
}

int cmd_oracle_check(std::uint64_t seed, int trials, const otcell::SolverConfig& solver) {
    std::mt19937_64 rng(seed);
    int matches = 0;
    int converged = 0;
    double max_gap = 0.0;
    std::ostringstream report;
    for (int i = 0; i < trials; ++i) {
        const otcell::ToyInstance toy = otcell::make_random_toy(rng);
        const otcell::OracleResult best = otcell::enumerate_optimal(toy.scenario, toy.points);
        const auto [part, trace] = otcell::ot_association(toy.scenario, toy.points, solver);
        const double solved = otcell::average_delay(toy.scenario, toy.points, part);
        const double gap = (solved - best.objective) / best.objective;
        if (gap <= 1e-6) {
            ++matches;
        } else {
            report << "trial " << i << ": solver " << otcell::detail::format_double(solved)
                   << " oracle " << otcell::detail::format_double(best.objective) << " gap "
                   << otcell::detail::format_double(gap) << " converged "
                   << (trace.converged ? 1 : 0) << "\n";
        }
        if (trace.converged) {
            ++converged;
            const double v = otcell::fixed_point_violation(toy.scenario, toy.points, part);
            if (v > 1e-9)
                report << "trial " << i << ": converged but certificate violated (" << v << ")\n";
        }
        max_gap = std::max(max_gap, gap);
    }
    const bool pass = matches * 100 >= trials * 95;
    std::cout << report.str();
    std::cout << "trials " << trials << "\n"
              << "matches " << matches << " (relative gap <= 1e-06)\n"
              << "converged " << converged << "\n"
              << "max_rel_gap " << otcell::detail::format_double(max_gap) << "\n"
              << (pass ? "PASS" : "FAIL") << " (require matches >= 95%)\n";
    return pass ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-optimal cell association for mixed aerial/terrestrial networks"};
    app.require_subcommand(1);

    otcell::SolverConfig solver;
    RunOptions run_opt;

    CLI::App* run = app.add_subcommand("run", "Solve one scenario and export the partition");
    run->add_option("--scenario", run_opt.scenario_path, "scenario JSON file")->required();
    run->add_option("--grid", run_opt.grid, "density grid size NX NY")->expected(2);
    run->add_option("--method", run_opt.method, "association method")
        ->check(CLI::IsMember({"snr", "ot"}));
    auto* sig = run->add_option("--sigma", run_opt.sigma, "hotspot st. dev., m");
    run->add_option("--center", run_opt.center, "hotspot center X Y, m")->expected(2);
    auto* uni = run->add_flag("--uniform", run_opt.uniform, "use a uniform density");
    auto* den = run->add_option("--density", run_opt.density_file, "density grid file");
    uni->excludes(sig)->excludes(den);
    den->excludes(sig);
    run->add_option("--b", run_opt.payload_bits, "payload bits override");
    run->add_option("--out", run_opt.out_dir, "output directory")->required();

    std::string sweep_scenario;
    std::vector<double> sweep_sigmas{200, 400, 600, 800, 1000, 1200};
    std::vector<int> sweep_grid{200, 200};
    std::vector<double> sweep_center{1300.0, 1300.0};
    double sweep_b = 0.0;
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "Delay vs hotspot width, CSV output");
    sweep->add_option("--scenario", sweep_scenario, "scenario JSON file")->required();
    sweep->add_option("--sigma", sweep_sigmas, "hotspot st. dev. list, m")
        ->expected(-1)
        ->check(CLI::PositiveNumber);
    sweep->add_option("--grid", sweep_grid, "density grid size NX NY")->expected(2);
    sweep->add_option("--center", sweep_center, "hotspot center X Y, m")->expected(2);
    sweep->add_option("--b", sweep_b, "payload bits override");
    sweep->add_option("--out", sweep_out, "output CSV path")->required();

    std::uint64_t seed = 0;
    int trials = 100;
    CLI::App* check = app.add_subcommand("oracle-check",
                                         "Random toy instances: solver vs exhaustive optimum");
    check->add_option("--seed", seed, "RNG seed");
    check->add_option("--trials", trials, "number of instances")->check(CLI::PositiveNumber);

    for (CLI::App* sub : {run, sweep, check}) {
        sub->add_option("--tol", solver.tol, "mass-change tolerance");
        sub->add_option("--max-iter", solver.max_iter, "iteration cap");
        sub->add_option("--damping", solver.damping, "mass damping factor");
    }

    CLI11_PARSE(app, argc, argv);
    run_opt.solver = solver;

    try {
        if (run->parsed()) return cmd_run(run_opt);
        if (sweep->parsed())
            return cmd_sweep(sweep_scenario, sweep_sigmas, sweep_grid, sweep_center, sweep_b,
                             solver, sweep_out);
        return cmd_oracle_check(seed, trials, solver);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
