#include "otma/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace otma;

namespace {

void add_common(CLI::App* cmd, RunConfig& c, std::string& config_path)
{
    cmd->add_option("--experiment", c.experiment, "ellipse, split or gallery:<shape>");
    cmd->add_option("--stencil-width", c.stencil_width, "wide stencil width (1-3)")->check(CLI::Range(1, 3));
    cmd->add_option("--dalpha", c.dalpha, "direction spacing of the boundary scheme");
    cmd->add_option("--filter-c", c.filter_c, "filter constant");
    cmd->add_option("--delta", c.delta, "regularization weight (raised to 1.1 K h if smaller)");
    cmd->add_option("--max-iterations", c.max_iterations);
    cmd->add_flag("--monotone-only", c.monotone_only, "disable the accurate scheme");
    cmd->add_option_function<std::string>("--bc", [&c](const std::string& s) { c.bc = parse_boundary_scheme(s); },
                                          "compact or wide");
    cmd->add_option("--config", config_path, "JSON file; its keys override the flags")->check(CLI::ExistingFile);
}

void print_report(const std::string& label, const RunResult& r, const ExperimentSpec& spec)
{
    const SolveReport& rep = r.solution.report;
    std::cout << label << ": " << (rep.converged ? "converged" : "FAILED") << " in " << rep.iterations
              << " iterations, residual " << rep.residual_norm << ", " << rep.wall_time << " s";
    if (spec.exact_map) {
        std::cout << ", map error " << r.map_error;
    }
    std::cout << ", containment " << r.containment << '\n';
    if (!rep.converged && !rep.message.empty()) {
        std::cout << "  " << rep.message << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optimal transport maps via the Monge-Ampere second boundary value problem"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    fs::path out = "otma_out";
    std::string nx_list = "64", ny_list = "64";
    std::size_t atoms = 100;

    auto* run = app.add_subcommand("run", "solve one problem and write u.csv, map.csv, report.json");
    add_common(run, cfg, config_path);
    run->add_option("--nx", cfg.nx, "source grid intervals per side");
    run->add_option("--ny", cfg.ny, "target boundary samples");
    run->add_option("--out", out, "output directory");

    auto* table = app.add_subcommand("table", "map error table over N_X x N_Y");
    add_common(table, cfg, config_path);
    table->add_option("--nx", nx_list, "comma separated");
    table->add_option("--ny", ny_list, "comma separated");
    table->add_option("--out", out, "output directory");

    auto* validate = app.add_subcommand("validate", "compare the solved map with a discrete assignment");
    add_common(validate, cfg, config_path);
    validate->add_option("--nx", cfg.nx);
    validate->add_option("--ny", cfg.ny);
    validate->add_option("--m", atoms, "atoms per measure")->check(CLI::Range(1, 400));

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            apply_config_file(cfg, config_path);
        }

        if (run->parsed()) {
            const ExperimentSpec spec = configured_spec(cfg);
            const Problem problem = build_configured_problem(spec, cfg);
            const RunResult r = run_experiment(problem, spec, cfg.nx, cfg.ny, cfg.run_options(), std::nullopt);
            write_run_outputs(out, r, spec);
            print_report(spec.name, r, spec);
            return r.solution.report.converged ? 0 : 1;
        }

        if (table->parsed()) {
            const ExperimentSpec spec = configured_spec(cfg);
            const TableResult t = run_table(spec, parse_int_list(nx_list), parse_int_list(ny_list), cfg.run_options());
            fs::create_directories(out);
            std::ofstream os(out / "error.csv");
            write_table_csv(os, t);
            write_table_csv(std::cout, t);
            return t.all_converged() ? 0 : 1;
        }

        if (validate->parsed()) {
            const ExperimentSpec spec = configured_spec(cfg);
            const Problem problem = build_configured_problem(spec, cfg);
            const RunResult r = run_experiment(problem, spec, cfg.nx, cfg.ny, cfg.run_options(), std::nullopt);
            print_report(spec.name, r, spec);
            const CrossValidation cv = cross_validate(spec.source_region, problem.target(), r.map, atoms);
            std::cout << "assignment discrepancy: max " << cv.max_discrepancy << ", mean " << cv.mean_discrepancy
                      << " (m = " << atoms << ")\n";
            return r.solution.report.converged ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "otma: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
