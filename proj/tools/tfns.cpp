// Command-line front end: weights table, single solver runs with diagnostics
// and field export, and the two manufactured-solution convergence studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfns/field_export.hpp"
#include "tfns/verification.hpp"

namespace {

struct SharedOptions {
    double alpha = 0.5;
    double nu = 1.5;
    double t_final = 1.0;
    int num_steps = 8;
    int cells = 8;
    double picard_tol = 1e-10;
    int picard_max = 50;
    double linear_tol = 1e-12;
    std::string out_dir;
    std::string format = "vtk";
    double tau_override = 0.125;
};

std::ostream& open_or_stdout(std::ofstream& file, const SharedOptions& shared,
                             const std::string& name) {
    if (shared.out_dir.empty())
        return std::cout;
    std::filesystem::create_directories(shared.out_dir);
    const std::string path = (std::filesystem::path(shared.out_dir) / name).string();
    file.open(path);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

void print_weights(double alpha, int count) {
    const tfns::QuadratureWeights qw = tfns::compute_weights(alpha, count, 1.0);
    std::printf("k,w_k,partial_sum\n");
    double partial = 0.0;
    for (int k = 0; k < count; ++k) {
        partial += qw.weights[k];
        std::printf("%d,%.17g,%.17g\n", k, qw.weights[k], partial);
    }
}

void run_single(const SharedOptions& shared, const std::string& forcing) {
    tfns::SolverConfig config;
    config.alpha = shared.alpha;
    config.nu = shared.nu;
    config.t_final = shared.t_final;
    config.num_steps = shared.num_steps;
    config.cells_per_side = shared.cells;
    config.picard_tol = shared.picard_tol;
    config.picard_max = shared.picard_max;
    config.linear_tol = shared.linear_tol;
    if (forcing == "manufactured")
        config.forcing = tfns::ForcingMode::manufactured;
    else if (forcing == "zero")
        config.forcing = tfns::ForcingMode::zero;
    else if (forcing == "none-with-initial-field")
        config.forcing = tfns::ForcingMode::none_with_initial_field;
    else
        throw std::runtime_error("unknown forcing mode '" + forcing + "'");

    const tfns::RunResult result = tfns::run(config);

    std::ofstream diag_file;
    tfns::write_diagnostics_csv(result.diagnostics,
                                open_or_stdout(diag_file, shared, "diagnostics.csv"));

    if (!shared.out_dir.empty()) {
        const bool vtk = shared.format == "vtk";
        const std::string name = vtk ? "fields.vtk" : "fields.csv";
        const std::string path =
            (std::filesystem::path(shared.out_dir) / name).string();
        tfns::export_fields(result.space, result.final_fields(), path,
                            vtk ? tfns::ExportFormat::vtk : tfns::ExportFormat::csv);
        std::fprintf(stderr, "fields written to %s\n", path.c_str());
    }

    if (config.forcing == tfns::ForcingMode::manufactured && config.num_steps > 0) {
        const double t_final = config.t_final;
        const tfns::FieldErrors err =
            tfns::l2_error(result.space, result.final_fields(), [t_final](double x, double y) {
                const auto exact = tfns::manufactured::fields(x, y, t_final);
                return std::array<double, 3>{exact.u1, exact.u2, exact.p};
            });
        std::fprintf(stderr, "final-time L2 errors: u1 %.6e, u2 %.6e, p %.6e\n", err.u1,
                     err.u2, err.p);
    }
}

tfns::StudyOptions study_options(const SharedOptions& shared) {
    tfns::StudyOptions options;
    options.nu = shared.nu;
    options.t_final = shared.t_final;
    options.picard_tol = shared.picard_tol;
    options.picard_max = shared.picard_max;
    options.linear_tol = shared.linear_tol;
    return options;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-fractional Navier-Stokes solver and verification harness"};
    app.set_config("--config", "", "plain key=value file; command line overrides it");

    SharedOptions shared;
    app.add_option("--alpha", shared.alpha, "fractional order in (0, 1]");
    app.add_option("--nu", shared.nu, "viscosity")->capture_default_str();
    app.add_option("--t-final", shared.t_final, "final time")->capture_default_str();
    app.add_option("--nt", shared.num_steps, "number of time steps");
    CLI::Option* cells_option = app.add_option("--n", shared.cells, "mesh cells per side");
    app.add_option("--picard-tol", shared.picard_tol, "Picard relative increment tolerance");
    app.add_option("--picard-max", shared.picard_max, "Picard iteration budget");
    app.add_option("--linear-tol", shared.linear_tol, "linear solver residual tolerance");
    app.add_option("--out-dir", shared.out_dir, "output directory (default: stdout)");
    app.add_option("--format", shared.format, "field export format")
        ->check(CLI::IsMember({"vtk", "csv"}));
    app.add_option("--tau-override", shared.tau_override,
                   "fixed time step for the spatial study");

    int weight_count = 16;
    CLI::App* weights = app.add_subcommand("weights", "print k, w_k, partial-sum CSV");
    weights->add_option("--count", weight_count, "number of weights");
    weights->fallthrough();

    std::string forcing = "manufactured";
    CLI::App* run_cmd = app.add_subcommand("run", "run one solve; emit per-step "
                                                  "diagnostics CSV and optional fields");
    run_cmd->add_option("--forcing", forcing, "manufactured | zero | none-with-initial-field")
        ->check(CLI::IsMember({"manufactured", "zero", "none-with-initial-field"}));
    run_cmd->fallthrough();

    std::vector<int> mesh_levels{4, 8, 16};
    CLI::App* space_cmd =
        app.add_subcommand("converge-space", "mesh refinement study at fixed tau");
    space_cmd->add_option("--levels", mesh_levels, "mesh sequence")->delimiter(',');
    space_cmd->fallthrough();

    std::vector<int> step_counts{4, 8, 16, 32};
    CLI::App* time_cmd =
        app.add_subcommand("converge-time", "time step study on a fixed mesh");
    time_cmd->add_option("--steps", step_counts, "time step sequence")->delimiter(',');
    time_cmd->fallthrough();

    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (weights->parsed()) {
            print_weights(shared.alpha, weight_count);
        } else if (run_cmd->parsed()) {
            run_single(shared, forcing);
        } else if (space_cmd->parsed()) {
            const tfns::ErrorReport report = tfns::run_space_study(
                shared.alpha, mesh_levels, shared.tau_override, study_options(shared));
            std::ofstream file;
            tfns::write_report_csv(report, open_or_stdout(file, shared, "space_study.csv"));
        } else if (time_cmd->parsed()) {
            // default fixed mesh for the time study is n = 16
            const int fixed_cells = cells_option->count() > 0 ? shared.cells : 16;
            const tfns::ErrorReport report = tfns::run_time_study(
                shared.alpha, step_counts, fixed_cells, study_options(shared));
            std::ofstream file;
            tfns::write_report_csv(report, open_or_stdout(file, shared, "time_study.csv"));
        }
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 1;
    }
    return 0;
}
