#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfns/manufactured.hpp"
#include "tfns/time_stepper.hpp"

namespace tfns {

/// Observed order between a finer and a coarser resolution:
/// |ln(e_f / e_c) / ln(N_f / N_c)|.
inline double convergence_rate(double err_fine, double err_coarse, double n_fine,
                               double n_coarse) {
    if (!(err_fine > 0.0) || !(err_coarse > 0.0) || !(n_fine > 0.0) || !(n_coarse > 0.0))
        throw std::domain_error("convergence_rate: inputs must be positive");
    return std::abs(std::log(err_fine / err_coarse) / std::log(n_fine / n_coarse));
}

struct StudyLevel {
    int resolution = 0;  // cells per side, or time step count
    double spacing = 0.0; // h or tau
    FieldErrors errors;
};

struct LevelRates {
    double u1 = 0.0;
    double u2 = 0.0;
    double p = 0.0;
};

/// Per-refinement errors at the final time and the observed rates between
/// consecutive levels. Append-only: levels are recorded in run order.
struct ErrorReport {
    enum class Axis { space, time };
    Axis axis = Axis::space;
    double alpha = 0.0;
    std::vector<StudyLevel> levels;
    std::vector<LevelRates> rates; // one entry per consecutive level pair
};

struct StudyOptions {
    double nu = 1.5;
    double t_final = 1.0;
    double picard_tol = 1e-10;
    int picard_max = 50;
    double linear_tol = 1e-12;
};

/// Optional per-level hook; receives the full run (ledger + diagnostics).
using StudyObserver = std::function<void(const RunResult&)>;

namespace detail {

inline void append_rates(ErrorReport& report) {
    report.rates.clear();
    for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
        const auto& coarse = report.levels[i];
        const auto& fine = report.levels[i + 1];
        report.rates.push_back(
            {convergence_rate(fine.errors.u1, coarse.errors.u1, fine.resolution,
                              coarse.resolution),
             convergence_rate(fine.errors.u2, coarse.errors.u2, fine.resolution,
                              coarse.resolution),
             convergence_rate(fine.errors.p, coarse.errors.p, fine.resolution,
                              coarse.resolution)});
    }
}

inline FieldErrors final_time_errors(const RunResult& result, double t_final) {
    const FieldCoefficients fields = result.final_fields();
    return l2_error(result.space, fields, [t_final](double x, double y) {
        const auto exact = manufactured::fields(x, y, t_final);
        return std::array<double, 3>{exact.u1, exact.u2, exact.p};
    });
}

} // namespace detail

/// Manufactured-problem errors over a mesh refinement sequence at a fixed
/// time step (default tau = 1/8, overridable to isolate the spatial error).
inline ErrorReport run_space_study(double alpha, std::span<const int> mesh_levels,
                                   double tau_fixed = 0.125,
                                   const StudyOptions& options = {},
                                   const StudyObserver& observer = {}) {
    if (!(tau_fixed > 0.0))
        throw std::domain_error("run_space_study: tau_fixed must be positive");

    ErrorReport report;
    report.axis = ErrorReport::Axis::space;
    report.alpha = alpha;
    for (const int n : mesh_levels) {
        SolverConfig config;
        config.alpha = alpha;
        config.nu = options.nu;
        config.t_final = options.t_final;
        config.num_steps = std::max(
            1, static_cast<int>(std::llround(options.t_final / tau_fixed)));
        config.cells_per_side = n;
        config.picard_tol = options.picard_tol;
        config.picard_max = options.picard_max;
        config.linear_tol = options.linear_tol;
        config.forcing = ForcingMode::manufactured;

        const RunResult result = run(config);
        if (observer)
            observer(result);
        report.levels.push_back({n, result.space.mesh.h,
                                 detail::final_time_errors(result, options.t_final)});
    }
    detail::append_rates(report);
    return report;
}

/// Manufactured-problem errors over a time-step sequence on a fixed mesh
/// (default n = 16).
inline ErrorReport run_time_study(double alpha, std::span<const int> step_counts,
                                  int n_fixed = 16, const StudyOptions& options = {},
                                  const StudyObserver& observer = {}) {
    ErrorReport report;
    report.axis = ErrorReport::Axis::time;
    report.alpha = alpha;
    for (const int steps : step_counts) {
        SolverConfig config;
        config.alpha = alpha;
        config.nu = options.nu;
        config.t_final = options.t_final;
        config.num_steps = steps;
        config.cells_per_side = n_fixed;
        config.picard_tol = options.picard_tol;
        config.picard_max = options.picard_max;
        config.linear_tol = options.linear_tol;
        config.forcing = ForcingMode::manufactured;

        const RunResult result = run(config);
        if (observer)
            observer(result);
        report.levels.push_back({steps, config.tau(),
                                 detail::final_time_errors(result, options.t_final)});
    }
    detail::append_rates(report);
    return report;
}

/// Fixed schema: level,h_or_tau,err_u1,err_u2,err_p,rate_u1,rate_u2,rate_p.
/// The first level has no rate entries.
inline void write_report_csv(const ErrorReport& report, std::ostream& out) {
    out << "level,h_or_tau,err_u1,err_u2,err_p,rate_u1,rate_u2,rate_p\n";
    char buffer[512];
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& level = report.levels[i];
        if (i == 0) {
            std::snprintf(buffer, sizeof buffer, "%d,%.17g,%.17g,%.17g,%.17g,,,\n",
                          level.resolution, level.spacing, level.errors.u1,
                          level.errors.u2, level.errors.p);
        } else {
            const auto& rate = report.rates[i - 1];
            std::snprintf(buffer, sizeof buffer,
                          "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          level.resolution, level.spacing, level.errors.u1,
                          level.errors.u2, level.errors.p, rate.u1, rate.u2, rate.p);
        }
        out << buffer;
    }
}

} // namespace tfns
