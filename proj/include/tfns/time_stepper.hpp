#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tfns/fem_assembly.hpp"
#include "tfns/frac_quadrature.hpp"
#include "tfns/manufactured.hpp"
#include "tfns/saddle_solver.hpp"

namespace tfns {

enum class ForcingMode {
    manufactured,            // manufactured forcing, manufactured initial field
    zero,                    // f = 0, u0 = 0
    none_with_initial_field, // f = 0, manufactured initial field
};

struct SolverConfig {
    double alpha = 0.5;
    double nu = 1.5;
    double t_final = 1.0;
    int num_steps = 8;
    int cells_per_side = 8;
    double picard_tol = 1e-10;
    int picard_max = 50;
    double linear_tol = 1e-12;
    ForcingMode forcing = ForcingMode::manufactured;

    double tau() const { return t_final / num_steps; }

    void validate() const {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::domain_error("SolverConfig: alpha must lie in (0, 1]");
        if (!(nu > 0.0))
            throw std::domain_error("SolverConfig: nu must be positive");
        if (!(t_final > 0.0))
            throw std::domain_error("SolverConfig: t_final must be positive");
        if (num_steps < 0)
            throw std::domain_error("SolverConfig: num_steps must be >= 0");
        if (cells_per_side < 1)
            throw std::domain_error("SolverConfig: cells_per_side must be >= 1");
        if (!(picard_tol > 0.0) || picard_max < 1 || !(linear_tol > 0.0))
            throw std::domain_error("SolverConfig: invalid iteration controls");
    }
};

/// One accepted step: coefficients plus the momentum residual
/// r = A u + N(u) u - Bᵀ p frozen at acceptance (never recomputed, so the
/// history sum is bitwise stable for the rest of the run).
struct HistoryStep {
    Eigen::VectorXd velocity;
    Eigen::VectorXd pressure;
    Eigen::VectorXd momentum_residual;
    double time = 0.0;
};

struct HistoryLedger {
    Eigen::VectorXd initial_velocity;
    std::vector<HistoryStep> steps;
    std::vector<Eigen::VectorXd> load_vectors; // (f^j, v) at t_j, j = 1..n
    std::size_t residual_accumulations = 0;    // weighted history axpys performed
};

struct StepDiagnostics {
    int step = 0;
    double time = 0.0;
    int picard_iterations = 0;
    double linear_residual = 0.0;
    double velocity_norm = 0.0;   // L2 (mass) norm of u^n
    double divergence_norm = 0.0; // ‖B u^n‖_2
    double pressure_mean = 0.0;   // mᵀ p^n
    double pressure_norm = 0.0;   // ‖p^n‖_2
};

/// Spatial forcing snapshot factory: time t -> f(., ., t).
using ForcingSampler = std::function<SpatialVectorFn(double)>;

inline double mass_norm(const Eigen::SparseMatrix<double>& mass, const Eigen::VectorXd& v) {
    return std::sqrt(std::max(0.0, v.dot(mass * v)));
}

/// Manufactured forcing with the Caputo factor computed once per distinct
/// time level and cached.
inline ForcingSampler make_manufactured_sampler(double alpha, double nu) {
    auto cache = std::make_shared<std::map<double, double>>();
    return [alpha, nu, cache](double t) -> SpatialVectorFn {
        auto it = cache->find(t);
        if (it == cache->end())
            it = cache->emplace(t, caputo_decay_factor(alpha, t)).first;
        const double decay = it->second;
        return [nu, t, decay](double x, double y) {
            return manufactured::forcing_with_decay(nu, x, y, t, decay);
        };
    };
}

inline ForcingSampler make_zero_sampler() {
    return [](double) -> SpatialVectorFn {
        return [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    };
}

/// Constrained L2 projection of the initial velocity onto the discretely
/// divergence-free subspace: mass-matrix saddle system with the mean row.
inline HistoryLedger initialize(const SolverConfig& config, const MixedSpace& space,
                                const AssembledOperators& ops, const SpatialVectorFn& u0) {
    config.validate();
    const Eigen::VectorXd rhs = assemble_forcing(space, u0);
    const Eigen::VectorXd zero_p =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.pressure_dofs));
    const SaddleSystem system =
        make_saddle_system(space, ops.mass, ops.divergence, 1.0, rhs, zero_p);
    const SaddleSolution sol = solve(system, config.linear_tol);

    HistoryLedger ledger;
    ledger.initial_velocity = sol.velocity;
    return ledger;
}

/// One step of the fully discrete scheme: the current step is implicit with
/// Picard-linearized convection; steps 1..n-1 enter through the weighted sum
/// of frozen momentum residuals and load vectors.
inline StepDiagnostics advance(HistoryLedger& ledger, const QuadratureWeights& weights,
                               const MixedSpace& space, const AssembledOperators& ops,
                               const SolverConfig& config, const ForcingSampler& sampler) {
    const std::size_t n = ledger.steps.size() + 1;
    if (config.num_steps < 1)
        throw std::invalid_argument("advance: config has no time steps");
    if (weights.count() < n)
        throw std::invalid_argument("advance: weights do not cover the step index");
    const double tau = config.tau();
    const double t_n = static_cast<double>(n) * tau;
    const double beta0 = weights.beta0;
    const double coupling = beta0 * weights.weights[0];

    // cached into the ledger only once the step is accepted
    const Eigen::VectorXd current_load = assemble_forcing(space, sampler(t_n));

    Eigen::VectorXd rhs = ops.mass * ledger.initial_velocity;
    rhs += beta0 * weights.weights[0] * current_load;
    for (std::size_t k = 1; k < n; ++k)
        rhs += beta0 * weights.weights[k] * ledger.load_vectors[n - 1 - k];
    for (std::size_t k = 1; k < n; ++k)
        rhs -= beta0 * weights.weights[k] * ledger.steps[n - 1 - k].momentum_residual;
    ledger.residual_accumulations += n - 1;

    const Eigen::VectorXd zero_p =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.pressure_dofs));

    Eigen::VectorXd transport =
        ledger.steps.empty() ? ledger.initial_velocity : ledger.steps.back().velocity;
    Eigen::VectorXd velocity, pressure;
    double last_increment = 0.0;
    double linear_residual = 0.0;
    int iterations = 0;
    bool converged = false;

    for (int m = 0; m < config.picard_max; ++m) {
        const Eigen::SparseMatrix<double> convection =
            assemble_convection(space, {transport, zero_p, t_n});
        const Eigen::SparseMatrix<double> velocity_block =
            ops.mass + coupling * (ops.stiffness + convection);
        const SaddleSystem system =
            make_saddle_system(space, velocity_block, ops.divergence, coupling, rhs, zero_p);
        const SaddleSolution sol = solve(system, config.linear_tol);

        const double increment = mass_norm(ops.mass, sol.velocity - transport);
        const double scale = std::max(mass_norm(ops.mass, sol.velocity), 1e-300);
        velocity = sol.velocity;
        pressure = sol.pressure;
        linear_residual = sol.relative_residual;
        last_increment = increment / scale;
        iterations = m + 1;
        transport = sol.velocity;
        if (increment <= config.picard_tol * scale) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw PicardError("advance: Picard iteration did not converge",
                          static_cast<int>(n), last_increment);

    // freeze the momentum residual of the accepted step (zero on masked rows)
    const Eigen::SparseMatrix<double> convection =
        assemble_convection(space, {velocity, pressure, t_n});
    Eigen::VectorXd residual = ops.stiffness * velocity + convection * velocity -
                               ops.divergence.transpose() * pressure;
    for (std::size_t i = 0; i < space.dirichlet_mask.size(); ++i)
        if (space.dirichlet_mask[i])
            residual[static_cast<Eigen::Index>(i)] = 0.0;

    StepDiagnostics diag;
    diag.step = static_cast<int>(n);
    diag.time = t_n;
    diag.picard_iterations = iterations;
    diag.linear_residual = linear_residual;
    diag.velocity_norm = mass_norm(ops.mass, velocity);
    diag.divergence_norm = (ops.divergence * velocity).norm();
    diag.pressure_mean = ops.mean_row.dot(pressure);
    diag.pressure_norm = pressure.norm();

    ledger.load_vectors.push_back(current_load);
    ledger.steps.push_back({std::move(velocity), std::move(pressure),
                            std::move(residual), t_n});
    return diag;
}

struct RunResult {
    MixedSpace space;
    AssembledOperators operators;
    QuadratureWeights weights;
    HistoryLedger ledger;
    std::vector<StepDiagnostics> diagnostics;

    FieldCoefficients final_fields() const {
        if (ledger.steps.empty())
            return {ledger.initial_velocity,
                    Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.pressure_dofs)),
                    0.0};
        const auto& last = ledger.steps.back();
        return {last.velocity, last.pressure, last.time};
    }
};

/// Full pipeline for a config: mesh, space, operators, projection of the
/// initial field, then num_steps scheme steps. Deterministic for fixed config.
inline RunResult run(const SolverConfig& config) {
    config.validate();

    RunResult result;
    result.space = build_mixed_space(build_structured_mesh(config.cells_per_side));
    result.operators = assemble_operators(result.space, config.nu);

    SpatialVectorFn u0;
    ForcingSampler sampler;
    switch (config.forcing) {
    case ForcingMode::manufactured:
        u0 = [](double x, double y) { return manufactured::velocity(x, y); };
        sampler = make_manufactured_sampler(config.alpha, config.nu);
        break;
    case ForcingMode::zero:
        u0 = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
        sampler = make_zero_sampler();
        break;
    case ForcingMode::none_with_initial_field:
        u0 = [](double x, double y) { return manufactured::velocity(x, y); };
        sampler = make_zero_sampler();
        break;
    }

    result.ledger = initialize(config, result.space, result.operators, u0);
    if (config.num_steps == 0)
        return result;

    result.weights = compute_weights(config.alpha,
                                     static_cast<std::size_t>(config.num_steps),
                                     config.tau());
    result.diagnostics.reserve(static_cast<std::size_t>(config.num_steps));
    for (int n = 0; n < config.num_steps; ++n)
        result.diagnostics.push_back(advance(result.ledger, result.weights, result.space,
                                             result.operators, config, sampler));
    return result;
}

/// Per-step diagnostics stream: one CSV row per accepted step.
inline void write_diagnostics_csv(const std::vector<StepDiagnostics>& diagnostics,
                                  std::ostream& out) {
    out << "n,t_n,picard_iters,linear_residual,velocity_norm,divergence_norm\n";
    char line[256];
    for (const auto& d : diagnostics) {
        std::snprintf(line, sizeof line, "%d,%.17g,%d,%.17g,%.17g,%.17g\n", d.step,
                      d.time, d.picard_iterations, d.linear_residual, d.velocity_norm,
                      d.divergence_norm);
        out << line;
    }
}

} // namespace tfns
