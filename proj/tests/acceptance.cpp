// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfns/field_export.hpp"
#include "tfns/verification.hpp"

using namespace tfns;

namespace {

int failures = 0;

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)) {
        start_ = std::chrono::steady_clock::now();
    }

    void check(bool ok, const std::string& detail) {
        if (!ok)
            issues_.push_back(detail);
    }

    void note(const std::string& text) { notes_.push_back(text); }

    void report() {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        const bool ok = issues_.empty();
        if (!ok)
            ++failures;
        std::printf("[%s] %s (%.2f s)\n", ok ? "PASS" : "FAIL", name_.c_str(), elapsed);
        for (const auto& issue : issues_)
            std::printf("       !! %s\n", issue.c_str());
        for (const auto& line : notes_)
            std::printf("        - %s\n", line.c_str());
        std::fflush(stdout);
    }

private:
    std::string name_;
    std::vector<std::string> issues_;
    std::vector<std::string> notes_;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, pattern, args...);
    return buffer;
}

double kahan_partial_sum(const std::vector<double>& w, std::size_t n) {
    tfns::detail::KahanSum sum;
    for (std::size_t k = 0; k < n; ++k)
        sum.add(w[k]);
    return sum.value();
}

double erfi_series(double x) {
    double term = x, sum = x;
    for (int k = 1; k < 60; ++k) {
        term *= x * x / k;
        sum += term / (2.0 * k + 1.0);
        if (std::abs(term) < 1e-18 * std::abs(sum))
            break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

// constraint discipline collected across the criterion 5-7 runs
struct ConstraintTracker {
    double worst_divergence_ratio = 0.0;
    double worst_mean_ratio = 0.0;
    long steps = 0;
    double linear_tol = 1e-12;

    void absorb(const RunResult& result) {
        for (const auto& diag : result.diagnostics) {
            ++steps;
            if (diag.velocity_norm > 0.0)
                worst_divergence_ratio = std::max(
                    worst_divergence_ratio, diag.divergence_norm / diag.velocity_norm);
            if (diag.pressure_norm > 0.0)
                worst_mean_ratio = std::max(
                    worst_mean_ratio, std::abs(diag.pressure_mean) / diag.pressure_norm);
        }
    }
};

ConstraintTracker tracker;

void criterion1_weight_laws() {
    Criterion c("C1 convolution weight laws: w0 = 1, positivity, strict decrease, "
                "partial sums = n^alpha to 1e-12");
    const std::size_t count = 10000;
    for (int a = 1; a <= 9; ++a) {
        const double alpha = a / 10.0;
        const auto qw = compute_weights(alpha, count, 1.0);
        c.check(qw.weights[0] == 1.0, fmt("alpha=%.1f: w0 != 1", alpha));
        bool positive = true, decreasing = true;
        for (std::size_t k = 0; k < count; ++k) {
            positive = positive && qw.weights[k] > 0.0;
            if (k + 1 < count)
                decreasing = decreasing && qw.weights[k] > qw.weights[k + 1];
        }
        c.check(positive, fmt("alpha=%.1f: nonpositive weight", alpha));
        c.check(decreasing, fmt("alpha=%.1f: weights not strictly decreasing", alpha));
        for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{100}, count}) {
            const double sum = kahan_partial_sum(qw.weights, n);
            const double exact = std::pow(static_cast<double>(n), alpha);
            c.check(std::abs(sum - exact) <= 1e-12 * exact,
                    fmt("alpha=%.1f n=%zu: partial sum off by %.3e rel", alpha, n,
                        std::abs(sum - exact) / exact));
        }
    }
    c.report();
}

void criterion2_integral_exactness_and_order() {
    Criterion c("C2 discrete fractional integral: constants to 1e-13, "
                "observed order >= alpha + 0.9 for g(t) = t at t_n = 1");
    for (double alpha : {0.4, 0.8}) {
        const auto qw = compute_weights(alpha, 10, 0.1);
        const std::vector<double> ones(10, 1.0);
        const double exact = 1.0 / std::tgamma(alpha + 1.0); // t_n = 1
        const double value = discrete_rl_integral(ones, qw);
        c.check(std::abs(value - exact) <= 1e-13 * exact,
                fmt("alpha=%.1f: constant integral off by %.3e rel", alpha,
                    std::abs(value - exact) / exact));

        const double exact_linear = 1.0 / std::tgamma(2.0 + alpha);
        std::vector<double> errors;
        for (int n : {8, 16, 32, 64}) {
            const double tau = 1.0 / n;
            const auto weights = compute_weights(alpha, n, tau);
            std::vector<double> samples(n);
            for (int j = 0; j < n; ++j)
                samples[j] = tau * (j + 1);
            errors.push_back(std::abs(discrete_rl_integral(samples, weights) - exact_linear));
        }
        std::string observed, local;
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            const double order = std::log2(errors[i] / errors[i + 1]);
            observed += fmt("%.3f ", order);
            c.check(order >= alpha + 0.9,
                    fmt("alpha=%.1f: observed order %.3f < %.1f (tau=1/%d -> 1/%d)",
                        alpha, order, alpha + 0.9, 8 << i, 16 << i));
        }
        // context: at fixed step index the truncation order alpha + 1 is real
        std::vector<double> local_errors;
        for (int n : {8, 16, 32, 64}) {
            const double tau = 1.0 / n;
            const auto weights = compute_weights(alpha, 1, tau);
            const std::vector<double> one_sample{tau};
            local_errors.push_back(std::abs(discrete_rl_integral(one_sample, weights) -
                                            std::pow(tau, 1.0 + alpha) /
                                                std::tgamma(2.0 + alpha)));
        }
        for (std::size_t i = 0; i + 1 < local_errors.size(); ++i)
            local += fmt("%.3f ", std::log2(local_errors[i] / local_errors[i + 1]));
        c.note(fmt("alpha=%.1f: observed orders at t_n=1: %s; at fixed step index n=1: %s"
                   " (the truncation carries an N^alpha factor: order alpha+1 holds at"
                   " fixed step index, first order globally)",
                   alpha, observed.c_str(), local.c_str()));
    }
    c.report();
}

void criterion3_caputo_oracle() {
    Criterion c("C3 Caputo oracle: alpha=0.5 matches -e^{-t} erfi(sqrt(t)) to 1e-9; "
                "alpha=0.999 matches -e^{-t} to 2e-3");
    for (double t : {0.25, 0.5, 1.0}) {
        const double exact = -std::exp(-t) * erfi_series(std::sqrt(t));
        const double value = caputo_decay_factor(0.5, t, 1e-10);
        c.check(std::abs(value - exact) <= 1e-9,
                fmt("t=%.2f: |value - closed form| = %.3e", t, std::abs(value - exact)));
    }
    const double limit = caputo_decay_factor(0.999, 1.0, 1e-10);
    c.check(std::abs(limit + std::exp(-1.0)) <= 2e-3,
            fmt("alpha=0.999: |value + e^{-1}| = %.3e", std::abs(limit + std::exp(-1.0))));
    c.report();
}

void criterion4_trilinear_properties() {
    Criterion c("C4 discrete trilinear form identities: 100 random draws on the "
                "n=4 mesh, skew terms <= 1e-12 * scale");
    const MixedSpace space = build_mixed_space(build_structured_mesh(4));
    const auto nv = static_cast<Eigen::Index>(space.velocity_dofs);
    const auto np = static_cast<Eigen::Index>(space.pressure_dofs);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst_self = 0.0, worst_anti = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        FieldCoefficients u;
        u.velocity.resize(nv);
        for (Eigen::Index i = 0; i < nv; ++i)
            u.velocity[i] = dist(rng);
        for (std::size_t i = 0; i < space.velocity_dofs; ++i)
            if (space.dirichlet_mask[i])
                u.velocity[static_cast<Eigen::Index>(i)] = 0.0;
        u.pressure = Eigen::VectorXd::Zero(np);

        const Eigen::SparseMatrix<double> convection = assemble_convection(space, u);
        double frob = 0.0;
        for (int col = 0; col < convection.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(convection, col); it; ++it)
                frob += it.value() * it.value();
        frob = std::sqrt(frob);

        Eigen::VectorXd v(nv), w(nv);
        for (Eigen::Index i = 0; i < nv; ++i) {
            v[i] = dist(rng);
            w[i] = dist(rng);
        }
        const double self = std::abs(w.dot(convection * w)) / (frob * w.squaredNorm());
        const double anti = std::abs(v.dot(convection * w) + w.dot(convection * v)) /
                            (frob * v.norm() * w.norm());
        worst_self = std::max(worst_self, self);
        worst_anti = std::max(worst_anti, anti);
    }
    c.check(worst_self <= 1e-12, fmt("worst |b(u,v,v)| / scale = %.3e", worst_self));
    c.check(worst_anti <= 1e-12,
            fmt("worst |b(u,v,w)+b(u,w,v)| / scale = %.3e", worst_anti));
    c.note(fmt("worst normalized self term %.2e, antisymmetry defect %.2e", worst_self,
               worst_anti));
    c.report();
}

void criterion5_spatial_convergence() {
    Criterion c("C5 spatial convergence study: nu=1.5, T=1, tau=1/8, "
                "n in {4,8,16}; velocity rates in [1.7,2.3], pressure in [0.7,1.5]");
    const int levels[] = {4, 8, 16};
    for (double alpha : {0.4, 0.8}) {
        const ErrorReport report = run_space_study(
            alpha, levels, 0.125, {}, [](const RunResult& r) { tracker.absorb(r); });
        std::string summary;
        for (std::size_t i = 0; i < report.rates.size(); ++i) {
            const auto& rate = report.rates[i];
            summary += fmt("[u1 %.2f u2 %.2f p %.2f] ", rate.u1, rate.u2, rate.p);
            for (double velocity_rate : {rate.u1, rate.u2})
                c.check(velocity_rate >= 1.7 && velocity_rate <= 2.3,
                        fmt("alpha=%.1f level %d->%d: velocity rate %.3f outside "
                            "[1.7, 2.3]",
                            alpha, report.levels[i].resolution,
                            report.levels[i + 1].resolution, velocity_rate));
            c.check(rate.p >= 0.7 && rate.p <= 1.5,
                    fmt("alpha=%.1f level %d->%d: pressure rate %.3f outside [0.7, 1.5]",
                        alpha, report.levels[i].resolution,
                        report.levels[i + 1].resolution, rate.p));
        }
        c.note(fmt("alpha=%.1f rates: %s(Taylor-Hood converges at its optimal h^3/h^2)",
                   alpha, summary.c_str()));
    }
    c.report();
}

void criterion6_temporal_convergence() {
    Criterion c("C6 temporal convergence study: n=16, N_t in {4,8,16,32}; "
                "velocity rate within 0.25 of alpha + 1");
    const int steps[] = {4, 8, 16, 32};
    for (double alpha : {0.4, 0.8}) {
        const ErrorReport report = run_time_study(
            alpha, steps, 16, {}, [](const RunResult& r) { tracker.absorb(r); });
        std::string summary;
        for (std::size_t i = 0; i < report.rates.size(); ++i) {
            const auto& rate = report.rates[i];
            summary += fmt("[u1 %.2f u2 %.2f] ", rate.u1, rate.u2);
            for (double velocity_rate : {rate.u1, rate.u2})
                c.check(std::abs(velocity_rate - (alpha + 1.0)) <= 0.25,
                        fmt("alpha=%.1f N %d->%d: velocity rate %.3f outside "
                            "[%.2f, %.2f]",
                            alpha, report.levels[i].resolution,
                            report.levels[i + 1].resolution, velocity_rate,
                            alpha + 0.75, alpha + 1.25));
        }
        std::string errs;
        for (const auto& level : report.levels)
            errs += fmt("%.3e ", level.errors.u1);
        c.note(fmt("alpha=%.1f rates: %s; u1 errors vs exact: %s(final-time errors "
                   "saturate at the h^3 spatial floor; the scheme itself is first "
                   "order in time at fixed T)",
                   alpha, summary.c_str(), errs.c_str()));
    }
    c.report();
}

void criterion7_stability() {
    Criterion c("C7 free-decay stability proxy: f=0, projected initial field, "
                "alpha in {0.4,0.8}, n=8, N_t=64; max |u^n| <= 1.05 |u^0|");
    for (double alpha : {0.4, 0.8}) {
        SolverConfig config;
        config.alpha = alpha;
        config.cells_per_side = 8;
        config.num_steps = 64;
        config.forcing = ForcingMode::none_with_initial_field;
        try {
            const RunResult result = run(config);
            tracker.absorb(result);
            const double initial =
                mass_norm(result.operators.mass, result.ledger.initial_velocity);
            double peak = 0.0;
            int worst_picard = 0;
            for (const auto& diag : result.diagnostics) {
                peak = std::max(peak, diag.velocity_norm);
                worst_picard = std::max(worst_picard, diag.picard_iterations);
            }
            c.check(peak <= 1.05 * initial,
                    fmt("alpha=%.1f: max |u^n| / |u^0| = %.4f > 1.05", alpha,
                        peak / initial));
            c.note(fmt("alpha=%.1f: max |u^n| / |u^0| = %.4f, max Picard count %d",
                       alpha, peak / initial, worst_picard));
        } catch (const PicardError& error) {
            c.check(false, fmt("alpha=%.1f: Picard failure at step %d", alpha,
                               error.step_index));
        }
    }
    c.report();
}

void criterion8_classical_limit() {
    Criterion c("C8 classical-limit oracle: one alpha=1 scheme step matches an "
                "independent backward-Euler step to 1e-10 on n=4");
    SolverConfig config;
    config.alpha = 1.0;
    config.nu = 1.5;
    config.t_final = 0.25;
    config.num_steps = 1;
    config.cells_per_side = 4;
    config.picard_tol = 1e-12;
    config.forcing = ForcingMode::manufactured;
    const RunResult result = run(config);

    // independent backward-Euler step with its own Picard loop
    const double tau = config.tau();
    const MixedSpace& space = result.space;
    const AssembledOperators& ops = result.operators;
    const Eigen::VectorXd load = assemble_forcing(space, [tau](double x, double y) {
        return manufactured::forcing_with_decay(1.5, x, y, tau, -std::exp(-tau));
    });
    const Eigen::VectorXd rhs = ops.mass * result.ledger.initial_velocity + tau * load;
    const Eigen::VectorXd zero_p =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.pressure_dofs));
    Eigen::VectorXd transport = result.ledger.initial_velocity;
    for (int m = 0; m < 50; ++m) {
        const Eigen::SparseMatrix<double> convection =
            assemble_convection(space, {transport, zero_p, tau});
        const Eigen::SparseMatrix<double> block =
            ops.mass + tau * (ops.stiffness + convection);
        const SaddleSystem system =
            make_saddle_system(space, block, ops.divergence, tau, rhs, zero_p);
        const SaddleSolution sol = solve(system, 1e-13);
        const double increment = mass_norm(ops.mass, sol.velocity - transport);
        transport = sol.velocity;
        if (increment <= 1e-12 * std::max(mass_norm(ops.mass, sol.velocity), 1e-300))
            break;
    }

    const double diff =
        (result.ledger.steps[0].velocity - transport).lpNorm<Eigen::Infinity>();
    c.check(diff <= 1e-10, fmt("max coefficient difference %.3e > 1e-10", diff));
    c.note(fmt("max velocity coefficient difference %.3e", diff));
    c.report();
}

void criterion9_constraint_discipline() {
    Criterion c("C9 constraint discipline across criteria 5-7 runs: |B u^n| <= "
                "10 linear_tol |u^n| and |m' p^n| <= 10 linear_tol |p^n|");
    c.check(tracker.steps > 0, "no steps were tracked");
    c.check(tracker.worst_divergence_ratio <= 10.0 * tracker.linear_tol,
            fmt("worst |B u| / |u| = %.3e", tracker.worst_divergence_ratio));
    c.check(tracker.worst_mean_ratio <= 10.0 * tracker.linear_tol,
            fmt("worst |m' p| / |p| = %.3e", tracker.worst_mean_ratio));
    c.note(fmt("%ld accepted steps; worst |B u|/|u| = %.2e, worst |m' p|/|p| = %.2e",
               tracker.steps, tracker.worst_divergence_ratio, tracker.worst_mean_ratio));
    c.report();
}

} // namespace

int main() {
    try {
        criterion1_weight_laws();
        criterion2_integral_exactness_and_order();
        criterion3_caputo_oracle();
        criterion4_trilinear_properties();
        criterion5_spatial_convergence();
        criterion6_temporal_convergence();
        criterion7_stability();
        criterion8_classical_limit();
        criterion9_constraint_discipline();
    } catch (const std::exception& error) {
        std::printf("[FAIL] acceptance suite aborted: %s\n", error.what());
        return 2;
    }
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
