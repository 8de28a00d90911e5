#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfns/errors.hpp"
#include "tfns/gauss_jacobi.hpp"

namespace tfns {

/// Convolution weights of the discrete fractional integral on a uniform grid:
/// w_k = (k+1)^alpha - k^alpha and the scale beta0 = tau^alpha / Gamma(alpha+1).
///
/// Invariants: w_0 = 1, w_k > 0, w_k strictly decreasing, and the partial sums
/// telescope to n^alpha. Immutable after construction.
struct QuadratureWeights {
    double alpha = 0.0;
    double tau = 0.0;
    std::vector<double> weights;
    double beta0 = 0.0;

    std::size_t count() const { return weights.size(); }
};

namespace detail {

/// For large k the direct difference (k+1)^a - k^a cancels; the equivalent
/// form k^a expm1(a log1p(1/k)) keeps full relative accuracy. alpha = 1 is
/// the classical limit with unit weights.
inline double convolution_weight(double alpha, std::size_t k) {
    if (k == 0 || alpha == 1.0)
        return 1.0;
    const double kd = static_cast<double>(k);
    if (k <= 1000)
        return std::pow(kd + 1.0, alpha) - std::pow(kd, alpha);
    return std::pow(kd, alpha) * std::expm1(alpha * std::log1p(1.0 / kd));
}

/// Compensated (Kahan) accumulation; keeps long positive sums at ~1 ulp.
class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace detail

inline QuadratureWeights compute_weights(double alpha, std::size_t count, double tau) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("compute_weights: alpha must lie in (0, 1]");
    if (count < 1)
        throw std::domain_error("compute_weights: count must be >= 1");
    if (!(tau > 0.0))
        throw std::domain_error("compute_weights: tau must be positive");

    QuadratureWeights qw;
    qw.alpha = alpha;
    qw.tau = tau;
    qw.beta0 = std::pow(tau, alpha) / std::tgamma(alpha + 1.0);
    qw.weights.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        qw.weights[k] = detail::convolution_weight(alpha, k);
    return qw;
}

/// Discrete fractional integral beta0 Σ_{k=0}^{n-1} w_k g(t_{n-k}) of the
/// samples g(t_1) .. g(t_n). Exact for constant g; O(tau^{alpha+1}) otherwise.
inline double discrete_rl_integral(std::span<const double> samples,
                                   const QuadratureWeights& weights) {
    const std::size_t n = samples.size();
    if (n > weights.count())
        throw std::invalid_argument("discrete_rl_integral: more samples than weights");
    detail::KahanSum sum;
    for (std::size_t k = 0; k < n; ++k)
        sum.add(weights.weights[k] * samples[n - 1 - k]);
    return weights.beta0 * sum.value();
}

/// Caputo derivative of e^{-t} at order alpha:
///   D(t) = (1/Gamma(1-alpha)) ∫_0^t (t-s)^{-alpha} (-e^{-s}) ds.
/// The endpoint singularity is absorbed by a Gauss-Jacobi weight; a 64-node
/// rule is cross-checked against a 128-node rule and disagreement beyond tol
/// is an error. alpha = 1 returns the classical limit -e^{-t}.
inline double caputo_decay_factor(double alpha, double t, double tol = 1e-10) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("caputo_decay_factor: alpha must lie in (0, 1]");
    if (t < 0.0)
        throw std::domain_error("caputo_decay_factor: t must be >= 0");
    if (!(tol > 0.0))
        throw std::domain_error("caputo_decay_factor: tol must be positive");
    if (t == 0.0)
        return 0.0;
    if (alpha == 1.0)
        return -std::exp(-t);

    const auto evaluate = [&](int nodes) {
        const GaussJacobiRule rule = gauss_jacobi_rule(nodes, -alpha, 0.0);
        detail::KahanSum sum;
        for (int i = 0; i < nodes; ++i)
            sum.add(rule.weights[i] * std::exp(-0.5 * t * (1.0 + rule.nodes[i])));
        return -std::pow(0.5 * t, 1.0 - alpha) / std::tgamma(1.0 - alpha) * sum.value();
    };

    const double coarse = evaluate(64);
    const double fine = evaluate(128);
    const double disagreement = std::abs(coarse - fine);
    if (disagreement > tol)
        throw QuadratureAccuracyError(
            "caputo_decay_factor: quadrature resolutions disagree beyond tol",
            disagreement);
    return fine;
}

} // namespace tfns
