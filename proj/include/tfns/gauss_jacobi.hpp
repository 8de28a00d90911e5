#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tfns {

/// Nodes and weights for ∫_{-1}^{1} f(x) (1-x)^a (1+x)^b dx ≈ Σ w_i f(x_i).
struct GaussJacobiRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Jacobi rule for exponents a, b > -1 via Golub-Welsch: eigenvalues of
/// the symmetric tridiagonal recurrence matrix are the nodes, the squared
/// first eigenvector components scaled by the zeroth moment are the weights.
inline GaussJacobiRule gauss_jacobi_rule(int point_count, double a, double b) {
    if (point_count < 1)
        throw std::domain_error("gauss_jacobi_rule: point_count must be >= 1");
    if (!(a > -1.0) || !(b > -1.0))
        throw std::domain_error("gauss_jacobi_rule: exponents must be > -1");

    const int n = point_count;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));

    const double s = a + b;
    diag[0] = (b - a) / (s + 2.0);
    for (int k = 1; k < n; ++k) {
        const double d = 2.0 * k + s;
        diag[k] = (b * b - a * a) / (d * (d + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double beta_k;
        if (k == 1) {
            beta_k = 4.0 * (a + 1.0) * (b + 1.0) / ((s + 2.0) * (s + 2.0) * (s + 3.0));
        } else {
            const double d = 2.0 * k + s;
            beta_k = 4.0 * k * (k + a) * (k + b) * (k + s) / (d * d * (d * d - 1.0));
        }
        sub[k - 1] = std::sqrt(beta_k);
    }

    // zeroth moment 2^{a+b+1} B(a+1, b+1), evaluated in log space
    const double log_mu0 = (s + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                           std::lgamma(b + 1.0) - std::lgamma(s + 2.0);
    const double mu0 = std::exp(log_mu0);

    GaussJacobiRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = diag[0];
        rule.weights[0] = mu0;
        return rule;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi_rule: tridiagonal eigensolve failed");

    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = eig.eigenvalues()[i];
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

/// Gauss-Legendre rule mapped to [0, 1].
inline GaussJacobiRule gauss_legendre_unit(int point_count) {
    GaussJacobiRule rule = gauss_jacobi_rule(point_count, 0.0, 0.0);
    for (int i = 0; i < point_count; ++i) {
        rule.nodes[i] = 0.5 * (rule.nodes[i] + 1.0);
        rule.weights[i] *= 0.5;
    }
    return rule;
}

} // namespace tfns
