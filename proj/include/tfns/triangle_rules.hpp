#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "tfns/gauss_jacobi.hpp"

namespace tfns {

/// Quadrature on the reference triangle {(0,0),(1,0),(0,1)} with respect to
/// the reference measure: ∫_K f dx = detJ Σ_q w_q f(x(ξ_q)). Weights sum to 1/2.
struct TriangleRule {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
};

/// Symmetric 7-point rule, exact through total degree 5. Used for all form
/// assembly: mass (degree 4), convection (degree 5), and everything below.
inline const TriangleRule& triangle_rule_degree5() {
    static const TriangleRule rule = [] {
        const double sq15 = std::sqrt(15.0);
        const double a = (6.0 - sq15) / 21.0;
        const double b = (6.0 + sq15) / 21.0;
        const double wa = (155.0 - sq15) / 1200.0 / 2.0;
        const double wb = (155.0 + sq15) / 1200.0 / 2.0;
        TriangleRule r;
        r.points = {{1.0 / 3.0, 1.0 / 3.0},
                    {a, a},
                    {1.0 - 2.0 * a, a},
                    {a, 1.0 - 2.0 * a},
                    {b, b},
                    {1.0 - 2.0 * b, b},
                    {b, 1.0 - 2.0 * b}};
        r.weights = {9.0 / 40.0 / 2.0, wa, wa, wa, wb, wb, wb};
        return r;
    }();
    return rule;
}

/// Collapsed 8x8 Gauss rule (Duffy map x = s, y = t(1-s)), exact through total
/// degree 14. Used for error integrals so the squared difference against the
/// degree-7 reference fields is integrated exactly.
inline const TriangleRule& triangle_rule_degree14() {
    static const TriangleRule rule = [] {
        const GaussJacobiRule g = gauss_legendre_unit(8);
        TriangleRule r;
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                const double s = g.nodes[i];
                const double t = g.nodes[j] * (1.0 - s);
                r.points.push_back({s, t});
                r.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - s));
            }
        }
        return r;
    }();
    return rule;
}

} // namespace tfns
