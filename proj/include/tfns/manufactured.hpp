#pragma once

#include <array>
#include <cmath>

#include "tfns/frac_quadrature.hpp"

namespace tfns::manufactured {

/// Decaying eddy-pair flow on the unit square:
///   u1 =  2 x^2 (x-1)^2 y (y-1) (2y-1) e^{-t}
///   u2 = -2 y^2 (y-1)^2 x (x-1) (2x-1) e^{-t}
///   p  = (x^2 - y^2) e^{-t}
/// Divergence-free, zero on the boundary, zero-mean pressure. All spatial
/// derivatives below are closed forms of the separable factors
///   g(s) = s^2 (s-1)^2,  k(s) = s (s-1) (2s-1) = g'(s)/2.

namespace detail {
inline double g(double s) { return s * s * (s - 1.0) * (s - 1.0); }
inline double k(double s) { return s * (s - 1.0) * (2.0 * s - 1.0); }
inline double k1(double s) { return 6.0 * s * s - 6.0 * s + 1.0; } // k'
inline double k2(double s) { return 12.0 * s - 6.0; }              // k''
} // namespace detail

/// Spatial velocity factor U(x, y); the solution is U e^{-t}.
inline std::array<double, 2> velocity(double x, double y) {
    using namespace detail;
    return {2.0 * g(x) * k(y), -2.0 * g(y) * k(x)};
}

/// Spatial pressure factor P(x, y).
inline double pressure(double x, double y) { return x * x - y * y; }

inline std::array<double, 2> pressure_gradient(double x, double y) {
    return {2.0 * x, -2.0 * y};
}

inline std::array<double, 2> velocity_laplacian(double x, double y) {
    using namespace detail;
    return {4.0 * k1(x) * k(y) + 2.0 * g(x) * k2(y),
            -2.0 * g(y) * k2(x) - 4.0 * k1(y) * k(x)};
}

/// Gradient of the spatial factor: {du1/dx, du1/dy, du2/dx, du2/dy}.
inline std::array<double, 4> velocity_gradient(double x, double y) {
    using namespace detail;
    return {4.0 * k(x) * k(y), 2.0 * g(x) * k1(y), -2.0 * g(y) * k1(x),
            -4.0 * k(x) * k(y)};
}

/// (U·∇)U of the spatial factor.
inline std::array<double, 2> convection(double x, double y) {
    const auto u = velocity(x, y);
    const auto grad = velocity_gradient(x, y);
    return {u[0] * grad[0] + u[1] * grad[1], u[0] * grad[2] + u[1] * grad[3]};
}

struct Fields {
    double u1, u2, p;
};

inline Fields fields(double x, double y, double t) {
    const auto u = velocity(x, y);
    const double decay = std::exp(-t);
    return {u[0] * decay, u[1] * decay, pressure(x, y) * decay};
}

/// Forcing with the fractional factor D(t) = Caputo derivative of e^{-t}
/// supplied by the caller (so it can be cached per time level):
///   f = U D(t) + e^{-2t} (U·∇)U - nu e^{-t} ΔU + e^{-t} ∇P.
inline std::array<double, 2> forcing_with_decay(double nu, double x, double y,
                                                double t, double decay_factor) {
    const auto u = velocity(x, y);
    const auto conv = convection(x, y);
    const auto lap = velocity_laplacian(x, y);
    const auto grad_p = pressure_gradient(x, y);
    const double e1 = std::exp(-t);
    const double e2 = e1 * e1;
    return {u[0] * decay_factor + e2 * conv[0] - nu * e1 * lap[0] + e1 * grad_p[0],
            u[1] * decay_factor + e2 * conv[1] - nu * e1 * lap[1] + e1 * grad_p[1]};
}

inline std::array<double, 2> forcing(double alpha, double nu, double x, double y,
                                     double t) {
    return forcing_with_decay(nu, x, y, t, caputo_decay_factor(alpha, t));
}

} // namespace tfns::manufactured
