#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tfns/geometry.hpp"
#include "tfns/triangle_rules.hpp"

namespace tfns {

/// Taylor-Hood layout on a TriMesh: quadratic velocity per component with
/// scalar dofs at vertices then edge midpoints, linear pressure at vertices.
/// Velocity dof numbering is component-major: dof(c, s) = c (V+E) + s.
struct MixedSpace {
    TriMesh mesh;
    std::size_t scalar_velocity_dofs = 0; // V + E
    std::size_t velocity_dofs = 0;        // 2 (V + E)
    std::size_t pressure_dofs = 0;        // V
    std::vector<std::uint8_t> dirichlet_mask; // over velocity dofs
    Eigen::VectorXd mean_coefficients;        // ∫ q_j dx per pressure basis

    std::size_t velocity_dof(int component, std::size_t scalar) const {
        return static_cast<std::size_t>(component) * scalar_velocity_dofs + scalar;
    }

    /// Local scalar dofs of a triangle: three vertices, then the midpoints of
    /// edges (v0,v1), (v1,v2), (v2,v0) — the P2 nodal order.
    std::array<std::int32_t, 6> element_scalar_dofs(std::size_t t) const {
        const auto& tri = mesh.triangles[t];
        const auto& te = mesh.triangle_edges[t];
        const auto v = static_cast<std::int32_t>(mesh.vertex_count());
        return {tri[0], tri[1], tri[2], v + te[0], v + te[1], v + te[2]};
    }

    /// Coordinates of a scalar velocity dof (vertex or edge midpoint).
    std::array<double, 2> scalar_dof_position(std::size_t s) const {
        if (s < mesh.vertex_count())
            return mesh.vertices[s];
        const auto& edge = mesh.edges[s - mesh.vertex_count()];
        const auto& p = mesh.vertices[edge.vertices[0]];
        const auto& q = mesh.vertices[edge.vertices[1]];
        return {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    }
};

/// Velocity mass and viscous stiffness over all velocity dofs, the divergence
/// coupling (q_j, div v_i), and the pressure mean row. Raw operators: Dirichlet
/// elimination is applied later, when systems are formed.
struct AssembledOperators {
    Eigen::SparseMatrix<double> mass;
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> divergence; // pressure_dofs x velocity_dofs
    Eigen::VectorXd mean_row;
    double nu = 0.0;
};

/// Velocity/pressure coefficients at one time. Dirichlet-masked velocity
/// entries are zero; the pressure has zero weighted mean.
struct FieldCoefficients {
    Eigen::VectorXd velocity;
    Eigen::VectorXd pressure;
    double time = 0.0;
};

struct FieldErrors {
    double u1 = 0.0;
    double u2 = 0.0;
    double p = 0.0;
};

using SpatialVectorFn = std::function<std::array<double, 2>(double, double)>;
using SpatialFieldsFn = std::function<std::array<double, 3>(double, double)>;

namespace detail {

struct ElementGeometry {
    std::array<double, 2> origin;
    double d1x, d1y, d2x, d2y; // edge vectors v1-v0, v2-v0
    double det;                // 2 * area

    std::array<double, 2> map(const std::array<double, 2>& ref) const {
        return {origin[0] + d1x * ref[0] + d2x * ref[1],
                origin[1] + d1y * ref[0] + d2y * ref[1]};
    }
};

inline ElementGeometry element_geometry(const TriMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    ElementGeometry g;
    g.origin = a;
    g.d1x = b[0] - a[0];
    g.d1y = b[1] - a[1];
    g.d2x = c[0] - a[0];
    g.d2y = c[1] - a[1];
    g.det = g.d1x * g.d2y - g.d2x * g.d1y;
    return g;
}

/// P2 nodal basis values at a reference point.
inline std::array<double, 6> p2_values(double xi, double eta) {
    const double l0 = 1.0 - xi - eta;
    const double l1 = xi;
    const double l2 = eta;
    return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
            4.0 * l0 * l1, 4.0 * l1 * l2, 4.0 * l2 * l0};
}

/// P2 physical gradients; the element map is affine so the Jacobian is constant.
inline std::array<std::array<double, 2>, 6>
p2_gradients(double xi, double eta, const ElementGeometry& g) {
    const double l0 = 1.0 - xi - eta;
    const double l1 = xi;
    const double l2 = eta;
    // reference gradients of barycentric coordinates
    constexpr double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::array<std::array<double, 2>, 6> ref{};
    const double l[3] = {l0, l1, l2};
    for (int i = 0; i < 3; ++i) {
        ref[i][0] = (4.0 * l[i] - 1.0) * dl[i][0];
        ref[i][1] = (4.0 * l[i] - 1.0) * dl[i][1];
    }
    for (int e = 0; e < 3; ++e) {
        const int i = e, j = (e + 1) % 3;
        ref[3 + e][0] = 4.0 * (l[i] * dl[j][0] + l[j] * dl[i][0]);
        ref[3 + e][1] = 4.0 * (l[i] * dl[j][1] + l[j] * dl[i][1]);
    }
    std::array<std::array<double, 2>, 6> phys{};
    for (int i = 0; i < 6; ++i) {
        phys[i][0] = (g.d2y * ref[i][0] - g.d1y * ref[i][1]) / g.det;
        phys[i][1] = (-g.d2x * ref[i][0] + g.d1x * ref[i][1]) / g.det;
    }
    return phys;
}

inline std::array<double, 3> p1_values(double xi, double eta) {
    return {1.0 - xi - eta, xi, eta};
}

} // namespace detail

inline MixedSpace build_mixed_space(const TriMesh& mesh) {
    MixedSpace space;
    space.mesh = mesh;
    const std::size_t v = mesh.vertex_count();
    const std::size_t e = mesh.edge_count();
    space.scalar_velocity_dofs = v + e;
    space.velocity_dofs = 2 * space.scalar_velocity_dofs;
    space.pressure_dofs = v;

    space.dirichlet_mask.assign(space.velocity_dofs, 0);
    for (std::size_t s = 0; s < space.scalar_velocity_dofs; ++s) {
        const bool constrained = (s < v) ? mesh.boundary_vertex[s] != 0
                                         : mesh.boundary_edge[s - v] != 0;
        if (constrained) {
            space.dirichlet_mask[space.velocity_dof(0, s)] = 1;
            space.dirichlet_mask[space.velocity_dof(1, s)] = 1;
        }
    }

    space.mean_coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v));
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const double third = mesh.triangle_area(t) / 3.0;
        for (int i = 0; i < 3; ++i)
            space.mean_coefficients[mesh.triangles[t][i]] += third;
    }
    return space;
}

inline AssembledOperators assemble_operators(const MixedSpace& space, double nu) {
    if (!(nu > 0.0))
        throw std::domain_error("assemble_operators: nu must be positive");

    const TriangleRule& rule = triangle_rule_degree5();
    const std::size_t ns = space.scalar_velocity_dofs;
    const std::size_t np = space.pressure_dofs;

    std::vector<Eigen::Triplet<double>> mass_trip, stiff_trip, div_trip;
    mass_trip.reserve(space.mesh.triangle_count() * 72);
    stiff_trip.reserve(space.mesh.triangle_count() * 72);
    div_trip.reserve(space.mesh.triangle_count() * 36);

    for (std::size_t t = 0; t < space.mesh.triangle_count(); ++t) {
        const auto geom = detail::element_geometry(space.mesh, t);
        const auto dofs = space.element_scalar_dofs(t);
        const auto& tri = space.mesh.triangles[t];

        double m_local[6][6] = {};
        double a_local[6][6] = {};
        double bx_local[3][6] = {};
        double by_local[3][6] = {};

        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double xi = rule.points[q][0];
            const double eta = rule.points[q][1];
            const double w = rule.weights[q] * geom.det;
            const auto n2 = detail::p2_values(xi, eta);
            const auto g2 = detail::p2_gradients(xi, eta, geom);
            const auto n1 = detail::p1_values(xi, eta);

            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    m_local[i][j] += w * n2[i] * n2[j];
                    a_local[i][j] += w * (g2[i][0] * g2[j][0] + g2[i][1] * g2[j][1]);
                }
            }
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 6; ++j) {
                    bx_local[i][j] += w * n1[i] * g2[j][0];
                    by_local[i][j] += w * n1[i] * g2[j][1];
                }
            }
        }

        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                for (int c = 0; c < 2; ++c) {
                    const auto gi = static_cast<Eigen::Index>(space.velocity_dof(c, dofs[i]));
                    const auto gj = static_cast<Eigen::Index>(space.velocity_dof(c, dofs[j]));
                    mass_trip.emplace_back(gi, gj, m_local[i][j]);
                    stiff_trip.emplace_back(gi, gj, nu * a_local[i][j]);
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 6; ++j) {
                const auto gx = static_cast<Eigen::Index>(space.velocity_dof(0, dofs[j]));
                const auto gy = static_cast<Eigen::Index>(space.velocity_dof(1, dofs[j]));
                div_trip.emplace_back(tri[i], gx, bx_local[i][j]);
                div_trip.emplace_back(tri[i], gy, by_local[i][j]);
            }
        }
    }

    AssembledOperators ops;
    ops.nu = nu;
    ops.mass.resize(static_cast<Eigen::Index>(2 * ns), static_cast<Eigen::Index>(2 * ns));
    ops.stiffness.resize(static_cast<Eigen::Index>(2 * ns), static_cast<Eigen::Index>(2 * ns));
    ops.divergence.resize(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(2 * ns));
    ops.mass.setFromTriplets(mass_trip.begin(), mass_trip.end());
    ops.stiffness.setFromTriplets(stiff_trip.begin(), stiff_trip.end());
    ops.divergence.setFromTriplets(div_trip.begin(), div_trip.end());
    ops.mean_row = space.mean_coefficients;
    return ops;
}

/// Skew-symmetrized convection operator N(u) with entries b(u, phi_j, phi_i)
/// where b(u,v,w) = ((u·∇)v + (div u) v / 2, w). Block diagonal over the two
/// components; skew-symmetric whenever u vanishes on the boundary.
inline Eigen::SparseMatrix<double>
assemble_convection(const MixedSpace& space, const FieldCoefficients& u) {
    if (u.velocity.size() != static_cast<Eigen::Index>(space.velocity_dofs))
        throw std::invalid_argument("assemble_convection: velocity size mismatch");

    const TriangleRule& rule = triangle_rule_degree5();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(space.mesh.triangle_count() * 72);

    for (std::size_t t = 0; t < space.mesh.triangle_count(); ++t) {
        const auto geom = detail::element_geometry(space.mesh, t);
        const auto dofs = space.element_scalar_dofs(t);

        double n_local[6][6] = {};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double xi = rule.points[q][0];
            const double eta = rule.points[q][1];
            const double w = rule.weights[q] * geom.det;
            const auto n2 = detail::p2_values(xi, eta);
            const auto g2 = detail::p2_gradients(xi, eta, geom);

            double ux = 0.0, uy = 0.0, div_u = 0.0;
            for (int i = 0; i < 6; ++i) {
                const double cx = u.velocity[static_cast<Eigen::Index>(
                    space.velocity_dof(0, dofs[i]))];
                const double cy = u.velocity[static_cast<Eigen::Index>(
                    space.velocity_dof(1, dofs[i]))];
                ux += cx * n2[i];
                uy += cy * n2[i];
                div_u += cx * g2[i][0] + cy * g2[i][1];
            }

            for (int j = 0; j < 6; ++j) {
                const double transport =
                    ux * g2[j][0] + uy * g2[j][1] + 0.5 * div_u * n2[j];
                for (int i = 0; i < 6; ++i)
                    n_local[i][j] += w * transport * n2[i];
            }
        }

        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int c = 0; c < 2; ++c)
                    trip.emplace_back(
                        static_cast<Eigen::Index>(space.velocity_dof(c, dofs[i])),
                        static_cast<Eigen::Index>(space.velocity_dof(c, dofs[j])),
                        n_local[i][j]);
    }

    Eigen::SparseMatrix<double> convection(
        static_cast<Eigen::Index>(space.velocity_dofs),
        static_cast<Eigen::Index>(space.velocity_dofs));
    convection.setFromTriplets(trip.begin(), trip.end());
    return convection;
}

/// Load vector (f, phi_i) with Dirichlet rows zeroed.
inline Eigen::VectorXd assemble_forcing(const MixedSpace& space, const SpatialVectorFn& f) {
    const TriangleRule& rule = triangle_rule_degree5();
    Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.velocity_dofs));

    for (std::size_t t = 0; t < space.mesh.triangle_count(); ++t) {
        const auto geom = detail::element_geometry(space.mesh, t);
        const auto dofs = space.element_scalar_dofs(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double w = rule.weights[q] * geom.det;
            const auto x = geom.map(rule.points[q]);
            const auto value = f(x[0], x[1]);
            const auto n2 = detail::p2_values(rule.points[q][0], rule.points[q][1]);
            for (int i = 0; i < 6; ++i) {
                load[static_cast<Eigen::Index>(space.velocity_dof(0, dofs[i]))] +=
                    w * value[0] * n2[i];
                load[static_cast<Eigen::Index>(space.velocity_dof(1, dofs[i]))] +=
                    w * value[1] * n2[i];
            }
        }
    }

    for (std::size_t i = 0; i < space.velocity_dofs; ++i)
        if (space.dirichlet_mask[i])
            load[static_cast<Eigen::Index>(i)] = 0.0;
    return load;
}

/// L2 errors of the discrete fields against analytic (u1, u2, p) at the same
/// time, integrated with the degree-14 rule.
inline FieldErrors l2_error(const MixedSpace& space, const FieldCoefficients& coeffs,
                            const SpatialFieldsFn& exact) {
    const TriangleRule& rule = triangle_rule_degree14();
    double e1 = 0.0, e2 = 0.0, ep = 0.0;

    for (std::size_t t = 0; t < space.mesh.triangle_count(); ++t) {
        const auto geom = detail::element_geometry(space.mesh, t);
        const auto dofs = space.element_scalar_dofs(t);
        const auto& tri = space.mesh.triangles[t];
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double w = rule.weights[q] * geom.det;
            const auto x = geom.map(rule.points[q]);
            const auto n2 = detail::p2_values(rule.points[q][0], rule.points[q][1]);
            const auto n1 = detail::p1_values(rule.points[q][0], rule.points[q][1]);

            double u1h = 0.0, u2h = 0.0, ph = 0.0;
            for (int i = 0; i < 6; ++i) {
                u1h += coeffs.velocity[static_cast<Eigen::Index>(
                           space.velocity_dof(0, dofs[i]))] * n2[i];
                u2h += coeffs.velocity[static_cast<Eigen::Index>(
                           space.velocity_dof(1, dofs[i]))] * n2[i];
            }
            for (int i = 0; i < 3; ++i)
                ph += coeffs.pressure[tri[i]] * n1[i];

            const auto ex = exact(x[0], x[1]);
            e1 += w * (u1h - ex[0]) * (u1h - ex[0]);
            e2 += w * (u2h - ex[1]) * (u2h - ex[1]);
            ep += w * (ph - ex[2]) * (ph - ex[2]);
        }
    }
    return {std::sqrt(e1), std::sqrt(e2), std::sqrt(ep)};
}

/// Pressure (P1) mass matrix; used for norms and the inf-sup diagnostics.
inline Eigen::SparseMatrix<double> assemble_pressure_mass(const MixedSpace& space) {
    const TriangleRule& rule = triangle_rule_degree5();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(space.mesh.triangle_count() * 9);
    for (std::size_t t = 0; t < space.mesh.triangle_count(); ++t) {
        const auto geom = detail::element_geometry(space.mesh, t);
        const auto& tri = space.mesh.triangles[t];
        double local[3][3] = {};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double w = rule.weights[q] * geom.det;
            const auto n1 = detail::p1_values(rule.points[q][0], rule.points[q][1]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    local[i][j] += w * n1[i] * n1[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(tri[i], tri[j], local[i][j]);
    }
    Eigen::SparseMatrix<double> mass(static_cast<Eigen::Index>(space.pressure_dofs),
                                     static_cast<Eigen::Index>(space.pressure_dofs));
    mass.setFromTriplets(trip.begin(), trip.end());
    return mass;
}

/// Nodal (vertex + edge midpoint) interpolant of an analytic velocity field.
inline Eigen::VectorXd interpolate_velocity(const MixedSpace& space, const SpatialVectorFn& u) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.velocity_dofs));
    for (std::size_t s = 0; s < space.scalar_velocity_dofs; ++s) {
        const auto x = space.scalar_dof_position(s);
        const auto value = u(x[0], x[1]);
        coeffs[static_cast<Eigen::Index>(space.velocity_dof(0, s))] = value[0];
        coeffs[static_cast<Eigen::Index>(space.velocity_dof(1, s))] = value[1];
    }
    return coeffs;
}

/// Vertex interpolant of an analytic pressure field.
inline Eigen::VectorXd interpolate_pressure(const MixedSpace& space,
                                            const std::function<double(double, double)>& p) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.pressure_dofs));
    for (std::size_t v = 0; v < space.pressure_dofs; ++v)
        coeffs[static_cast<Eigen::Index>(v)] = p(space.mesh.vertices[v][0], space.mesh.vertices[v][1]);
    return coeffs;
}

} // namespace tfns
