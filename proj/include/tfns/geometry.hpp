#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace tfns {

/// Conforming triangulation of the unit square. Vertices are lattice points,
/// every cell is split along the lower-left-to-upper-right diagonal, all
/// triangles are counterclockwise. Immutable after construction.
struct TriMesh {
    struct Edge {
        std::array<std::int32_t, 2> vertices;    // sorted, v0 < v1
        std::array<std::int32_t, 2> triangles;   // adjacent triangles, -1 if none
    };

    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;
    std::vector<std::array<std::int32_t, 3>> triangle_edges; // per-triangle edge ids
    std::vector<Edge> edges;
    std::vector<std::uint8_t> boundary_vertex;
    std::vector<std::uint8_t> boundary_edge;
    int cells_per_side = 0;
    double h = 0.0; // max element diameter (longest edge)

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
    std::size_t edge_count() const { return edges.size(); }

    double triangle_area(std::size_t t) const {
        const auto& tri = triangles[t];
        const auto& a = vertices[tri[0]];
        const auto& b = vertices[tri[1]];
        const auto& c = vertices[tri[2]];
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    }
};

namespace detail {

constexpr double kBoundaryTol = 1e-12;

inline bool on_unit_boundary(double x, double y) {
    const auto near = [](double v, double target) {
        return std::abs(v - target) <= kBoundaryTol;
    };
    return near(x, 0.0) || near(x, 1.0) || near(y, 0.0) || near(y, 1.0);
}

/// Edge table keyed by sorted vertex pair; edge ids are assigned in
/// lexicographic pair order so numbering does not depend on triangle order.
inline void build_edges(TriMesh& mesh) {
    std::map<std::array<std::int32_t, 2>, std::vector<std::int32_t>> table;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            std::array<std::int32_t, 2> key{tri[e], tri[(e + 1) % 3]};
            if (key[0] > key[1])
                std::swap(key[0], key[1]);
            table[key].push_back(static_cast<std::int32_t>(t));
        }
    }

    mesh.edges.clear();
    mesh.edges.reserve(table.size());
    std::map<std::array<std::int32_t, 2>, std::int32_t> edge_id;
    for (const auto& [key, tris] : table) {
        TriMesh::Edge edge;
        edge.vertices = key;
        edge.triangles = {-1, -1};
        for (std::size_t i = 0; i < tris.size() && i < 2; ++i)
            edge.triangles[i] = tris[i];
        edge_id[key] = static_cast<std::int32_t>(mesh.edges.size());
        mesh.edges.push_back(edge);
    }

    mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            std::array<std::int32_t, 2> key{tri[e], tri[(e + 1) % 3]};
            if (key[0] > key[1])
                std::swap(key[0], key[1]);
            mesh.triangle_edges[t][e] = edge_id.at(key);
        }
    }

    mesh.boundary_edge.assign(mesh.edges.size(), 0);
    for (std::size_t e = 0; e < mesh.edges.size(); ++e)
        mesh.boundary_edge[e] = (mesh.edges[e].triangles[1] < 0) ? 1 : 0;
}

} // namespace detail

/// Structured mesh with n cells per side: (n+1)^2 vertices, 2n^2 triangles,
/// h = sqrt(2)/n.
inline TriMesh build_structured_mesh(int n) {
    if (n < 1)
        throw std::domain_error("build_structured_mesh: n must be >= 1");

    TriMesh mesh;
    mesh.cells_per_side = n;
    const int nv = n + 1;
    mesh.vertices.resize(static_cast<std::size_t>(nv) * nv);
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nv; ++i)
            mesh.vertices[static_cast<std::size_t>(j) * nv + i] = {
                static_cast<double>(i) / n, static_cast<double>(j) / n};

    mesh.triangles.reserve(2u * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::int32_t a = j * nv + i;
            const std::int32_t b = j * nv + i + 1;
            const std::int32_t c = (j + 1) * nv + i + 1;
            const std::int32_t d = (j + 1) * nv + i;
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    }

    detail::build_edges(mesh);

    mesh.boundary_vertex.assign(mesh.vertices.size(), 0);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        mesh.boundary_vertex[v] =
            detail::on_unit_boundary(mesh.vertices[v][0], mesh.vertices[v][1]) ? 1 : 0;

    double h = 0.0;
    for (const auto& edge : mesh.edges) {
        const auto& p = mesh.vertices[edge.vertices[0]];
        const auto& q = mesh.vertices[edge.vertices[1]];
        h = std::max(h, std::hypot(q[0] - p[0], q[1] - p[1]));
    }
    mesh.h = h;
    return mesh;
}

/// Uniform refinement of a structured mesh; halves h exactly.
inline TriMesh refine_uniform(const TriMesh& mesh) {
    if (mesh.cells_per_side < 1)
        throw std::invalid_argument("refine_uniform: mesh was not built structured");
    return build_structured_mesh(2 * mesh.cells_per_side);
}

} // namespace tfns
