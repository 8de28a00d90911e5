#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "tfns/fem_assembly.hpp"

namespace tfns {

enum class ExportFormat { vtk, csv };

namespace detail {

inline std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

} // namespace detail

/// Write vertex velocity/pressure as a VTK legacy ASCII unstructured grid or
/// as CSV rows x,y,u1,u2,p. Output is byte-stable for fixed input.
inline void export_fields(const MixedSpace& space, const FieldCoefficients& fields,
                          const std::string& path, ExportFormat format) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("export_fields: cannot open '" + path + "' for writing");

    const TriMesh& mesh = space.mesh;
    const auto u1 = [&](std::size_t v) {
        return fields.velocity[static_cast<Eigen::Index>(space.velocity_dof(0, v))];
    };
    const auto u2 = [&](std::size_t v) {
        return fields.velocity[static_cast<Eigen::Index>(space.velocity_dof(1, v))];
    };

    if (format == ExportFormat::vtk) {
        out << "# vtk DataFile Version 3.0\n";
        out << "tfns fields\n";
        out << "ASCII\n";
        out << "DATASET UNSTRUCTURED_GRID\n";
        out << "POINTS " << mesh.vertex_count() << " double\n";
        for (const auto& v : mesh.vertices)
            out << detail::format_double(v[0]) << ' ' << detail::format_double(v[1])
                << " 0\n";
        out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count()
            << "\n";
        for (const auto& t : mesh.triangles)
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
        out << "CELL_TYPES " << mesh.triangle_count() << "\n";
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
            out << "5\n";
        out << "POINT_DATA " << mesh.vertex_count() << "\n";
        out << "VECTORS velocity double\n";
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            out << detail::format_double(u1(v)) << ' ' << detail::format_double(u2(v))
                << " 0\n";
        out << "SCALARS pressure double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            out << detail::format_double(fields.pressure[static_cast<Eigen::Index>(v)])
                << "\n";
    } else {
        out << "x,y,u1,u2,p\n";
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
            out << detail::format_double(mesh.vertices[v][0]) << ','
                << detail::format_double(mesh.vertices[v][1]) << ','
                << detail::format_double(u1(v)) << ',' << detail::format_double(u2(v))
                << ','
                << detail::format_double(fields.pressure[static_cast<Eigen::Index>(v)])
                << "\n";
        }
    }

    out.flush();
    if (!out)
        throw std::runtime_error("export_fields: write to '" + path + "' failed");
}

} // namespace tfns
