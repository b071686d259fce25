// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subwave/geometry.hpp"

namespace subwave {

/// Which rod boundary a mesh vertex lies on.
enum class CurveTag : std::int8_t { None = -1, OnP = 0, OnR = 1 };

/// Conforming periodic triangulation of the unit cell. Vertices live on the
/// closed sheet [0,1]^2; vertices on the right/top edge duplicate their
/// left/bottom partners and share a dof through `dof`. Every triangle lies
/// entirely in one region; rod boundaries are unions of mesh edges.
struct Mesh {
    CellGeometry cell;
    int n = 0;        // lattice columns (rows follow the equilateral aspect)
    double h = 0.0;   // actual column pitch, 1/n (at most the requested spacing)

    std::vector<Vec2> vertex;
    std::vector<CurveTag> on_curve;      // rod boundary the vertex lies on
    std::vector<std::uint8_t> frozen;    // vertex pinned (cell boundary, polygon corner)
    std::vector<std::int32_t> dof;       // vertex -> periodic dof
    std::int32_t num_dofs = 0;

    std::vector<std::array<std::int32_t, 3>> tri;  // CCW vertex triples
    std::vector<Region> tri_region;                // H, P or R per triangle

    // Oriented rod-boundary edges (rod region on the left, i.e. CCW loops).
    std::vector<std::array<std::int32_t, 2>> edges_P;
    std::vector<std::array<std::int32_t, 2>> edges_R;

    double tri_area(std::size_t t) const;
    double region_area(Region r) const;  // compensated sum of triangle areas
    double min_angle_deg() const;
    double max_boundary_edge_length() const;
};

/// Builds the conforming periodic mesh: a near-equilateral triangular lattice
/// whose pitch treats `h` as an upper bound (frontal-mesher convention),
/// vertices near a rod boundary snapped onto it, remaining crossing edges
/// split conformingly, long boundary chords refined, Laplacian smoothing,
/// then Delaunay edge flips. Deterministic for fixed inputs. Throws
/// ValidationError if h violates 0 < h <= 0.25, MeshFailure if the rods are
/// too close to the cell boundary or to each other for the requested spacing,
/// or if element quality (min angle >= 15 degrees) cannot be met.
Mesh generate_mesh(const CellGeometry& cell, double h);

/// Lattice column count used for spacing `h` (the cache key ingredient).
int mesh_columns_for(double h);

/// Binary mesh cache ("MBMESH01", little-endian). `load_mesh` returns nothing
/// if the file is missing, malformed, or was built for different inputs.
void save_mesh(const Mesh& mesh, const std::string& path);
std::optional<Mesh> load_mesh(const std::string& path, const CellGeometry& cell, double h);

} // namespace subwave
