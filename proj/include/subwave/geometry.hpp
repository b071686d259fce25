// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "subwave/util.hpp"

namespace subwave {

enum class ShapeKind { Disk, Polygon };

/// A rod cross section inside the unit cell: a disk or a simple CCW polygon.
/// The closure must lie strictly inside the open unit cell.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Disk;
    Vec2 center;                 // disk only
    double radius = 0.0;         // disk only
    std::vector<Vec2> vertices;  // polygon only, counterclockwise

    static ShapeSpec disk(Vec2 c, double r);
    static ShapeSpec polygon(std::vector<Vec2> pts);

    double area() const;       // exact (disk) or shoelace (polygon)
    double perimeter() const;

    /// Signed distance to the boundary: negative inside, positive outside.
    /// For polygons this is exact (distance to nearest edge, signed by parity).
    double signed_distance(const Vec2& p) const;

    /// Nearest boundary point to `p`.
    Vec2 project_to_boundary(const Vec2& p) const;

    /// Outward unit normal of the boundary point nearest to `p`.
    Vec2 outward_normal_near(const Vec2& p) const;

    /// Distance from the shape's closure to the closure of `other` (0 if they intersect).
    double distance_to(const ShapeSpec& other) const;

    /// Minimal distance from the shape's closure to the boundary of the unit cell.
    double distance_to_cell_boundary() const;

    /// Throws ConfigError subtypes if the shape violates its invariants.
    void validate() const;
};

enum class Region { H, P, R, Boundary };

/// The unit cell with its two rod cross sections and region areas.
/// `has_P` / `has_R` exist only for degenerate test hooks (empty or one-rod
/// cells); `build_cell` always produces both rods.
struct CellGeometry {
    ShapeSpec shape_P;
    ShapeSpec shape_R;
    bool has_P = true;
    bool has_R = true;
    double theta_H = 1.0;
    double theta_P = 0.0;
    double theta_R = 0.0;
    double boundary_tol = 0.0;  // classification tolerance band
    double separation = 0.0;    // reported rod-to-rod distance (no limit imposed)

    std::uint64_t hash() const;  // geometry hash for cache keys
};

/// Builds the two-rod cell, computes exact areas, verifies disjointness.
/// Throws OverlapError / OutOfCellError on invalid input.
CellGeometry build_cell(const ShapeSpec& spec_P, const ShapeSpec& spec_R);

/// Test hooks: a cell with no rods (H = Y) and a cell with a single rod.
CellGeometry empty_cell();
CellGeometry one_rod_cell(const ShapeSpec& shape, Region which);

/// Classifies a point of Y with the declared boundary tolerance band.
Region region_of(const CellGeometry& cell, const Vec2& p);

/// Boundary quadrature on a shape: trapezoid nodes on disks, per-edge
/// Gauss-Legendre nodes on polygons. Weights are arclength weights and
/// normals outward unit normals.
struct BoundaryQuadrature {
    std::vector<Vec2> nodes;
    std::vector<double> weights;
    std::vector<Vec2> normals;
};

BoundaryQuadrature boundary_quadrature(const ShapeSpec& shape, int n);

} // namespace subwave
