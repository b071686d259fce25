// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "subwave/errors.hpp"
#include "subwave/geometry.hpp"

using namespace subwave;

namespace {

// Brute-force point-in-disk / point-in-polygon by winding angle, used as an
// independent check on region_of.
bool inside_shape(const ShapeSpec& s, const Vec2& p) {
    if (s.kind == ShapeKind::Disk) return (p - s.center).norm() < s.radius;
    double w = 0.0;
    std::size_t n = s.vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        Vec2 a = s.vertices[j] - p, b = s.vertices[i] - p;
        w += std::atan2(a.cross(b), a.dot(b));
    }
    return std::abs(w) > std::numbers::pi;  // 2*pi for inside, 0 for outside
}

CellGeometry reference_cell() {
    return build_cell(ShapeSpec::disk({0.25, 0.5}, 0.15), ShapeSpec::disk({0.7, 0.5}, 0.2));
}

} // namespace

TEST_CASE("reference cell area fractions") {
    CellGeometry cell = reference_cell();
    CHECK(cell.theta_P == doctest::Approx(std::numbers::pi * 0.0225).epsilon(1e-14));
    CHECK(cell.theta_R == doctest::Approx(std::numbers::pi * 0.04).epsilon(1e-14));
    CHECK(cell.theta_P + cell.theta_R + cell.theta_H == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.theta_P == doctest::Approx(0.070685834705770345).epsilon(1e-13));
    CHECK(cell.theta_R == doctest::Approx(0.12566370614359172).epsilon(1e-13));
    CHECK(cell.theta_H == doctest::Approx(0.80365045915063793).epsilon(1e-13));
    CHECK(cell.separation == doctest::Approx(0.45 - 0.35).epsilon(1e-12));
}

TEST_CASE("overlapping rods are rejected") {
    ShapeSpec a = ShapeSpec::disk({0.3, 0.5}, 0.2);
    ShapeSpec b = ShapeSpec::disk({0.6, 0.5}, 0.15);  // centers 0.3 apart, radii sum 0.35
    CHECK_THROWS_AS(build_cell(a, b), OverlapError);
}

TEST_CASE("shape leaving the cell is rejected") {
    ShapeSpec a = ShapeSpec::disk({0.1, 0.5}, 0.15);  // pokes through x=0
    ShapeSpec b = ShapeSpec::disk({0.7, 0.5}, 0.1);
    CHECK_THROWS_AS(build_cell(a, b), OutOfCellError);
    ShapeSpec sq = ShapeSpec::polygon({{0.0, 0.25}, {0.5, 0.25}, {0.5, 0.75}, {0.0, 0.75}});
    CHECK_THROWS_AS(sq.validate(), OutOfCellError);
}

TEST_CASE("clockwise and self-intersecting polygons are rejected") {
    ShapeSpec cw = ShapeSpec::polygon({{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.75}, {0.75, 0.25}});
    CHECK_THROWS_AS(cw.validate(), ValidationError);
    ShapeSpec bow = ShapeSpec::polygon({{0.25, 0.25}, {0.75, 0.75}, {0.75, 0.25}, {0.25, 0.75}});
    CHECK_THROWS_AS(bow.validate(), ValidationError);
}

TEST_CASE("square polygon metrics") {
    ShapeSpec sq = ShapeSpec::polygon({{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}});
    sq.validate();
    CHECK(sq.area() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sq.perimeter() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sq.signed_distance({0.5, 0.5}) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(sq.signed_distance({0.9, 0.5}) == doctest::Approx(0.15).epsilon(1e-14));
    Vec2 nrm = sq.outward_normal_near({0.75, 0.5});
    CHECK(nrm.x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nrm.y == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("disk signed distance, projection, normal") {
    ShapeSpec d = ShapeSpec::disk({0.5, 0.5}, 0.2);
    CHECK(d.signed_distance({0.5, 0.5}) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(d.signed_distance({0.9, 0.5}) == doctest::Approx(0.2).epsilon(1e-15));
    Vec2 q = d.project_to_boundary({0.9, 0.5});
    CHECK(q.x == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(q.y == doctest::Approx(0.5).epsilon(1e-14));
    Vec2 nrm = d.outward_normal_near({0.7, 0.5});
    CHECK(nrm.x == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boundary quadrature: disk perimeter and divergence identity") {
    ShapeSpec d = ShapeSpec::disk({0.6, 0.45}, 0.2);
    BoundaryQuadrature q = boundary_quadrature(d, 64);
    double per = 0.0, flux = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        per += q.weights[i];
        flux += q.weights[i] * q.nodes[i].dot(q.normals[i]);  // div(x) = 2 => flux = 2*area
    }
    CHECK(per == doctest::Approx(2.0 * std::numbers::pi * 0.2).epsilon(1e-10));
    CHECK(flux == doctest::Approx(2.0 * d.area()).epsilon(1e-10));
}

TEST_CASE("boundary quadrature: polygon perimeter and divergence identity") {
    ShapeSpec tri = ShapeSpec::polygon({{0.2, 0.2}, {0.8, 0.3}, {0.4, 0.7}});
    tri.validate();
    BoundaryQuadrature q = boundary_quadrature(tri, 16);
    double per = 0.0, flux = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        per += q.weights[i];
        flux += q.weights[i] * q.nodes[i].dot(q.normals[i]);
    }
    CHECK(per == doctest::Approx(tri.perimeter()).epsilon(1e-13));
    CHECK(flux == doctest::Approx(2.0 * tri.area()).epsilon(1e-13));
}

TEST_CASE("region_of agrees with winding-number classification") {
    CellGeometry cell = reference_cell();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        Vec2 p{u(rng), u(rng)};
        Region r = region_of(cell, p);
        if (r == Region::Boundary) continue;  // measure-zero band, skip
        Region want = Region::H;
        if (inside_shape(cell.shape_P, p)) want = Region::P;
        else if (inside_shape(cell.shape_R, p)) want = Region::R;
        CHECK(r == want);
    }
    CHECK(region_of(cell, {0.0, 0.0}) == Region::H);
    CHECK(region_of(cell, {0.25, 0.5}) == Region::P);
    CHECK(region_of(cell, {0.7, 0.5}) == Region::R);
    CHECK(region_of(cell, {0.25 + 0.15, 0.5}) == Region::Boundary);
    CHECK(region_of(cell, {0.7, 0.5 + 0.2}) == Region::Boundary);
}

TEST_CASE("one-rod and empty cells") {
    CellGeometry e = empty_cell();
    CHECK(!e.has_P);
    CHECK(!e.has_R);
    CHECK(e.theta_H == doctest::Approx(1.0));
    CHECK(region_of(e, {0.5, 0.5}) == Region::H);

    CellGeometry rp = one_rod_cell(ShapeSpec::disk({0.5, 0.5}, 0.3), Region::P);
    CHECK(rp.has_P);
    CHECK(!rp.has_R);
    CHECK(region_of(rp, {0.5, 0.5}) == Region::P);
    CHECK(rp.theta_P == doctest::Approx(std::numbers::pi * 0.09).epsilon(1e-14));

    CellGeometry rr = one_rod_cell(ShapeSpec::disk({0.5, 0.5}, 0.3), Region::R);
    CHECK(rr.has_R);
    CHECK(!rr.has_P);
    CHECK(region_of(rr, {0.5, 0.5}) == Region::R);
}

TEST_CASE("cell hash is stable and separates geometries") {
    CellGeometry a = reference_cell();
    CellGeometry b = reference_cell();
    CHECK(a.hash() == b.hash());
    CellGeometry c = build_cell(ShapeSpec::disk({0.25, 0.5}, 0.16), ShapeSpec::disk({0.7, 0.5}, 0.2));
    CHECK(a.hash() != c.hash());
    CHECK(a.hash() != empty_cell().hash());
}

TEST_CASE("distance_to across shape kinds") {
    ShapeSpec d1 = ShapeSpec::disk({0.3, 0.5}, 0.1);
    ShapeSpec d2 = ShapeSpec::disk({0.7, 0.5}, 0.15);
    CHECK(d1.distance_to(d2) == doctest::Approx(0.4 - 0.25).epsilon(1e-14));
    ShapeSpec sq = ShapeSpec::polygon({{0.55, 0.4}, {0.75, 0.4}, {0.75, 0.6}, {0.55, 0.6}});
    CHECK(d1.distance_to(sq) == doctest::Approx(0.25 - 0.1).epsilon(1e-14));
    CHECK(sq.distance_to(d1) == doctest::Approx(0.15).epsilon(1e-14));
    ShapeSpec sq2 = ShapeSpec::polygon({{0.1, 0.1}, {0.3, 0.1}, {0.3, 0.3}, {0.1, 0.3}});
    CHECK(sq.distance_to(sq2) == doctest::Approx(std::hypot(0.25, 0.1)).epsilon(1e-12));
}
