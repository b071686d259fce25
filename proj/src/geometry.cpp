// SPDX-License-Identifier: Apache-2.0
#include "subwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "subwave/errors.hpp"

namespace subwave {

namespace {

// Distance from point p to segment [a,b] and the nearest point on it.
std::pair<double, Vec2> point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = 0.0;
    double len2 = ab.squared_norm();
    if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    Vec2 q = a + ab * t;
    return {(p - q).norm(), q};
}

// Distance between segments [a,b] and [c,d]; 0 if they intersect.
double segment_segment(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& u, const Vec2& v, const Vec2& w) {
        return (v - u).cross(w - u);
    };
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0;
    double m = point_segment(c, a, b).first;
    m = std::min(m, point_segment(d, a, b).first);
    m = std::min(m, point_segment(a, c, d).first);
    m = std::min(m, point_segment(b, c, d).first);
    return m;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& v) {
    // Even-odd crossing rule.
    bool inside = false;
    std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        bool cross = ((v[i].y > p.y) != (v[j].y > p.y)) &&
                     (p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x);
        if (cross) inside = !inside;
    }
    return inside;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
            }
            dp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -t;
        x[static_cast<std::size_t>(n - 1 - i)] = t;
        double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
}

} // namespace

ShapeSpec ShapeSpec::disk(Vec2 c, double r) {
    ShapeSpec s;
    s.kind = ShapeKind::Disk;
    s.center = c;
    s.radius = r;
    return s;
}

ShapeSpec ShapeSpec::polygon(std::vector<Vec2> pts) {
    ShapeSpec s;
    s.kind = ShapeKind::Polygon;
    s.vertices = std::move(pts);
    return s;
}

double ShapeSpec::area() const {
    if (kind == ShapeKind::Disk) return std::numbers::pi * radius * radius;
    double a = 0.0;
    std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) a += vertices[j].cross(vertices[i]);
    return 0.5 * a;
}

double ShapeSpec::perimeter() const {
    if (kind == ShapeKind::Disk) return 2.0 * std::numbers::pi * radius;
    double s = 0.0;
    std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) s += (vertices[i] - vertices[j]).norm();
    return s;
}

double ShapeSpec::signed_distance(const Vec2& p) const {
    if (kind == ShapeKind::Disk) return (p - center).norm() - radius;
    double d = std::numeric_limits<double>::max();
    std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        d = std::min(d, point_segment(p, vertices[j], vertices[i]).first);
    return point_in_polygon(p, vertices) ? -d : d;
}

Vec2 ShapeSpec::project_to_boundary(const Vec2& p) const {
    if (kind == ShapeKind::Disk) {
        Vec2 d = p - center;
        double n = d.norm();
        if (n == 0.0) return center + Vec2{radius, 0.0};
        return center + d * (radius / n);
    }
    double best = std::numeric_limits<double>::max();
    Vec2 q = p;
    std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        auto [d, c] = point_segment(p, vertices[j], vertices[i]);
        if (d < best) {
            best = d;
            q = c;
        }
    }
    return q;
}

Vec2 ShapeSpec::outward_normal_near(const Vec2& p) const {
    if (kind == ShapeKind::Disk) {
        Vec2 d = p - center;
        double n = d.norm();
        if (n == 0.0) return {1.0, 0.0};
        return d / n;
    }
    double best = std::numeric_limits<double>::max();
    Vec2 nrm{1.0, 0.0};
    std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        auto [d, c] = point_segment(p, vertices[j], vertices[i]);
        (void)c;
        if (d < best) {
            best = d;
            Vec2 e = vertices[i] - vertices[j];
            nrm = Vec2{e.y, -e.x}.normalized();  // outward for CCW orientation
        }
    }
    return nrm;
}

double ShapeSpec::distance_to(const ShapeSpec& other) const {
    if (kind == ShapeKind::Disk && other.kind == ShapeKind::Disk) {
        double d = (center - other.center).norm() - radius - other.radius;
        return std::max(0.0, d);
    }
    if (kind == ShapeKind::Disk) {
        double d = other.signed_distance(center);
        if (d <= radius) return 0.0;  // center within `radius` of other (or inside it)
        return d - radius;
    }
    if (other.kind == ShapeKind::Disk) return other.distance_to(*this);
    // polygon-polygon
    if (point_in_polygon(vertices.front(), other.vertices) ||
        point_in_polygon(other.vertices.front(), vertices))
        return 0.0;
    double best = std::numeric_limits<double>::max();
    std::size_t n = vertices.size(), m = other.vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        for (std::size_t k = 0, l = m - 1; k < m; l = k++)
            best = std::min(best, segment_segment(vertices[j], vertices[i],
                                                  other.vertices[l], other.vertices[k]));
    return best;
}

double ShapeSpec::distance_to_cell_boundary() const {
    auto wall = [](const Vec2& p) {
        return std::min(std::min(p.x, 1.0 - p.x), std::min(p.y, 1.0 - p.y));
    };
    if (kind == ShapeKind::Disk) return wall(center) - radius;
    // min(x,1-x,y,1-y) is concave, so the minimum over the polygon is at a vertex.
    double d = std::numeric_limits<double>::max();
    for (const auto& v : vertices) d = std::min(d, wall(v));
    return d;
}

void ShapeSpec::validate() const {
    if (kind == ShapeKind::Disk) {
        if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
        if (distance_to_cell_boundary() <= 0.0)
            throw OutOfCellError("disk touches or leaves the unit cell");
        return;
    }
    if (vertices.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
    if (area() <= 0.0)
        throw ValidationError("polygon must be counterclockwise with positive area");
    for (const auto& v : vertices)
        if (!(v.x > 0.0 && v.x < 1.0 && v.y > 0.0 && v.y < 1.0))
            throw OutOfCellError("polygon vertex outside the open unit cell");
    if (distance_to_cell_boundary() <= 0.0)
        throw OutOfCellError("polygon touches the unit cell boundary");
    // Simplicity: non-adjacent edges must not intersect.
    std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t i2 = (i + 1) % n;
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t j2 = (j + 1) % n;
            if (i == j || i2 == j || i == j2) continue;  // adjacent edges share a vertex
            if (segment_segment(vertices[i], vertices[i2], vertices[j], vertices[j2]) == 0.0)
                throw ValidationError("polygon is self-intersecting");
        }
    }
}

std::uint64_t CellGeometry::hash() const {
    Fnv64 f;
    auto add_shape = [&](const ShapeSpec& s, bool present) {
        f.add(static_cast<std::int64_t>(present ? (s.kind == ShapeKind::Disk ? 1 : 2) : 0));
        if (!present) return;
        if (s.kind == ShapeKind::Disk) {
            f.add(s.center.x).add(s.center.y).add(s.radius);
        } else {
            f.add(static_cast<std::int64_t>(s.vertices.size()));
            for (const auto& v : s.vertices) f.add(v.x).add(v.y);
        }
    };
    add_shape(shape_P, has_P);
    add_shape(shape_R, has_R);
    return f.value();
}

CellGeometry build_cell(const ShapeSpec& spec_P, const ShapeSpec& spec_R) {
    spec_P.validate();
    spec_R.validate();
    double sep = spec_P.distance_to(spec_R);
    if (sep <= 0.0) throw OverlapError("rod cross sections P and R must have disjoint closures");
    CellGeometry cell;
    cell.shape_P = spec_P;
    cell.shape_R = spec_R;
    cell.theta_P = spec_P.area();
    cell.theta_R = spec_R.area();
    cell.theta_H = 1.0 - cell.theta_P - cell.theta_R;
    cell.boundary_tol = 1e-9 * std::numbers::sqrt2;  // 1e-9 * cell diameter
    cell.separation = sep;
    return cell;
}

CellGeometry empty_cell() {
    CellGeometry cell;
    cell.has_P = false;
    cell.has_R = false;
    cell.boundary_tol = 1e-9 * std::numbers::sqrt2;
    return cell;
}

CellGeometry one_rod_cell(const ShapeSpec& shape, Region which) {
    shape.validate();
    CellGeometry cell;
    cell.boundary_tol = 1e-9 * std::numbers::sqrt2;
    if (which == Region::P) {
        cell.shape_P = shape;
        cell.has_R = false;
        cell.theta_P = shape.area();
    } else {
        cell.shape_R = shape;
        cell.has_P = false;
        cell.theta_R = shape.area();
    }
    cell.theta_H = 1.0 - cell.theta_P - cell.theta_R;
    return cell;
}

Region region_of(const CellGeometry& cell, const Vec2& p) {
    if (cell.has_P) {
        double d = cell.shape_P.signed_distance(p);
        if (std::abs(d) <= cell.boundary_tol) return Region::Boundary;
        if (d < 0.0) return Region::P;
    }
    if (cell.has_R) {
        double d = cell.shape_R.signed_distance(p);
        if (std::abs(d) <= cell.boundary_tol) return Region::Boundary;
        if (d < 0.0) return Region::R;
    }
    return Region::H;
}

BoundaryQuadrature boundary_quadrature(const ShapeSpec& shape, int n) {
    if (n < 8) throw ValidationError("boundary_quadrature requires n >= 8");
    BoundaryQuadrature q;
    if (shape.kind == ShapeKind::Disk) {
        q.nodes.reserve(static_cast<std::size_t>(n));
        double dw = 2.0 * std::numbers::pi * shape.radius / n;
        for (int k = 0; k < n; ++k) {
            double t = 2.0 * std::numbers::pi * k / n;
            Vec2 nr{std::cos(t), std::sin(t)};
            q.nodes.push_back(shape.center + nr * shape.radius);
            q.weights.push_back(dw);
            q.normals.push_back(nr);
        }
        return q;
    }
    std::vector<double> gx, gw;
    gauss_legendre(n, gx, gw);
    std::size_t nv = shape.vertices.size();
    for (std::size_t i = 0, j = nv - 1; i < nv; j = i++) {
        Vec2 a = shape.vertices[j], b = shape.vertices[i];
        Vec2 e = b - a;
        double len = e.norm();
        Vec2 nrm = Vec2{e.y, -e.x} / len;
        for (int k = 0; k < n; ++k) {
            double t = 0.5 * (gx[static_cast<std::size_t>(k)] + 1.0);
            q.nodes.push_back(a + e * t);
            q.weights.push_back(0.5 * len * gw[static_cast<std::size_t>(k)]);
            q.normals.push_back(nrm);
        }
    }
    return q;
}

} // namespace subwave
