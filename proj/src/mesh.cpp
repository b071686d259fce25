// SPDX-License-Identifier: Apache-2.0
#include "subwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "subwave/errors.hpp"

namespace subwave {

namespace {

constexpr double kOnCurveEps = 1e-12;  // |signed distance| below this counts as "on the curve"

const ShapeSpec* shape_of(const CellGeometry& cell, CurveTag tag) {
    if (tag == CurveTag::OnP && cell.has_P) return &cell.shape_P;
    if (tag == CurveTag::OnR && cell.has_R) return &cell.shape_R;
    return nullptr;
}

double tri_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * (b - a).cross(c - a);
}

using EdgeKey = std::pair<std::int32_t, std::int32_t>;

EdgeKey edge_key(std::int32_t a, std::int32_t b) {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

// Locates the boundary crossing on segment [a,b] by bisection on the signed
// distance, which both shape kinds support exactly.
Vec2 edge_crossing(const ShapeSpec& s, const Vec2& a, const Vec2& b) {
    double lo = 0.0, hi = 1.0;
    double flo = s.signed_distance(a);
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = s.signed_distance(a + (b - a) * mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return a + (b - a) * (0.5 * (lo + hi));
}

// The requested spacing is treated as an upper bound, as frontal meshers do:
// the lattice pitch targets 0.9 of it, which the eigenvalue accuracy of the
// piecewise-linear elements needs at the working resolutions.
int lattice_columns(double h) {
    return std::max(4, static_cast<int>(std::lround(10.0 / (9.0 * h))));
}

// Even row count approximating the equilateral aspect hy = hx * sqrt(3)/2.
int lattice_rows(int nx) {
    return 2 * std::max(2, static_cast<int>(std::lround(nx / std::numbers::sqrt3)));
}

struct Builder {
    const CellGeometry& cell;
    int n;
    int ny;
    double h;
    double hy;
    std::vector<Vec2> vertex;
    std::vector<CurveTag> on_curve;
    std::vector<std::uint8_t> frozen;
    std::vector<std::array<std::int32_t, 3>> tri;
    std::vector<Region> tri_region;

    explicit Builder(const CellGeometry& c, int n_)
        : cell(c), n(n_), ny(lattice_rows(n_)), h(1.0 / n_), hy(1.0 / lattice_rows(n_)) {}

    std::int32_t grid_id(int i, int j) const { return static_cast<std::int32_t>(j * (n + 1) + i); }

    std::int32_t add_vertex(const Vec2& p, CurveTag tag, bool fix) {
        vertex.push_back(p);
        on_curve.push_back(tag);
        frozen.push_back(fix ? 1 : 0);
        return static_cast<std::int32_t>(vertex.size()) - 1;
    }

    // Triangular lattice: alternate rows shift by half a spacing, giving
    // near-equilateral triangles (much smaller eigenvalue error constants
    // than a right-triangle split of a square grid). Seam rows/columns stay
    // frozen so periodic replicas keep exact translate coordinates.
    void build_grid() {
        vertex.reserve(static_cast<std::size_t>((n + 1) * (ny + 1)));
        for (int j = 0; j <= ny; ++j) {
            double off = (j % 2 == 1) ? 0.5 : 0.0;
            for (int i = 0; i <= n; ++i)
                add_vertex({(i + off) * h, j * hy}, CurveTag::None,
                           i == 0 || i == n || j == 0 || j == ny);
        }
    }

    void pin_polygon_corners() {
        for (CurveTag tag : {CurveTag::OnP, CurveTag::OnR}) {
            const ShapeSpec* s = shape_of(cell, tag);
            if (!s || s->kind != ShapeKind::Polygon) continue;
            for (const Vec2& q : s->vertices) {
                int j = static_cast<int>(std::lround(q.y / hy));
                double off = (j % 2 == 1) ? 0.5 : 0.0;
                int i = static_cast<int>(std::lround(q.x / h - off));
                std::int32_t v = grid_id(i, j);
                if (frozen[static_cast<std::size_t>(v)] && on_curve[static_cast<std::size_t>(v)] != CurveTag::None)
                    throw MeshFailure("mesh spacing too coarse: two polygon corners share a grid vertex");
                vertex[static_cast<std::size_t>(v)] = q;
                on_curve[static_cast<std::size_t>(v)] = tag;
                frozen[static_cast<std::size_t>(v)] = 1;
            }
        }
    }

    void snap_to_curves() {
        double band = 0.35 * h;
        for (std::size_t v = 0; v < vertex.size(); ++v) {
            if (frozen[v]) continue;
            for (CurveTag tag : {CurveTag::OnP, CurveTag::OnR}) {
                const ShapeSpec* s = shape_of(cell, tag);
                if (!s) continue;
                if (std::abs(s->signed_distance(vertex[v])) < band) {
                    vertex[v] = s->project_to_boundary(vertex[v]);
                    on_curve[v] = tag;
                    break;
                }
            }
        }
    }

    void build_triangles() {
        tri.reserve(static_cast<std::size_t>(2 * n * ny));
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < n; ++i) {
                std::int32_t v00 = grid_id(i, j), v10 = grid_id(i + 1, j);
                std::int32_t v01 = grid_id(i, j + 1), v11 = grid_id(i + 1, j + 1);
                if (j % 2 == 0) {
                    // Upper row offset right: apex-up then apex-down.
                    tri.push_back({v00, v10, v01});
                    tri.push_back({v10, v11, v01});
                } else {
                    // Lower row offset right: apex-down then apex-up.
                    tri.push_back({v00, v10, v11});
                    tri.push_back({v00, v11, v01});
                }
            }
    }

    // Splits every edge that strictly crosses a rod boundary, inserting the
    // crossing point as a shared vertex. Returns the number of splits made.
    std::size_t split_crossing_edges() {
        std::map<EdgeKey, std::int32_t> cross;  // edge -> inserted vertex
        auto crossing_of = [&](std::int32_t a, std::int32_t b) -> std::int32_t {
            auto it = cross.find(edge_key(a, b));
            return it == cross.end() ? -1 : it->second;
        };
        for (const auto& t : tri) {
            for (int e = 0; e < 3; ++e) {
                std::int32_t a = t[static_cast<std::size_t>(e)];
                std::int32_t b = t[static_cast<std::size_t>((e + 1) % 3)];
                EdgeKey key = edge_key(a, b);
                if (cross.count(key)) continue;
                for (CurveTag tag : {CurveTag::OnP, CurveTag::OnR}) {
                    const ShapeSpec* s = shape_of(cell, tag);
                    if (!s) continue;
                    double da = s->signed_distance(vertex[static_cast<std::size_t>(a)]);
                    double db = s->signed_distance(vertex[static_cast<std::size_t>(b)]);
                    if (da * db < 0.0 && std::min(std::abs(da), std::abs(db)) > kOnCurveEps) {
                        Vec2 p = edge_crossing(*s, vertex[static_cast<std::size_t>(a)],
                                               vertex[static_cast<std::size_t>(b)]);
                        cross[key] = add_vertex(p, tag, false);
                        break;
                    }
                }
            }
        }
        if (cross.empty()) return 0;

        std::vector<std::array<std::int32_t, 3>> out;
        out.reserve(tri.size() + 2 * cross.size());
        for (const auto& t : tri) {
            std::int32_t c01 = crossing_of(t[0], t[1]);
            std::int32_t c12 = crossing_of(t[1], t[2]);
            std::int32_t c20 = crossing_of(t[2], t[0]);
            int count = (c01 >= 0) + (c12 >= 0) + (c20 >= 0);
            if (count == 0) {
                out.push_back(t);
            } else if (count == 1) {
                // One crossing: the opposite vertex lies on the curve; fan it.
                if (c01 >= 0) {
                    out.push_back({t[0], c01, t[2]});
                    out.push_back({c01, t[1], t[2]});
                } else if (c12 >= 0) {
                    out.push_back({t[1], c12, t[0]});
                    out.push_back({c12, t[2], t[0]});
                } else {
                    out.push_back({t[2], c20, t[1]});
                    out.push_back({c20, t[0], t[1]});
                }
            } else if (count == 2) {
                // Two crossings share an apex; cut off the apex triangle and
                // split the remaining quad by its shorter diagonal.
                int u = c12 < 0 ? 1 : (c20 < 0 ? 2 : 0);  // un-crossed edge index
                int r = (u + 2) % 3;
                std::int32_t v0 = t[static_cast<std::size_t>(r)];
                std::int32_t v1 = t[static_cast<std::size_t>((r + 1) % 3)];
                std::int32_t v2 = t[static_cast<std::size_t>((r + 2) % 3)];
                std::int32_t p = crossing_of(v0, v1);
                std::int32_t q = crossing_of(v2, v0);
                out.push_back({v0, p, q});
                double d1 = (vertex[static_cast<std::size_t>(p)] - vertex[static_cast<std::size_t>(v2)]).norm();
                double d2 = (vertex[static_cast<std::size_t>(v1)] - vertex[static_cast<std::size_t>(q)]).norm();
                if (d1 <= d2) {
                    out.push_back({p, v1, v2});
                    out.push_back({p, v2, q});
                } else {
                    out.push_back({p, v1, q});
                    out.push_back({v1, v2, q});
                }
            } else {
                throw MeshFailure("mesh spacing too coarse: a triangle crosses a rod boundary three times");
            }
        }
        tri = std::move(out);
        return cross.size();
    }

    void tag_regions() {
        tri_region.assign(tri.size(), Region::H);
        for (std::size_t t = 0; t < tri.size(); ++t) {
            Vec2 c = (vertex[static_cast<std::size_t>(tri[t][0])] +
                      vertex[static_cast<std::size_t>(tri[t][1])] +
                      vertex[static_cast<std::size_t>(tri[t][2])]) / 3.0;
            if (cell.has_P && cell.shape_P.signed_distance(c) < 0.0)
                tri_region[t] = Region::P;
            else if (cell.has_R && cell.shape_R.signed_distance(c) < 0.0)
                tri_region[t] = Region::R;
        }
    }

    // Edge -> adjacent triangle indices (at most two on the periodic sheet).
    std::map<EdgeKey, std::array<std::int32_t, 2>> edge_triangles() const {
        std::map<EdgeKey, std::array<std::int32_t, 2>> adj;
        for (std::size_t t = 0; t < tri.size(); ++t)
            for (int e = 0; e < 3; ++e) {
                EdgeKey key = edge_key(tri[t][static_cast<std::size_t>(e)],
                                       tri[t][static_cast<std::size_t>((e + 1) % 3)]);
                auto [it, fresh] = adj.try_emplace(key, std::array<std::int32_t, 2>{-1, -1});
                it->second[fresh ? 0 : 1] = static_cast<std::int32_t>(t);
            }
        return adj;
    }

    // Splits boundary chords longer than h at the curve point above their
    // midpoint, so the inscribed polygon keeps vertex spacing <= h. Chords
    // whose triangles were already modified this pass are left for the next
    // pass (the caller loops until no change).
    bool refine_long_chords() {
        auto adj = edge_triangles();
        bool changed = false;
        auto find_edge = [&](std::size_t t, EdgeKey key) {
            for (int e = 0; e < 3; ++e)
                if (edge_key(tri[t][static_cast<std::size_t>(e)],
                             tri[t][static_cast<std::size_t>((e + 1) % 3)]) == key)
                    return e;
            return -1;
        };
        for (const auto& [key, ts] : adj) {
            if (ts[1] < 0) continue;
            if (tri_region[static_cast<std::size_t>(ts[0])] == tri_region[static_cast<std::size_t>(ts[1])])
                continue;
            auto a = static_cast<std::size_t>(key.first);
            auto b = static_cast<std::size_t>(key.second);
            CurveTag tag = on_curve[a];
            if (tag == CurveTag::None || on_curve[b] != tag) continue;
            if ((vertex[a] - vertex[b]).norm() <= h * (1.0 + 1e-9)) continue;
            int e0 = find_edge(static_cast<std::size_t>(ts[0]), key);
            int e1 = find_edge(static_cast<std::size_t>(ts[1]), key);
            if (e0 < 0 || e1 < 0) {
                changed = true;  // a neighbor split already touched this pair; retry next pass
                continue;
            }
            const ShapeSpec* s = shape_of(cell, tag);
            std::int32_t m = add_vertex(s->project_to_boundary((vertex[a] + vertex[b]) * 0.5), tag, false);
            int local[2] = {e0, e1};
            for (int side = 0; side < 2; ++side) {
                std::size_t t = static_cast<std::size_t>(ts[static_cast<std::size_t>(side)]);
                std::array<std::int32_t, 3> old = tri[t];
                Region reg = tri_region[t];
                int e = local[side];
                std::int32_t va = old[static_cast<std::size_t>(e)];
                std::int32_t vb = old[static_cast<std::size_t>((e + 1) % 3)];
                std::int32_t vc = old[static_cast<std::size_t>((e + 2) % 3)];
                tri[t] = {va, m, vc};
                tri.push_back({m, vb, vc});
                tri_region.push_back(reg);
            }
            changed = true;
        }
        return changed;
    }

    void smooth(int sweeps, double omega) {
        // Vertex adjacency from the final edge structure.
        std::vector<std::vector<std::int32_t>> nbr(vertex.size());
        {
            std::map<EdgeKey, bool> seen;
            for (const auto& t : tri)
                for (int e = 0; e < 3; ++e) {
                    std::int32_t a = t[static_cast<std::size_t>(e)];
                    std::int32_t b = t[static_cast<std::size_t>((e + 1) % 3)];
                    auto [it, fresh] = seen.try_emplace(edge_key(a, b), true);
                    (void)it;
                    if (fresh) {
                        nbr[static_cast<std::size_t>(a)].push_back(b);
                        nbr[static_cast<std::size_t>(b)].push_back(a);
                    }
                }
        }
        std::vector<Vec2> next(vertex.size());
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            for (std::size_t v = 0; v < vertex.size(); ++v) {
                if (frozen[v] || nbr[v].empty()) {
                    next[v] = vertex[v];
                    continue;
                }
                Vec2 avg{0.0, 0.0};
                for (std::int32_t w : nbr[v]) avg += vertex[static_cast<std::size_t>(w)];
                avg = avg / static_cast<double>(nbr[v].size());
                Vec2 moved = vertex[v] + (avg - vertex[v]) * omega;
                if (on_curve[v] != CurveTag::None)
                    moved = shape_of(cell, on_curve[v])->project_to_boundary(moved);
                next[v] = moved;
            }
            vertex.swap(next);
        }
    }

    // Deterministic Delaunay edge flips on same-region, non-chord edges.
    void delaunay_flips() {
        auto in_circumcircle = [&](std::int32_t ia, std::int32_t ib, std::int32_t ic,
                                   std::int32_t ip) {
            const Vec2 &a = vertex[static_cast<std::size_t>(ia)], &b = vertex[static_cast<std::size_t>(ib)];
            const Vec2 &c = vertex[static_cast<std::size_t>(ic)], &p = vertex[static_cast<std::size_t>(ip)];
            double ax = a.x - p.x, ay = a.y - p.y;
            double bx = b.x - p.x, by = b.y - p.y;
            double cx = c.x - p.x, cy = c.y - p.y;
            double det = (ax * ax + ay * ay) * (bx * cy - by * cx)
                       - (bx * bx + by * by) * (ax * cy - ay * cx)
                       + (cx * cx + cy * cy) * (ax * by - ay * bx);
            double scale = h * h;
            return det > 1e-9 * scale * scale;  // strict violation only, so flipping terminates
        };
        for (int sweep = 0; sweep < 60; ++sweep) {
            auto adj = edge_triangles();
            bool flipped = false;
            for (const auto& [key, ts] : adj) {
                if (ts[1] < 0) continue;
                std::size_t t1 = static_cast<std::size_t>(ts[0]), t2 = static_cast<std::size_t>(ts[1]);
                if (tri_region[t1] != tri_region[t2]) continue;
                std::size_t a = static_cast<std::size_t>(key.first), b = static_cast<std::size_t>(key.second);
                if (on_curve[a] != CurveTag::None && on_curve[a] == on_curve[b]) continue;
                // Earlier flips this sweep may have retired this adjacency
                // entry; both triangles must still carry the edge.
                auto contains_edge = [&](std::size_t t) {
                    for (int eidx = 0; eidx < 3; ++eidx)
                        if (edge_key(tri[t][static_cast<std::size_t>(eidx)],
                                     tri[t][static_cast<std::size_t>((eidx + 1) % 3)]) == key)
                            return true;
                    return false;
                };
                if (!contains_edge(t1) || !contains_edge(t2)) continue;
                auto apex = [&](std::size_t t) {
                    for (int e = 0; e < 3; ++e) {
                        std::int32_t v = tri[t][static_cast<std::size_t>(e)];
                        if (v != key.first && v != key.second) return v;
                    }
                    return std::int32_t{-1};
                };
                std::int32_t d = apex(t1), e2 = apex(t2);
                if (d < 0 || e2 < 0 || d == e2) continue;
                if (!in_circumcircle(tri[t1][0], tri[t1][1], tri[t1][2], e2)) continue;
                // Orient the shared edge as it appears in t1: (u, w, d) CCW.
                std::int32_t u = -1, w = -1;
                for (int eidx = 0; eidx < 3; ++eidx) {
                    std::int32_t p0 = tri[t1][static_cast<std::size_t>(eidx)];
                    std::int32_t p1 = tri[t1][static_cast<std::size_t>((eidx + 1) % 3)];
                    if (edge_key(p0, p1) == key) {
                        u = p0;
                        w = p1;
                        break;
                    }
                }
                // New pair (u, e2, d) and (e2, w, d); require positive areas.
                const Vec2 &pu = vertex[static_cast<std::size_t>(u)], &pw = vertex[static_cast<std::size_t>(w)];
                const Vec2 &pd = vertex[static_cast<std::size_t>(d)], &pe = vertex[static_cast<std::size_t>(e2)];
                if (tri_signed_area(pu, pe, pd) <= 1e-14 || tri_signed_area(pe, pw, pd) <= 1e-14)
                    continue;
                tri[t1] = {u, e2, d};
                tri[t2] = {e2, w, d};
                flipped = true;
            }
            if (!flipped) break;
        }
    }

    void check_quality() const {
        KahanSum area;
        for (std::size_t t = 0; t < tri.size(); ++t) {
            double a = tri_signed_area(vertex[static_cast<std::size_t>(tri[t][0])],
                                       vertex[static_cast<std::size_t>(tri[t][1])],
                                       vertex[static_cast<std::size_t>(tri[t][2])]);
            if (a <= 0.0) throw MeshFailure("inverted or degenerate triangle after mesh generation");
            area.add(a);
        }
        if (std::abs(area.value() - 1.0) > 1e-10)
            throw MeshFailure("triangle areas do not tile the unit cell (defect " +
                              format_g17(area.value() - 1.0) + ")");
    }
};

double min_angle_of(const Vec2& a, const Vec2& b, const Vec2& c) {
    auto angle = [](const Vec2& u, const Vec2& v) {
        return std::atan2(std::abs(u.cross(v)), u.dot(v));
    };
    double m = angle(b - a, c - a);
    m = std::min(m, angle(a - b, c - b));
    m = std::min(m, angle(a - c, b - c));
    return m * 180.0 / std::numbers::pi;
}

} // namespace

double Mesh::tri_area(std::size_t t) const {
    return tri_signed_area(vertex[static_cast<std::size_t>(tri[t][0])],
                           vertex[static_cast<std::size_t>(tri[t][1])],
                           vertex[static_cast<std::size_t>(tri[t][2])]);
}

double Mesh::region_area(Region r) const {
    KahanSum s;
    for (std::size_t t = 0; t < tri.size(); ++t)
        if (tri_region[t] == r) s.add(tri_area(t));
    return s.value();
}

double Mesh::min_angle_deg() const {
    double m = 180.0;
    for (std::size_t t = 0; t < tri.size(); ++t)
        m = std::min(m, min_angle_of(vertex[static_cast<std::size_t>(tri[t][0])],
                                     vertex[static_cast<std::size_t>(tri[t][1])],
                                     vertex[static_cast<std::size_t>(tri[t][2])]));
    return m;
}

double Mesh::max_boundary_edge_length() const {
    double m = 0.0;
    for (const auto* edges : {&edges_P, &edges_R})
        for (const auto& e : *edges)
            m = std::max(m, (vertex[static_cast<std::size_t>(e[0])] -
                             vertex[static_cast<std::size_t>(e[1])]).norm());
    return m;
}

int mesh_columns_for(double h) { return lattice_columns(h); }

Mesh generate_mesh(const CellGeometry& cell, double h) {
    if (!(h > 0.0) || h > 0.25)
        throw ValidationError("mesh spacing must satisfy 0 < h <= 0.25");
    int n = lattice_columns(h);
    double h_act = 1.0 / n;

    for (CurveTag tag : {CurveTag::OnP, CurveTag::OnR}) {
        const ShapeSpec* s = shape_of(cell, tag);
        if (s && s->distance_to_cell_boundary() <= 2.0 * h_act)
            throw MeshFailure("rod clearance to cell boundary must exceed twice the mesh spacing");
    }
    if (cell.has_P && cell.has_R && cell.separation <= 2.0 * h_act)
        throw MeshFailure("rod separation must exceed twice the mesh spacing");

    Builder b(cell, n);
    b.build_grid();
    b.pin_polygon_corners();
    b.snap_to_curves();
    b.build_triangles();
    for (int pass = 0; pass < 4; ++pass)
        if (b.split_crossing_edges() == 0) break;
    b.tag_regions();
    b.smooth(8, 0.6);
    // Smoothing can stretch boundary chords past h; alternate refinement with
    // a short relaxation until the inscribed polygons keep vertex spacing <= h.
    for (int pass = 0; pass < 12; ++pass) {
        if (!b.refine_long_chords()) break;
        b.smooth(2, 0.6);
        if (pass == 11) throw MeshFailure("boundary chord refinement did not settle");
    }
    b.delaunay_flips();
    b.check_quality();

    Mesh mesh;
    mesh.cell = cell;
    mesh.n = n;
    mesh.h = h_act;
    mesh.vertex = std::move(b.vertex);
    mesh.on_curve = std::move(b.on_curve);
    mesh.frozen = std::move(b.frozen);
    mesh.tri = std::move(b.tri);
    mesh.tri_region = std::move(b.tri_region);

    // Periodic dof identification: right/top grid vertices map to their
    // left/bottom partners; inserted vertices are strictly interior.
    std::size_t nv = mesh.vertex.size();
    mesh.dof.assign(nv, -1);
    std::int32_t next = 0;
    int ny = lattice_rows(n);
    auto grid_id = [n](int i, int j) { return static_cast<std::int32_t>(j * (n + 1) + i); };
    std::size_t grid_count = static_cast<std::size_t>((n + 1) * (ny + 1));
    for (std::size_t v = 0; v < nv; ++v) {
        if (v < grid_count) {
            int i = static_cast<int>(v) % (n + 1);
            int j = static_cast<int>(v) / (n + 1);
            int pi = (i == n) ? 0 : i;
            int pj = (j == ny) ? 0 : j;
            if (pi != i || pj != j) {
                mesh.dof[v] = mesh.dof[static_cast<std::size_t>(grid_id(pi, pj))];
                continue;
            }
        }
        mesh.dof[v] = next++;
    }
    mesh.num_dofs = next;

    // Oriented rod-boundary edges: edges of rod triangles whose neighbor lies
    // in a different region, oriented with the rod on the left.
    std::map<EdgeKey, std::array<std::int32_t, 2>> adj;
    for (std::size_t t = 0; t < mesh.tri.size(); ++t)
        for (int e = 0; e < 3; ++e) {
            EdgeKey key = edge_key(mesh.tri[t][static_cast<std::size_t>(e)],
                                   mesh.tri[t][static_cast<std::size_t>((e + 1) % 3)]);
            auto [it, fresh] = adj.try_emplace(key, std::array<std::int32_t, 2>{-1, -1});
            it->second[fresh ? 0 : 1] = static_cast<std::int32_t>(t);
        }
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        Region reg = mesh.tri_region[t];
        if (reg != Region::P && reg != Region::R) continue;
        for (int e = 0; e < 3; ++e) {
            std::int32_t a = mesh.tri[t][static_cast<std::size_t>(e)];
            std::int32_t c = mesh.tri[t][static_cast<std::size_t>((e + 1) % 3)];
            const auto& ts = adj.at(edge_key(a, c));
            std::int32_t other = (ts[0] == static_cast<std::int32_t>(t)) ? ts[1] : ts[0];
            if (other < 0 || mesh.tri_region[static_cast<std::size_t>(other)] == reg) continue;
            (reg == Region::P ? mesh.edges_P : mesh.edges_R).push_back({a, c});
        }
    }

    double min_angle = mesh.min_angle_deg();
    if (min_angle < 15.0)
        throw MeshFailure("mesh quality below the 15 degree minimum angle (got " +
                          std::to_string(min_angle) + " degrees)");
    return mesh;
}

} // namespace subwave
