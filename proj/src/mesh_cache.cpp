// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "subwave/mesh.hpp"

namespace subwave {

// Cache layout (all integers little-endian):
//   magic "MBMESH01" (8 bytes), version u8 = 1,
//   geometry hash u64, grid divisions i32, spacing f64,
//   vertex count u32, then per vertex: x f64, y f64, curve tag i8, frozen u8,
//   dof count u32 (= vertex count), then per vertex: dof i32,
//   independent dof count i32,
//   triangle count u32, then per triangle: 3 x i32 vertices, region u8,
//   edge counts u32 x 2, then each list as 2 x i32 pairs.

static_assert(std::endian::native == std::endian::little,
              "mesh cache assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'B', 'M', 'E', 'S', 'H', '0', '1'};
constexpr std::uint8_t kVersion = 1;

struct File {
    std::FILE* f = nullptr;
    ~File() {
        if (f) std::fclose(f);
    }
};

template <typename T>
bool put(std::FILE* f, const T& v) {
    return std::fwrite(&v, sizeof v, 1, f) == 1;
}

template <typename T>
bool get(std::FILE* f, T& v) {
    return std::fread(&v, sizeof v, 1, f) == 1;
}

} // namespace

void save_mesh(const Mesh& mesh, const std::string& path) {
    File file;
    file.f = std::fopen(path.c_str(), "wb");
    if (!file.f) return;  // cache is best-effort; a failed write is not an error
    std::FILE* f = file.f;
    std::fwrite(kMagic, 1, 8, f);
    put(f, kVersion);
    put(f, mesh.cell.hash());
    put(f, static_cast<std::int32_t>(mesh.n));
    put(f, mesh.h);
    put(f, static_cast<std::uint32_t>(mesh.vertex.size()));
    for (std::size_t v = 0; v < mesh.vertex.size(); ++v) {
        put(f, mesh.vertex[v].x);
        put(f, mesh.vertex[v].y);
        put(f, static_cast<std::int8_t>(mesh.on_curve[v]));
        put(f, mesh.frozen[v]);
    }
    put(f, static_cast<std::uint32_t>(mesh.dof.size()));
    for (std::int32_t d : mesh.dof) put(f, d);
    put(f, mesh.num_dofs);
    put(f, static_cast<std::uint32_t>(mesh.tri.size()));
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        put(f, mesh.tri[t][0]);
        put(f, mesh.tri[t][1]);
        put(f, mesh.tri[t][2]);
        put(f, static_cast<std::uint8_t>(mesh.tri_region[t]));
    }
    for (const auto* edges : {&mesh.edges_P, &mesh.edges_R}) {
        put(f, static_cast<std::uint32_t>(edges->size()));
        for (const auto& e : *edges) {
            put(f, e[0]);
            put(f, e[1]);
        }
    }
}

std::optional<Mesh> load_mesh(const std::string& path, const CellGeometry& cell, double h) {
    File file;
    file.f = std::fopen(path.c_str(), "rb");
    if (!file.f) return std::nullopt;
    std::FILE* f = file.f;

    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
    std::uint8_t version = 0;
    if (!get(f, version) || version != kVersion) return std::nullopt;
    std::uint64_t hash = 0;
    if (!get(f, hash) || hash != cell.hash()) return std::nullopt;

    Mesh mesh;
    mesh.cell = cell;
    std::int32_t n = 0;
    if (!get(f, n) || !get(f, mesh.h)) return std::nullopt;
    mesh.n = n;
    if (n != mesh_columns_for(h)) return std::nullopt;

    std::uint32_t nv = 0;
    if (!get(f, nv)) return std::nullopt;
    mesh.vertex.resize(nv);
    mesh.on_curve.resize(nv);
    mesh.frozen.resize(nv);
    for (std::uint32_t v = 0; v < nv; ++v) {
        std::int8_t tag = -1;
        if (!get(f, mesh.vertex[v].x) || !get(f, mesh.vertex[v].y) || !get(f, tag) ||
            !get(f, mesh.frozen[v]))
            return std::nullopt;
        mesh.on_curve[v] = static_cast<CurveTag>(tag);
    }
    std::uint32_t nd = 0;
    if (!get(f, nd) || nd != nv) return std::nullopt;
    mesh.dof.resize(nd);
    for (std::uint32_t v = 0; v < nd; ++v)
        if (!get(f, mesh.dof[v])) return std::nullopt;
    if (!get(f, mesh.num_dofs)) return std::nullopt;

    std::uint32_t nt = 0;
    if (!get(f, nt)) return std::nullopt;
    mesh.tri.resize(nt);
    mesh.tri_region.resize(nt);
    for (std::uint32_t t = 0; t < nt; ++t) {
        std::uint8_t reg = 0;
        if (!get(f, mesh.tri[t][0]) || !get(f, mesh.tri[t][1]) || !get(f, mesh.tri[t][2]) ||
            !get(f, reg))
            return std::nullopt;
        if (reg > 2) return std::nullopt;
        mesh.tri_region[t] = static_cast<Region>(reg);
    }
    for (auto* edges : {&mesh.edges_P, &mesh.edges_R}) {
        std::uint32_t ne = 0;
        if (!get(f, ne)) return std::nullopt;
        edges->resize(ne);
        for (std::uint32_t e = 0; e < ne; ++e)
            if (!get(f, (*edges)[e][0]) || !get(f, (*edges)[e][1])) return std::nullopt;
    }
    return mesh;
}

} // namespace subwave
