// SPDX-License-Identifier: Apache-2.0
#include "subwave/dirichlet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <tuple>

#include "subwave/bessel.hpp"
#include "subwave/errors.hpp"
#include "subwave/util.hpp"

namespace subwave {

double DirichletSpectrum::defect_after(int count) const {
    count = std::min<int>(count, static_cast<int>(entries.size()));
    KahanSum captured;
    for (int j = 0; j < count; ++j) captured.add(entries[j].mean * entries[j].mean);
    return std::max(0.0, theta_R - captured.value());
}

namespace {

void split_by_mean(DirichletSpectrum& spec) {
    spec.nonzero_mean_index.clear();
    spec.zero_mean_index.clear();
    for (int j = 0; j < static_cast<int>(spec.entries.size()); ++j) {
        if (std::abs(spec.entries[j].mean) > spec.mean_threshold)
            spec.nonzero_mean_index.push_back(j);
        else
            spec.zero_mean_index.push_back(j);
    }
}

// Deterministic sign: positive mean when the mean is resolved, otherwise the
// largest-magnitude nodal value positive.
void fix_sign(DirichletEntry& e, double threshold) {
    double s = e.mean;
    if (std::abs(s) <= threshold && e.phi.size() > 0) {
        Eigen::Index at = 0;
        e.phi.cwiseAbs().maxCoeff(&at);
        s = e.phi[at];
    }
    if (s < 0.0) {
        e.phi = -e.phi;
        e.mean = -e.mean;
    }
}

} // namespace

DirichletSpectrum compute_dirichlet(const Mesh& mesh, int count) {
    if (count < 1) throw ValidationError("Dirichlet spectrum count must be at least 1");
    if (!mesh.cell.has_R) throw ValidationError("cell has no rod R to take a Dirichlet spectrum on");

    DirichletSpectrum spec;
    spec.rod_dofs = interior_dofs(mesh, Region::R);
    const int dim = static_cast<int>(spec.rod_dofs.size());
    if (count > dim)
        throw InsufficientSpectrum("requested " + std::to_string(count) +
                                   " Dirichlet modes but the rod interior carries only " +
                                   std::to_string(dim) + " dofs; refine the mesh");

    SpMat K = assemble_stiffness(mesh, RegionCoeff::only(Region::R));
    SpMat M = assemble_mass(mesh, RegionCoeff::only(Region::R));
    // Int_R of each hat function = row sums of the rod mass matrix; restricting
    // the sums (not the matrix) to interior dofs keeps boundary couplings.
    Eigen::VectorXd hat_integrals = gather(Eigen::VectorXd(M * Eigen::VectorXd::Ones(M.cols())),
                                           spec.rod_dofs);
    SpMat Kr = submatrix(K, spec.rod_dofs);
    SpMat Mr = submatrix(M, spec.rod_dofs);

    spec.theta_R = mesh.region_area(Region::R);
    spec.mean_threshold = 1e-6 * std::sqrt(spec.theta_R);

    std::vector<EigPair> pairs = solve_gevp(Kr, Mr, count, GevpOptions{});
    spec.entries.reserve(pairs.size());
    for (EigPair& p : pairs) {
        DirichletEntry e;
        e.nu = p.lambda;
        e.phi = std::move(p.phi);
        e.mean = hat_integrals.dot(e.phi);
        fix_sign(e, spec.mean_threshold);
        spec.entries.push_back(std::move(e));
    }
    split_by_mean(spec);
    return spec;
}

DirichletSpectrum analytic_disk_spectrum(double radius, int count) {
    if (radius <= 0.0) throw ValidationError("disk radius must be positive");
    if (count < 1) throw ValidationError("Dirichlet spectrum count must be at least 1");

    DirichletSpectrum spec;
    spec.theta_R = std::numbers::pi * radius * radius;
    spec.mean_threshold = 1e-6 * std::sqrt(spec.theta_R);

    // Collect Bessel zeros j_{k,m} <= X for every order, growing X until the
    // multiplicity-weighted count covers the request. Weyl's law puts the
    // count near X^2/4, so the initial guess rarely needs more than one grow.
    struct Mode {
        double j = 0.0;
        int k = 0;
        int m = 0;
    };
    std::vector<Mode> modes;
    double xmax = 2.2 * std::sqrt(static_cast<double>(count)) + 12.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        modes.clear();
        long weighted = 0;
        for (int k = 0; ; ++k) {
            // The first zero of J_k exceeds k, so higher orders cannot contribute.
            if (k > static_cast<int>(xmax) + 1) break;
            std::vector<double> zeros = bessel_j_zeros_upto(k, xmax);
            if (zeros.empty() && k > 0) break;
            for (int m = 0; m < static_cast<int>(zeros.size()); ++m) {
                modes.push_back({zeros[m], k, m + 1});
                weighted += (k == 0) ? 1 : 2;
            }
        }
        if (weighted >= count) break;
        xmax *= 1.4;
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        return std::tie(a.j, a.k, a.m) < std::tie(b.j, b.k, b.m);
    });

    spec.entries.reserve(count);
    for (const Mode& mode : modes) {
        if (static_cast<int>(spec.entries.size()) >= count) break;
        DirichletEntry e;
        e.nu = (mode.j / radius) * (mode.j / radius);
        e.mean = (mode.k == 0) ? 2.0 * radius * std::sqrt(std::numbers::pi) / mode.j : 0.0;
        const int copies = (mode.k == 0) ? 1 : 2;
        for (int c = 0; c < copies && static_cast<int>(spec.entries.size()) < count; ++c)
            spec.entries.push_back(e);
    }
    if (static_cast<int>(spec.entries.size()) < count)
        throw InsufficientSpectrum("analytic disk enumeration fell short of the requested count");
    split_by_mean(spec);
    return spec;
}

int default_spectrum_count(const DirichletSpectrum& spec, double defect_tol) {
    KahanSum captured;
    for (int j = 0; j < static_cast<int>(spec.entries.size()); ++j) {
        captured.add(spec.entries[j].mean * spec.entries[j].mean);
        if (spec.theta_R - captured.value() < defect_tol) return j + 1;
    }
    return static_cast<int>(spec.entries.size());
}

MuTailBound mu_series_tail_bound(const DirichletSpectrum& spec, double xi0) {
    if (spec.entries.empty()) throw InsufficientSpectrum("empty spectrum has no tail bound");
    MuTailBound tail;
    tail.nu_floor = spec.entries.back().nu;
    tail.defect = spec.parseval_defect();
    if (xi0 >= tail.nu_floor)
        throw InsufficientSpectrum("tail bound needs xi0 below the last computed eigenvalue " +
                                   format_g17(tail.nu_floor) + " but xi0 = " + format_g17(xi0));
    // Every neglected eigenvalue exceeds nu_floor; the factor mu/(mu - xi0) is
    // decreasing in mu for xi0 > 0 (peaks at nu_floor) and below 1 for xi0 < 0.
    tail.bound = (xi0 > 0.0) ? tail.defect * tail.nu_floor / (tail.nu_floor - xi0) : tail.defect;
    return tail;
}

Field embed_entry(const Mesh& mesh, const DirichletSpectrum& spec, int index) {
    if (index < 0 || index >= static_cast<int>(spec.entries.size()))
        throw ValidationError("spectrum entry index out of range");
    Field field;
    field.v = Eigen::VectorXcd::Zero(mesh.num_dofs);
    field.support = {Region::R};
    const Eigen::VectorXd& phi = spec.entries[index].phi;
    for (int i = 0; i < static_cast<int>(spec.rod_dofs.size()); ++i)
        field.v[spec.rod_dofs[i]] = phi[i];
    return field;
}

// ---------------------------------------------------------------------------
// Spectrum cache.

static_assert(std::endian::native == std::endian::little,
              "spectrum cache assumes a little-endian host");

namespace {

constexpr char kSpecMagic[8] = {'M', 'B', 'S', 'P', 'E', 'C', '0', '1'};
constexpr std::uint8_t kSpecVersion = 1;

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

bool save_spectrum(const std::string& path, const Mesh& mesh, const DirichletSpectrum& spec) {
    File file;
    file.f = std::fopen(path.c_str(), "wb");
    if (!file.f) return false;
    std::FILE* f = file.f;
    std::fwrite(kSpecMagic, 1, 8, f);
    put(f, kSpecVersion);
    put(f, mesh.cell.hash());
    put(f, static_cast<std::int32_t>(mesh.n));
    put(f, mesh.h);
    put(f, static_cast<std::int32_t>(spec.entries.size()));
    put(f, spec.theta_R);
    put(f, spec.mean_threshold);
    put(f, static_cast<std::int32_t>(spec.rod_dofs.size()));
    for (std::int32_t d : spec.rod_dofs) put(f, d);
    bool ok = true;
    for (const DirichletEntry& e : spec.entries) {
        ok = ok && put(f, e.nu) && put(f, e.mean);
        if (e.phi.size() != static_cast<Eigen::Index>(spec.rod_dofs.size())) return false;
        ok = ok && std::fwrite(e.phi.data(), sizeof(double), e.phi.size(), f) ==
                       static_cast<std::size_t>(e.phi.size());
    }
    return ok;
}

std::optional<DirichletSpectrum> load_spectrum(const std::string& path, const Mesh& mesh,
                                               int count) {
    File file;
    file.f = std::fopen(path.c_str(), "rb");
    if (!file.f) return std::nullopt;
    std::FILE* f = file.f;

    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kSpecMagic, 8) != 0)
        return std::nullopt;
    std::uint8_t version = 0;
    if (!get(f, version) || version != kSpecVersion) return std::nullopt;
    std::uint64_t hash = 0;
    if (!get(f, hash) || hash != mesh.cell.hash()) return std::nullopt;
    std::int32_t n = 0;
    double h = 0.0;
    if (!get(f, n) || !get(f, h)) return std::nullopt;
    if (n != mesh.n || h != mesh.h) return std::nullopt;

    std::int32_t stored = 0;
    DirichletSpectrum spec;
    if (!get(f, stored) || stored != count) return std::nullopt;
    if (!get(f, spec.theta_R) || !get(f, spec.mean_threshold)) return std::nullopt;
    std::int32_t ndofs = 0;
    if (!get(f, ndofs) || ndofs < 0) return std::nullopt;
    spec.rod_dofs.resize(static_cast<std::size_t>(ndofs));
    for (std::int32_t& d : spec.rod_dofs)
        if (!get(f, d) || d < 0 || d >= mesh.num_dofs) return std::nullopt;

    spec.entries.resize(static_cast<std::size_t>(stored));
    for (DirichletEntry& e : spec.entries) {
        if (!get(f, e.nu) || !get(f, e.mean)) return std::nullopt;
        e.phi.resize(ndofs);
        if (std::fread(e.phi.data(), sizeof(double), e.phi.size(), f) !=
            static_cast<std::size_t>(e.phi.size()))
            return std::nullopt;
    }
    split_by_mean(spec);
    return spec;
}

} // namespace subwave
