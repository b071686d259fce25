// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subwave/fem.hpp"
#include "subwave/mesh.hpp"

namespace subwave {

/// One Dirichlet eigenpair of -Laplace on the rod R: eigenvalue nu, nodal
/// values phi on the rod-interior dofs (L2(R)-orthonormal), and the integral
/// mean = Int_R phi.
struct DirichletEntry {
    double nu = 0.0;
    Eigen::VectorXd phi;  // size = rod_dofs.size(); empty for the analytic backend
    double mean = 0.0;
};

/// Ascending Dirichlet spectrum of the rod R together with the split into
/// nonzero-mean modes (the ones that resonate in the effective permeability)
/// and zero-mean modes (which drop out of that sum but still enter field
/// expansions).
struct DirichletSpectrum {
    std::vector<DirichletEntry> entries;  // ascending by nu
    std::vector<int> nonzero_mean_index;  // |mean| >  mean_threshold
    std::vector<int> zero_mean_index;     // |mean| <= mean_threshold
    double theta_R = 0.0;                 // rod measure backing the Parseval bound
    double mean_threshold = 0.0;
    std::vector<std::int32_t> rod_dofs;   // dof ids carrying phi values (empty for analytic)

    /// theta_R minus the captured Parseval mass Sum mean^2 over the first
    /// `count` entries (all of them by default); floored at zero.
    double defect_after(int count) const;
    double parseval_defect() const { return defect_after(static_cast<int>(entries.size())); }
};

/// First `count` Dirichlet eigenpairs on the rod R of `mesh`. Means come from
/// mass-matrix quadrature; the split threshold is 1e-6 * sqrt(theta_R).
DirichletSpectrum compute_dirichlet(const Mesh& mesh, int count);

/// Closed-form spectrum of a disk of radius r via Bessel zeros:
/// nu = (j_{k,m}/r)^2, angular orders k >= 1 enter twice (cos/sin) with mean
/// exactly zero, and radial modes carry mean^2 = 4 pi r^2 / j_{0,m}^2.
DirichletSpectrum analytic_disk_spectrum(double radius, int count);

/// Smallest prefix count whose Parseval defect drops below `defect_tol`, or
/// entries.size() when no prefix reaches it (a tail completion downstream
/// absorbs the remainder).
int default_spectrum_count(const DirichletSpectrum& spec, double defect_tol = 1e-3);

struct MuTailBound {
    double bound = 0.0;     // bound on |Sum_{n>N} mu_n <phi_n>^2 / (mu_n - xi0)|
    double defect = 0.0;    // Parseval defect of the computed prefix
    double nu_floor = 0.0;  // lower estimate for the first neglected eigenvalue
};

/// Conservative bound on the permeability-sum tail neglected beyond the
/// computed spectrum, evaluated at loading xi0. The neglected eigenvalues all
/// sit above nu_N, where the monotone factor mu/(mu - xi0) peaks, so
/// bound = defect * nu_N / (nu_N - xi0) for xi0 in (0, nu_N) and
/// bound = defect for xi0 <= 0. Throws InsufficientSpectrum if xi0 >= nu_N.
MuTailBound mu_series_tail_bound(const DirichletSpectrum& spec, double xi0);

/// Embeds an entry's nodal values into a full-size field (zero off the rod
/// interior).
Field embed_entry(const Mesh& mesh, const DirichletSpectrum& spec, int index);

/// Spectrum cache. Layout (little-endian): magic "MBSPEC01", version byte,
/// geometry hash u64, grid count n i32, h f64, entry count i32, theta_R f64,
/// mean_threshold f64, rod dof count i32 + ids i32[], then per entry
/// nu f64, mean f64, phi f64[rod dof count]. Loading validates geometry hash,
/// h, and entry count and returns nullopt on any mismatch.
bool save_spectrum(const std::string& path, const Mesh& mesh, const DirichletSpectrum& spec);
std::optional<DirichletSpectrum> load_spectrum(const std::string& path, const Mesh& mesh,
                                               int count);

} // namespace subwave
