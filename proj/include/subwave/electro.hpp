// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subwave/fem.hpp"
#include "subwave/greens.hpp"
#include "subwave/mesh.hpp"

namespace subwave {

/// One interior electrostatic resonance of the two-rod cell: the eigenvalue
/// of the half-difference pencil over the rod-free region, its eigenfield
/// (normalized in the gradient inner product over Y minus R, zero-mean there,
/// zero on the R interior), and its directional coupling weights.
struct Resonance {
    double lambda = 0.0;  // strictly inside (-1/2, 1/2)
    Field psi;            // full-dof nodal values, real
    double alpha1 = 0.0;  // kappa . Int_H grad(psi)
    double alpha2 = 0.0;  // kappa . Int_P grad(psi)
    bool zero_weight = false;  // both weights below threshold
};

/// Multiplicities of the exact discrete +1/2 and -1/2 eigenvalue families
/// (hat functions clear of the P rod, respectively interior to it), the
/// separation gap used to classify them, and how close the kept interior
/// spectrum comes to the clusters.
struct ClusterDiagnostics {
    int dim_w1 = 0;        // +1/2 family: dofs clear of the closed P rod
    int dim_w2 = 0;        // -1/2 family: dofs interior to P
    int dim_interior = 0;  // strictly interior modes available (trace dofs - 1)
    double gap = 0.0;      // cluster half-width max(1e-3, 10 h^2)
    double max_abs_lambda = 0.0;  // largest |lambda| among interior modes
};

/// Interior resonance spectrum, most significant first: decreasing coupling
/// weight alpha1^2 + alpha2^2 for the stored direction, ties broken by
/// decreasing |lambda| (then toward the positive side). Weight-ranked
/// selection keeps every mode that feeds the effective-media sums inside any
/// reasonable k; ranking by |lambda| alone would let grid-scale trace
/// oscillations of the piecewise-linear pencil crowd them out.
struct ElectrostaticSpectrum {
    std::vector<Resonance> resonances;
    ClusterDiagnostics clusters;
    Vec2 kappa;
    double theta_H = 0.0;
    double theta_P = 0.0;
    double weight_threshold = 0.0;  // 1e-8 sqrt(theta_H + theta_P)
};

/// Directional cell-average of the projection onto gradients of potentials
/// vanishing on the P rod: value = Int_H kappa . grad(w) for the minimizer w,
/// with 0 <= value < theta_H.
struct W1Projection {
    Vec2 kappa;
    double value = 0.0;
    Field w;
};

/// Boundary-integral resonance spectrum: eigenvalues of the adjoint double
/// layer of the rod-corrected Green's function on mean-zero densities over
/// the P-rod boundary. `lambda` holds real parts sorted by decreasing
/// magnitude; `lambda_symmetrized` is the self-adjoint single-layer-weighted
/// variant of the same spectrum (computed as a cross-check, and promoted to
/// `lambda` when the plain solve shows imaginary parts above 1e-8).
struct NystromSpectrum {
    std::vector<double> lambda;
    double max_imag = 0.0;
    std::vector<double> lambda_symmetrized;
    bool used_symmetrized = false;
};

/// Computes the k most significant interior resonances of the pencil
/// (stiffness over H - stiffness over P)/2 = lambda (stiffness over Y minus R)
/// on the zero-mean periodic space, by exact reduction to the P-boundary
/// trace space (discrete harmonic extension on both sides), together with
/// coupling weights for direction `kappa`. The full interior pencil is solved
/// and every mode's weights are computed; the k returned are those with the
/// largest alpha1^2 + alpha2^2. Throws ValidationError if the cell has no
/// P rod or k < 1, InsufficientSpectrum if fewer than k interior modes exist,
/// ClusterAmbiguity if an interior eigenvalue encroaches on the +-1/2
/// clusters.
ElectrostaticSpectrum compute_resonances_fem(const Mesh& mesh, int k, const Vec2& kappa);

/// Solves the cell problem over potentials vanishing on the closed P rod
/// (free on the R boundary): Int_H grad(w).grad(v) = Int_H kappa.grad(v).
/// Without a P rod the space loses its essential boundary and the solve runs
/// on the zero-mean periodic space instead (value 0 for a rod-free cell).
W1Projection compute_w1_projection(const Mesh& mesh, const Vec2& kappa);

/// Computes the resonance spectrum by the boundary-integral route: Nystrom
/// discretization of the adjoint double layer on n P-boundary nodes with the
/// rod-corrected Green's function kernel, restricted to mean-zero densities.
/// Throws ValidationError for non-disk P, missing P, or n < 16 / odd n.
NystromSpectrum compute_resonances_nystrom(const CellGeometry& cell,
                                           const PeriodicGreens& greens, int n);

/// Spectrum caches ("MBELEC01", little-endian), keyed by geometry hash plus
/// the discretization (grid count and h for the variational backend; node
/// count and Green's-function truncation for the boundary-integral backend).
/// Loading validates the key and the stored mode count / direction and
/// returns nullopt on any mismatch.
bool save_electro(const std::string& path, const Mesh& mesh, const ElectrostaticSpectrum& spec);
std::optional<ElectrostaticSpectrum> load_electro(const std::string& path, const Mesh& mesh,
                                                  int k, const Vec2& kappa);
bool save_nystrom(const std::string& path, const CellGeometry& cell, int truncation, int n,
                  const NystromSpectrum& spec);
std::optional<NystromSpectrum> load_nystrom(const std::string& path, const CellGeometry& cell,
                                            int truncation, int n);

} // namespace subwave
