// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "subwave/mesh.hpp"

namespace subwave {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<std::complex<double>>;

/// Nodal field over the periodic dofs of a mesh. Real-valued fields carry a
/// zero imaginary part. `support` records which regions the values are
/// meaningful on (purely informational).
struct Field {
    Eigen::VectorXcd v;
    std::vector<Region> support;
};

/// Per-region coefficients for assembly; a zero coefficient excludes the
/// region. Coefficients may be negative (indefinite forms occur).
struct RegionCoeff {
    double H = 0.0;
    double P = 0.0;
    double R = 0.0;

    double of(Region r) const {
        switch (r) {
            case Region::H: return H;
            case Region::P: return P;
            case Region::R: return R;
            default: return 0.0;
        }
    }
    static RegionCoeff all(double c = 1.0) { return {c, c, c}; }
    static RegionCoeff only(Region r, double c = 1.0) {
        RegionCoeff rc;
        if (r == Region::H) rc.H = c;
        if (r == Region::P) rc.P = c;
        if (r == Region::R) rc.R = c;
        return rc;
    }
};

/// Symmetric sparse operator with optional affine constraint rows, solved as
/// a bordered (saddle-point) system. Constraints fix kernels exactly (e.g.
/// zero mean); the right-hand side may be complex.
struct SparseSystem {
    SpMat A;
    std::vector<Eigen::VectorXd> constraints;
    Eigen::VectorXcd rhs;
};

/// Piecewise-linear stiffness Sum_r c_r Int_r grad(u).grad(v). Symmetric;
/// row sums vanish on pure periodic assembly.
SpMat assemble_stiffness(const Mesh& mesh, const RegionCoeff& c);

/// Piecewise-linear mass Sum_r c_r Int_r u v. Total mass equals the weighted
/// region areas of the mesh.
SpMat assemble_mass(const Mesh& mesh, const RegionCoeff& c);

/// First-order directional form C_ij = Sum_r c_r Int_r k.(phi_j grad(phi_i)
/// - phi_i grad(phi_j)); real antisymmetric. Appears multiplied by i in the
/// Bloch-wave forms, making i*C Hermitian.
SpMat assemble_directional(const Mesh& mesh, const RegionCoeff& c, const Vec2& k);

/// Load vector b_i = Int_Y f(x) phi_i(x) dx with f sampled at quadrature
/// points (vertex-based, exact for piecewise-linear f).
Eigen::VectorXd assemble_load(const Mesh& mesh, const std::function<double(const Vec2&)>& f);

/// Region-weighted basis gradient integrals: row i = Sum_r c_r Int_r
/// grad(phi_i). Each region's rows sum to zero (gradient of a partition of
/// unity). Dotting rows with a direction gives the first-order moments used
/// for coupling weights.
Eigen::MatrixX2d assemble_gradient_integral(const Mesh& mesh, const RegionCoeff& c);

/// Dofs whose entire vertex star lies inside region r (strict interior,
/// excluding interface dofs).
std::vector<std::int32_t> interior_dofs(const Mesh& mesh, Region r);

/// Dofs incident to at least one triangle of any region in `rs`.
std::vector<std::int32_t> dofs_touching(const Mesh& mesh, std::initializer_list<Region> rs);

/// Extracts the principal submatrix A(idx, idx).
SpMat submatrix(const SpMat& A, const std::vector<std::int32_t>& idx);

/// Gathers full-length vector entries at `idx` / scatters them back.
Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<std::int32_t>& idx);
Eigen::VectorXcd gather(const Eigen::VectorXcd& x, const std::vector<std::int32_t>& idx);
void scatter_add(Eigen::VectorXcd& x, const Eigen::VectorXcd& sub,
                 const std::vector<std::int32_t>& idx);

/// Solves the bordered system [[A, C^T], [C, 0]] [x; m] = [rhs; 0]; the
/// multipliers m absorb nothing in a compatible system, so |m| measures the
/// compatibility defect and exceeding 1e-8 relative to |rhs| raises
/// SingularSystem. Residual contract: |A x + C^T m - rhs| <= 1e-10 |rhs|,
/// constraints satisfied to 1e-12.
Field solve_constrained(const SparseSystem& system);

/// One reusable factorization of a bordered operator for repeated solves.
class BorderedSolver {
public:
    BorderedSolver(const SpMat& A, const std::vector<Eigen::VectorXd>& constraints);
    ~BorderedSolver();
    BorderedSolver(BorderedSolver&&) noexcept;
    BorderedSolver& operator=(BorderedSolver&&) noexcept;

    /// Solves for one right-hand side; `defect_out` receives the largest
    /// constraint-multiplier magnitude if non-null (compatibility measure).
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double* defect_out = nullptr) const;
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs, double* defect_out = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct EigPair {
    double lambda = 0.0;
    Eigen::VectorXd phi;  // B-normalized
};

struct GevpOptions {
    double shift = 0.0;                                  // target location
    std::optional<std::pair<double, double>> window;     // keep only eigenvalues inside
    int max_subspace = 0;                                // 0 = automatic
};

/// k eigenpairs of A phi = lambda B phi nearest `opt.shift` (ascending), with
/// B-orthonormal eigenvectors and residuals |A phi - lambda B phi| <=
/// 1e-8 |B phi|. Dense solve for small systems, shift-invert Lanczos with
/// full reorthogonalization otherwise. Throws ConvergenceFailure if the
/// contract cannot be met (message carries the converged count).
std::vector<EigPair> solve_gevp(const SpMat& A, const SpMat& B, int k, const GevpOptions& opt);

} // namespace subwave
