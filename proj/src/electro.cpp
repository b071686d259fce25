// SPDX-License-Identifier: Apache-2.0
#include "subwave/electro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "subwave/errors.hpp"
#include "subwave/geometry.hpp"

namespace subwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dof partition around the P rod: trace dofs on its boundary layer, interiors
// of both rods, the rest of the rod-free region, and the union of everything
// except the R interior.
struct Partition {
    std::vector<std::int32_t> hside;
    std::vector<std::int32_t> gamma;
    std::vector<std::int32_t> pint;
    std::vector<std::int32_t> rint;
    std::vector<std::int32_t> ynr;
};

Partition partition_dofs(const Mesh& mesh) {
    Partition s;
    s.pint = interior_dofs(mesh, Region::P);
    s.rint = interior_dofs(mesh, Region::R);
    std::vector<std::int32_t> pbar = dofs_touching(mesh, {Region::P});
    std::vector<char> mark(static_cast<std::size_t>(mesh.num_dofs), 0);
    for (std::int32_t d : s.pint) mark[static_cast<std::size_t>(d)] = 1;
    for (std::int32_t d : pbar) {
        if (!mark[static_cast<std::size_t>(d)]) s.gamma.push_back(d);
        mark[static_cast<std::size_t>(d)] = 1;
    }
    for (std::int32_t d : s.rint) mark[static_cast<std::size_t>(d)] = 2;
    for (std::int32_t d = 0; d < mesh.num_dofs; ++d)
        if (mark[static_cast<std::size_t>(d)] == 0) s.hside.push_back(d);
    for (std::int32_t d = 0; d < mesh.num_dofs; ++d)
        if (mark[static_cast<std::size_t>(d)] != 2) s.ynr.push_back(d);
    return s;
}

// Rectangular coupling block K(rows, cols) of a sparse symmetric matrix.
Eigen::MatrixXd coupling_block(const SpMat& K, const std::vector<std::int32_t>& rows,
                               const std::vector<std::int32_t>& cols) {
    std::vector<std::int64_t> pos(static_cast<std::size_t>(K.rows()), -1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        pos[static_cast<std::size_t>(rows[i])] = static_cast<std::int64_t>(i);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<long>(rows.size()),
                                              static_cast<long>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (SpMat::InnerIterator it(K, cols[j]); it; ++it) {
            std::int64_t r = pos[static_cast<std::size_t>(it.row())];
            if (r >= 0) B(r, static_cast<long>(j)) = it.value();
        }
    return B;
}

// Condensation of one side's stiffness onto the trace dofs. The inner block
// is grounded on the trace, so it is positive definite whenever the side
// region is nonempty; `ext` maps trace values to the energy-minimal interior
// extension, and `schur` carries the full energy of that extension.
struct SideReduction {
    Eigen::MatrixXd schur;
    Eigen::MatrixXd ext;
};

SideReduction reduce_side(const SpMat& K, const std::vector<std::int32_t>& inner,
                          const std::vector<std::int32_t>& trace) {
    SideReduction out;
    Eigen::MatrixXd Ktt = Eigen::MatrixXd(submatrix(K, trace));
    if (inner.empty()) {
        out.schur = Ktt;
        out.ext = Eigen::MatrixXd(0, static_cast<long>(trace.size()));
        return out;
    }
    SpMat Kii = submatrix(K, inner);
    Eigen::MatrixXd Kit = coupling_block(K, inner, trace);
    Eigen::SimplicialLDLT<SpMat> ldlt(Kii);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("side condensation: grounded interior block is not factorizable");
    out.ext = -ldlt.solve(Kit);
    out.schur = Ktt + Kit.transpose() * out.ext;
    out.schur = 0.5 * (out.schur + out.schur.transpose()).eval();
    return out;
}

Vec2 unit_direction(const Vec2& kappa) {
    double n = kappa.norm();
    if (!(n > 0.0)) throw ValidationError("direction vector must be nonzero");
    return kappa / n;
}

// Strongest-first ordering: decreasing magnitude, ties toward the positive
// side.
bool stronger(double a, double b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return a > b;
}

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

constexpr char kElecMagic[8] = {'M', 'B', 'E', 'L', 'E', 'C', '0', '1'};
constexpr std::uint8_t kElecVersion = 1;
constexpr std::uint8_t kTagFem = 0;
constexpr std::uint8_t kTagNystrom = 1;

}  // namespace

ElectrostaticSpectrum compute_resonances_fem(const Mesh& mesh, int k, const Vec2& kappa) {
    if (!mesh.cell.has_P)
        throw ValidationError("electrostatic resonances need a plasmonic rod in the cell");
    if (k < 1) throw ValidationError("resonance count must be at least 1");
    Vec2 khat = unit_direction(kappa);

    Partition s = partition_dofs(mesh);
    const int n_gamma = static_cast<int>(s.gamma.size());
    const int n_interior = n_gamma - 1;
    if (k > n_interior)
        throw InsufficientSpectrum("requested " + std::to_string(k) +
                                   " interior resonances but the trace space carries only " +
                                   std::to_string(n_interior) + "; refine the mesh");

    SpMat KH = assemble_stiffness(mesh, RegionCoeff::only(Region::H));
    SpMat KP = assemble_stiffness(mesh, RegionCoeff::only(Region::P));

    // Both half-spaces condensed onto the shared trace. The eigenvalue pencil
    // (S_H - S_P)/2 = lambda (S_H + S_P) reproduces the full-space pencil's
    // interior spectrum exactly: the +-1/2 families are the energy-minimal
    // one-sided extensions and never mix with the trace modes.
    SideReduction hred = reduce_side(KH, s.hside, s.gamma);
    SideReduction pred = reduce_side(KP, s.pint, s.gamma);

    // Deflate the shared constant trace.
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n_gamma, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    Eigen::MatrixXd Z = Eigen::MatrixXd(qr.householderQ()).rightCols(n_interior);

    Eigen::MatrixXd Ar = Z.transpose() * (0.5 * (hred.schur - pred.schur)) * Z;
    Eigen::MatrixXd Br = Z.transpose() * (hred.schur + pred.schur) * Z;
    Ar = 0.5 * (Ar + Ar.transpose()).eval();
    Br = 0.5 * (Br + Br.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar, Br);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("trace pencil eigensolve did not converge");

    ElectrostaticSpectrum spec;
    spec.kappa = khat;
    spec.theta_H = mesh.region_area(Region::H);
    spec.theta_P = mesh.region_area(Region::P);
    spec.weight_threshold = 1e-8 * std::sqrt(spec.theta_H + spec.theta_P);
    spec.clusters.dim_w1 = static_cast<int>(s.hside.size());
    spec.clusters.dim_w2 = static_cast<int>(s.pint.size());
    spec.clusters.dim_interior = n_interior;
    spec.clusters.gap = std::max(1e-3, 10.0 * mesh.h * mesh.h);
    spec.clusters.max_abs_lambda = es.eigenvalues().cwiseAbs().maxCoeff();
    if (spec.clusters.max_abs_lambda >= 0.5 - spec.clusters.gap)
        throw ClusterAmbiguity(
            "an interior resonance reaches the +-1/2 clusters: |lambda| = " +
            std::to_string(spec.clusters.max_abs_lambda) + " with gap " +
            std::to_string(spec.clusters.gap) + "; refine the mesh");

    // Gauge and weight machinery shared by all modes.
    SpMat Mhp = assemble_mass(mesh, {1.0, 1.0, 0.0});
    Eigen::VectorXd hat_mass = Mhp * Eigen::VectorXd::Ones(mesh.num_dofs);
    const double area_ynr = spec.theta_H + spec.theta_P;
    Eigen::MatrixX2d GH = assemble_gradient_integral(mesh, RegionCoeff::only(Region::H));
    Eigen::MatrixX2d GP = assemble_gradient_integral(mesh, RegionCoeff::only(Region::P));

    // Coupling weights for every interior mode, directly from the traces: a
    // region's gradient integral of a condensed mode is the gradient-integral
    // vector pulled back through the discrete harmonic extension. The gauge
    // shift never enters because region gradient integrals of constants
    // vanish identically.
    Eigen::VectorXd wH = khat.x * GH.col(0) + khat.y * GH.col(1);
    Eigen::VectorXd wP = khat.x * GP.col(0) + khat.y * GP.col(1);
    Eigen::VectorXd pullH = gather(wH, s.gamma) + hred.ext.transpose() * gather(wH, s.hside);
    Eigen::VectorXd pullP = gather(wP, s.gamma) + pred.ext.transpose() * gather(wP, s.pint);
    Eigen::MatrixXd Gall = Z * es.eigenvectors();
    Eigen::VectorXd a1_all = Gall.transpose() * pullH;
    Eigen::VectorXd a2_all = Gall.transpose() * pullP;

    // The k reported resonances are the most significant ones: strongest
    // coupling to the requested direction first, eigenvalue strength as the
    // tie-break. Magnitude alone is not a usable ranking on a piecewise-linear
    // mesh: the two-sided pencil carries a plateau of grid-scale trace
    // oscillations whose eigenvalues can dominate the physical modes while
    // their coupling weights stay orders of magnitude below.
    std::vector<int> order(static_cast<std::size_t>(n_interior));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        double sa = a1_all(a) * a1_all(a) + a2_all(a) * a2_all(a);
        double sb = a1_all(b) * a1_all(b) + a2_all(b) * a2_all(b);
        if (sa != sb) return sa > sb;
        return stronger(es.eigenvalues()(a), es.eigenvalues()(b));
    });

    spec.resonances.reserve(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) {
        int idx = order[static_cast<std::size_t>(m)];
        Eigen::VectorXd g = Gall.col(idx);

        Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.num_dofs);
        for (int i = 0; i < n_gamma; ++i) u(s.gamma[static_cast<std::size_t>(i)]) = g(i);
        if (!s.hside.empty()) {
            Eigen::VectorXd uh = hred.ext * g;
            for (std::size_t i = 0; i < s.hside.size(); ++i)
                u(s.hside[i]) = uh(static_cast<long>(i));
        }
        if (!s.pint.empty()) {
            Eigen::VectorXd up = pred.ext * g;
            for (std::size_t i = 0; i < s.pint.size(); ++i)
                u(s.pint[i]) = up(static_cast<long>(i));
        }
        double mean = hat_mass.dot(u) / area_ynr;
        for (std::int32_t d : s.ynr) u(d) -= mean;

        Resonance r;
        r.lambda = es.eigenvalues()(idx);
        r.alpha1 = a1_all(idx);
        r.alpha2 = a2_all(idx);

        // Deterministic sign: positive total weight when resolved, then the
        // H-side weight, then the largest trace value.
        double sgn = r.alpha1 + r.alpha2;
        if (std::abs(sgn) <= spec.weight_threshold) {
            if (std::abs(r.alpha1) > spec.weight_threshold) {
                sgn = r.alpha1;
            } else {
                Eigen::Index at = 0;
                g.cwiseAbs().maxCoeff(&at);
                sgn = g(at);
            }
        }
        if (sgn < 0.0) {
            u = -u;
            r.alpha1 = -r.alpha1;
            r.alpha2 = -r.alpha2;
        }
        r.zero_weight = std::abs(r.alpha1) < spec.weight_threshold &&
                        std::abs(r.alpha2) < spec.weight_threshold;
        r.psi.v = u.cast<std::complex<double>>();
        r.psi.support = {Region::H, Region::P};
        spec.resonances.push_back(std::move(r));
    }
    return spec;
}

W1Projection compute_w1_projection(const Mesh& mesh, const Vec2& kappa) {
    Vec2 khat = unit_direction(kappa);
    SpMat KH = assemble_stiffness(mesh, RegionCoeff::only(Region::H));
    Eigen::MatrixX2d GH = assemble_gradient_integral(mesh, RegionCoeff::only(Region::H));
    Eigen::VectorXd rhs = khat.x * GH.col(0) + khat.y * GH.col(1);

    W1Projection out;
    out.kappa = khat;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.num_dofs);
    Partition s = partition_dofs(mesh);
    if (mesh.cell.has_P) {
        // Grounded on the closed P rod; the R boundary stays free.
        SpMat Khh = submatrix(KH, s.hside);
        Eigen::VectorXd rh = gather(rhs, s.hside);
        Eigen::SimplicialLDLT<SpMat> ldlt(Khh);
        if (ldlt.info() != Eigen::Success)
            throw SingularSystem("rod-grounded host stiffness is not factorizable");
        Eigen::VectorXd wh = ldlt.solve(rh);
        out.value = rh.dot(wh);
        for (std::size_t i = 0; i < s.hside.size(); ++i) u(s.hside[i]) = wh(static_cast<long>(i));
    } else {
        // No essential boundary: minimize over the zero-mean periodic space.
        SpMat Kyy = submatrix(KH, s.ynr);
        Eigen::VectorXd ry = gather(rhs, s.ynr);
        BorderedSolver solver(Kyy, {Eigen::VectorXd::Ones(static_cast<long>(s.ynr.size()))});
        Eigen::VectorXd wy = solver.solve(ry);
        out.value = ry.dot(wy);
        for (std::size_t i = 0; i < s.ynr.size(); ++i) u(s.ynr[i]) = wy(static_cast<long>(i));
    }
    out.w.v = u.cast<std::complex<double>>();
    out.w.support = {Region::H};
    return out;
}

NystromSpectrum compute_resonances_nystrom(const CellGeometry& cell,
                                           const PeriodicGreens& greens, int n) {
    if (!cell.has_P)
        throw ValidationError("boundary-integral resonances need a plasmonic rod in the cell");
    if (cell.shape_P.kind != ShapeKind::Disk)
        throw ValidationError("the boundary-integral backend handles disk rods only");
    if (n < 16 || n % 2 != 0)
        throw ValidationError("boundary node count must be even and at least 16");
    if (cell.has_R != greens.has_corrector())
        throw ValidationError("Green's function was built for a different cell");
    const double rho = cell.shape_P.radius;
    if (!(rho < 0.25))
        throw ValidationError("disk radius must stay below a quarter period");

    BoundaryQuadrature q = boundary_quadrature(cell.shape_P, n);
    const int half = n / 2;
    const bool corrected = greens.has_corrector();

    // Rod-corrector influence on the P boundary: per column j the density
    // greens.corrector(x_j) radiates from the R boundary nodes; TG and TV
    // hold the normal-derivative and value influence of each R node.
    Eigen::MatrixXd corr_grad;   // n x n: n_i . grad phi*_{x_j}(x_i)
    Eigen::MatrixXd corr_value;  // n x n: phi*_{x_j}(x_i)
    if (corrected) {
        const BoundaryQuadrature& rq = greens.rod_nodes();
        const int nr = static_cast<int>(rq.nodes.size());
        Eigen::MatrixXd TG(n, nr), TV(n, nr);
        for (int i = 0; i < n; ++i)
            for (int kk = 0; kk < nr; ++kk) {
                Vec2 d = q.nodes[static_cast<std::size_t>(i)] - rq.nodes[static_cast<std::size_t>(kk)];
                double w = rq.weights[static_cast<std::size_t>(kk)];
                TG(i, kk) = q.normals[static_cast<std::size_t>(i)].dot(torus_greens_grad(d)) * w;
                TV(i, kk) = torus_greens(d) * w;
            }
        Eigen::MatrixXd sig(nr, n);
        Eigen::VectorXd cons(n);
        for (int j = 0; j < n; ++j) {
            PeriodicGreens::Corrector c = greens.corrector(q.nodes[static_cast<std::size_t>(j)]);
            sig.col(j) = c.sigma;
            cons(j) = c.c;
        }
        corr_grad = TG * sig;
        corr_value = TV * sig;
        corr_value.rowwise() += cons.transpose();
    }

    // Adjoint double layer on density values. The free-space part of the
    // normal derivative is exactly 1/(4 pi rho) between any two points of the
    // circle (diagonal included); the lattice remainder is smooth.
    Eigen::MatrixXd A(n, n);
    const double free_part = 1.0 / (4.0 * kPi * rho);
    for (int i = 0; i < n; ++i) {
        Vec2 ni = q.normals[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            Vec2 d = q.nodes[static_cast<std::size_t>(i)] - q.nodes[static_cast<std::size_t>(j)];
            double val = free_part + ni.dot(torus_greens_regular_grad(d));
            if (corrected) val += corr_grad(i, j);
            A(i, j) = val * q.weights[static_cast<std::size_t>(j)];
        }
    }

    // Admissible densities carry zero total charge; with equal node weights
    // that is the orthogonal complement of the constant vector.
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    Eigen::MatrixXd V = Eigen::MatrixXd(qr.householderQ()).rightCols(n - 1);
    Eigen::MatrixXd Ar = V.transpose() * A * V;

    NystromSpectrum out;
    Eigen::EigenSolver<Eigen::MatrixXd> plain(Ar);
    if (plain.info() != Eigen::Success)
        throw ConvergenceFailure("boundary-integral eigensolve did not converge");
    out.lambda.resize(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n - 1; ++i) {
        out.lambda[static_cast<std::size_t>(i)] = plain.eigenvalues()(i).real();
        out.max_imag = std::max(out.max_imag, std::abs(plain.eigenvalues()(i).imag()));
    }
    std::sort(out.lambda.begin(), out.lambda.end(), stronger);

    // Self-adjoint cross-check: weighting by the single layer of the same
    // Green's function symmetrizes the operator. Kress log-splitting handles
    // the diagonal; the smooth part carries the lattice and corrector terms.
    Eigen::MatrixXd S(n, n);
    const double log_rho = std::log(rho) / (2.0 * kPi);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dt = 2.0 * kPi * static_cast<double>(i - j) / n;
            Vec2 d = q.nodes[static_cast<std::size_t>(i)] - q.nodes[static_cast<std::size_t>(j)];
            double smooth = log_rho + (i == j ? torus_greens_regular0() : torus_greens_regular(d));
            if (corrected) smooth += corr_value(i, j);
            S(i, j) = (log_kernel_weight(half, dt) / (4.0 * kPi) + (kPi / half) * smooth) * rho;
        }
    // The single layer is negative definite on zero-charge densities (the
    // energy identity sigma^T S sigma = -integral |grad u|^2), so the definite
    // factor in the generalized solve is -S; flipping both sides keeps the
    // eigenvalues unchanged.
    Eigen::MatrixXd Sr = -(V.transpose() * S * V);
    Sr = 0.5 * (Sr + Sr.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(Sr);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd SA = -(V.transpose() * S * A * V);
        SA = 0.5 * (SA + SA.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> sym(SA, Sr);
        if (sym.info() == Eigen::Success) {
            out.lambda_symmetrized.resize(static_cast<std::size_t>(n - 1));
            for (int i = 0; i < n - 1; ++i)
                out.lambda_symmetrized[static_cast<std::size_t>(i)] = sym.eigenvalues()(i);
            std::sort(out.lambda_symmetrized.begin(), out.lambda_symmetrized.end(), stronger);
        }
    }

    if (out.max_imag >= 1e-8) {
        if (out.lambda_symmetrized.empty())
            throw ConvergenceFailure(
                "boundary-integral spectrum is complex and the symmetrized weight is not "
                "positive definite");
        out.lambda = out.lambda_symmetrized;
        out.used_symmetrized = true;
    }
    return out;
}

bool save_electro(const std::string& path, const Mesh& mesh, const ElectrostaticSpectrum& spec) {
    File file;
    file.f = std::fopen(path.c_str(), "wb");
    if (!file.f) return false;
    std::FILE* f = file.f;
    std::fwrite(kElecMagic, 1, 8, f);
    put(f, kElecVersion);
    put(f, kTagFem);
    put(f, mesh.cell.hash());
    put(f, static_cast<std::int32_t>(mesh.n));
    put(f, mesh.h);
    put(f, mesh.num_dofs);
    put(f, static_cast<std::int32_t>(spec.resonances.size()));
    put(f, spec.kappa.x);
    put(f, spec.kappa.y);
    put(f, spec.theta_H);
    put(f, spec.theta_P);
    put(f, spec.weight_threshold);
    put(f, static_cast<std::int32_t>(spec.clusters.dim_w1));
    put(f, static_cast<std::int32_t>(spec.clusters.dim_w2));
    put(f, static_cast<std::int32_t>(spec.clusters.dim_interior));
    put(f, spec.clusters.gap);
    put(f, spec.clusters.max_abs_lambda);
    bool ok = true;
    Eigen::VectorXd vals(mesh.num_dofs);
    for (const Resonance& r : spec.resonances) {
        ok = ok && put(f, r.lambda) && put(f, r.alpha1) && put(f, r.alpha2) &&
             put(f, static_cast<std::uint8_t>(r.zero_weight ? 1 : 0));
        if (r.psi.v.size() != mesh.num_dofs) return false;
        vals = r.psi.v.real();
        ok = ok && std::fwrite(vals.data(), sizeof(double), vals.size(), f) ==
                       static_cast<std::size_t>(vals.size());
    }
    return ok;
}

std::optional<ElectrostaticSpectrum> load_electro(const std::string& path, const Mesh& mesh,
                                                  int k, const Vec2& kappa) {
    Vec2 khat = unit_direction(kappa);
    File file;
    file.f = std::fopen(path.c_str(), "rb");
    if (!file.f) return std::nullopt;
    std::FILE* f = file.f;

    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kElecMagic, 8) != 0)
        return std::nullopt;
    std::uint8_t version = 0, tag = 0;
    if (!get(f, version) || version != kElecVersion) return std::nullopt;
    if (!get(f, tag) || tag != kTagFem) return std::nullopt;
    std::uint64_t hash = 0;
    if (!get(f, hash) || hash != mesh.cell.hash()) return std::nullopt;
    std::int32_t n = 0, ndofs = 0, stored = 0;
    double h = 0.0;
    if (!get(f, n) || !get(f, h) || !get(f, ndofs)) return std::nullopt;
    if (n != mesh.n || h != mesh.h || ndofs != mesh.num_dofs) return std::nullopt;
    if (!get(f, stored) || stored != k) return std::nullopt;

    ElectrostaticSpectrum spec;
    if (!get(f, spec.kappa.x) || !get(f, spec.kappa.y)) return std::nullopt;
    if (spec.kappa.x != khat.x || spec.kappa.y != khat.y) return std::nullopt;
    if (!get(f, spec.theta_H) || !get(f, spec.theta_P) || !get(f, spec.weight_threshold))
        return std::nullopt;
    if (!get(f, spec.clusters.dim_w1) || !get(f, spec.clusters.dim_w2) ||
        !get(f, spec.clusters.dim_interior) || !get(f, spec.clusters.gap) ||
        !get(f, spec.clusters.max_abs_lambda))
        return std::nullopt;

    spec.resonances.resize(static_cast<std::size_t>(stored));
    Eigen::VectorXd vals(mesh.num_dofs);
    for (Resonance& r : spec.resonances) {
        std::uint8_t zw = 0;
        if (!get(f, r.lambda) || !get(f, r.alpha1) || !get(f, r.alpha2) || !get(f, zw))
            return std::nullopt;
        r.zero_weight = zw != 0;
        if (std::fread(vals.data(), sizeof(double), vals.size(), f) !=
            static_cast<std::size_t>(vals.size()))
            return std::nullopt;
        r.psi.v = vals.cast<std::complex<double>>();
        r.psi.support = {Region::H, Region::P};
    }
    return spec;
}

bool save_nystrom(const std::string& path, const CellGeometry& cell, int truncation, int n,
                  const NystromSpectrum& spec) {
    File file;
    file.f = std::fopen(path.c_str(), "wb");
    if (!file.f) return false;
    std::FILE* f = file.f;
    std::fwrite(kElecMagic, 1, 8, f);
    put(f, kElecVersion);
    put(f, kTagNystrom);
    put(f, cell.hash());
    put(f, static_cast<std::int32_t>(truncation));
    put(f, static_cast<std::int32_t>(n));
    put(f, spec.max_imag);
    put(f, static_cast<std::uint8_t>(spec.used_symmetrized ? 1 : 0));
    put(f, static_cast<std::int32_t>(spec.lambda.size()));
    bool ok = std::fwrite(spec.lambda.data(), sizeof(double), spec.lambda.size(), f) ==
              spec.lambda.size();
    put(f, static_cast<std::int32_t>(spec.lambda_symmetrized.size()));
    ok = ok && std::fwrite(spec.lambda_symmetrized.data(), sizeof(double),
                           spec.lambda_symmetrized.size(), f) == spec.lambda_symmetrized.size();
    return ok;
}

std::optional<NystromSpectrum> load_nystrom(const std::string& path, const CellGeometry& cell,
                                            int truncation, int n) {
    File file;
    file.f = std::fopen(path.c_str(), "rb");
    if (!file.f) return std::nullopt;
    std::FILE* f = file.f;

    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kElecMagic, 8) != 0)
        return std::nullopt;
    std::uint8_t version = 0, tag = 0;
    if (!get(f, version) || version != kElecVersion) return std::nullopt;
    if (!get(f, tag) || tag != kTagNystrom) return std::nullopt;
    std::uint64_t hash = 0;
    if (!get(f, hash) || hash != cell.hash()) return std::nullopt;
    std::int32_t t = 0, nodes = 0;
    if (!get(f, t) || t != truncation) return std::nullopt;
    if (!get(f, nodes) || nodes != n) return std::nullopt;

    NystromSpectrum spec;
    std::uint8_t used = 0;
    if (!get(f, spec.max_imag) || !get(f, used)) return std::nullopt;
    spec.used_symmetrized = used != 0;
    std::int32_t count = 0;
    if (!get(f, count) || count < 0) return std::nullopt;
    spec.lambda.resize(static_cast<std::size_t>(count));
    if (std::fread(spec.lambda.data(), sizeof(double), spec.lambda.size(), f) !=
        spec.lambda.size())
        return std::nullopt;
    if (!get(f, count) || count < 0) return std::nullopt;
    spec.lambda_symmetrized.resize(static_cast<std::size_t>(count));
    if (std::fread(spec.lambda_symmetrized.data(), sizeof(double),
                   spec.lambda_symmetrized.size(), f) != spec.lambda_symmetrized.size())
        return std::nullopt;
    return spec;
}

} // namespace subwave
