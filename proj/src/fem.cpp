// SPDX-License-Identifier: Apache-2.0
#include "subwave/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>

#include "subwave/errors.hpp"

namespace subwave {

namespace {

// Gradients of the three linear shape functions on a triangle, and its area.
struct ElementGeom {
    Vec2 grad[3];
    double area;
};

ElementGeom element_geom(const Mesh& mesh, std::size_t t) {
    const Vec2& p0 = mesh.vertex[static_cast<std::size_t>(mesh.tri[t][0])];
    const Vec2& p1 = mesh.vertex[static_cast<std::size_t>(mesh.tri[t][1])];
    const Vec2& p2 = mesh.vertex[static_cast<std::size_t>(mesh.tri[t][2])];
    double twice = (p1 - p0).cross(p2 - p0);
    ElementGeom g;
    g.area = 0.5 * twice;
    g.grad[0] = (p2 - p1).perp() / twice;
    g.grad[1] = (p0 - p2).perp() / twice;
    g.grad[2] = (p1 - p0).perp() / twice;
    return g;
}

} // namespace

SpMat assemble_stiffness(const Mesh& mesh, const RegionCoeff& c) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.tri.size());
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        double coeff = c.of(mesh.tri_region[t]);
        if (coeff == 0.0) continue;
        ElementGeom g = element_geom(mesh, t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double val = coeff * g.area * g.grad[i].dot(g.grad[j]);
                trip.emplace_back(mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])],
                                  mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(j)])],
                                  val);
            }
    }
    SpMat A(mesh.num_dofs, mesh.num_dofs);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

SpMat assemble_mass(const Mesh& mesh, const RegionCoeff& c) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.tri.size());
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        double coeff = c.of(mesh.tri_region[t]);
        if (coeff == 0.0) continue;
        double a = coeff * mesh.tri_area(t) / 12.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])],
                                  mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(j)])],
                                  (i == j ? 2.0 : 1.0) * a);
    }
    SpMat M(mesh.num_dofs, mesh.num_dofs);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::MatrixX2d assemble_gradient_integral(const Mesh& mesh, const RegionCoeff& c) {
    Eigen::MatrixX2d G = Eigen::MatrixX2d::Zero(mesh.num_dofs, 2);
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        double coeff = c.of(mesh.tri_region[t]);
        if (coeff == 0.0) continue;
        ElementGeom g = element_geom(mesh, t);
        for (int i = 0; i < 3; ++i) {
            auto d = mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])];
            G(d, 0) += coeff * g.area * g.grad[i].x;
            G(d, 1) += coeff * g.area * g.grad[i].y;
        }
    }
    return G;
}

SpMat assemble_directional(const Mesh& mesh, const RegionCoeff& c, const Vec2& k) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.tri.size());
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        double coeff = c.of(mesh.tri_region[t]);
        if (coeff == 0.0) continue;
        ElementGeom g = element_geom(mesh, t);
        double third = g.area / 3.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                double val = coeff * third * k.dot(g.grad[i] - g.grad[j]);
                trip.emplace_back(mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])],
                                  mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(j)])],
                                  val);
            }
    }
    SpMat C(mesh.num_dofs, mesh.num_dofs);
    C.setFromTriplets(trip.begin(), trip.end());
    return C;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_dofs);
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        double a = mesh.tri_area(t) / 12.0;
        double fv[3];
        for (int i = 0; i < 3; ++i)
            fv[i] = f(mesh.vertex[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])]);
        for (int i = 0; i < 3; ++i) {
            double val = a * (2.0 * fv[i] + fv[(i + 1) % 3] + fv[(i + 2) % 3]);
            b[mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])]] += val;
        }
    }
    return b;
}

std::vector<std::int32_t> interior_dofs(const Mesh& mesh, Region r) {
    // A dof is interior to r when every triangle incident to any of its
    // vertex copies lies in r.
    std::vector<std::uint8_t> in_r(static_cast<std::size_t>(mesh.num_dofs), 1);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(mesh.num_dofs), 0);
    for (std::size_t t = 0; t < mesh.tri.size(); ++t)
        for (int i = 0; i < 3; ++i) {
            auto d = static_cast<std::size_t>(
                mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])]);
            seen[d] = 1;
            if (mesh.tri_region[t] != r) in_r[d] = 0;
        }
    std::vector<std::int32_t> out;
    for (std::int32_t d = 0; d < mesh.num_dofs; ++d)
        if (seen[static_cast<std::size_t>(d)] && in_r[static_cast<std::size_t>(d)])
            out.push_back(d);
    return out;
}

std::vector<std::int32_t> dofs_touching(const Mesh& mesh, std::initializer_list<Region> rs) {
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(mesh.num_dofs), 0);
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) {
        bool hit = false;
        for (Region r : rs)
            if (mesh.tri_region[t] == r) hit = true;
        if (!hit) continue;
        for (int i = 0; i < 3; ++i)
            mark[static_cast<std::size_t>(
                mesh.dof[static_cast<std::size_t>(mesh.tri[t][static_cast<std::size_t>(i)])])] = 1;
    }
    std::vector<std::int32_t> out;
    for (std::int32_t d = 0; d < mesh.num_dofs; ++d)
        if (mark[static_cast<std::size_t>(d)]) out.push_back(d);
    return out;
}

SpMat submatrix(const SpMat& A, const std::vector<std::int32_t>& idx) {
    std::vector<std::int32_t> inv(static_cast<std::size_t>(A.rows()), -1);
    for (std::size_t i = 0; i < idx.size(); ++i)
        inv[static_cast<std::size_t>(idx[i])] = static_cast<std::int32_t>(i);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            std::int32_t r = inv[static_cast<std::size_t>(it.row())];
            std::int32_t c = inv[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    SpMat S(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    S.setFromTriplets(trip.begin(), trip.end());
    return S;
}

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<std::int32_t>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
    return out;
}

Eigen::VectorXcd gather(const Eigen::VectorXcd& x, const std::vector<std::int32_t>& idx) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
    return out;
}

void scatter_add(Eigen::VectorXcd& x, const Eigen::VectorXcd& sub,
                 const std::vector<std::int32_t>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) x[idx[i]] += sub[static_cast<Eigen::Index>(i)];
}

struct BorderedSolver::Impl {
    Eigen::SparseLU<SpMat> lu;
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    double scale = 1.0;  // magnitude of A, used for relative defect reporting
};

BorderedSolver::BorderedSolver(const SpMat& A, const std::vector<Eigen::VectorXd>& constraints)
    : impl_(std::make_unique<Impl>()) {
    impl_->n = A.rows();
    impl_->m = static_cast<Eigen::Index>(constraints.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A.nonZeros()) + 2 * constraints.size() * static_cast<std::size_t>(A.rows()));
    double scale = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            trip.emplace_back(static_cast<std::int32_t>(it.row()), static_cast<std::int32_t>(it.col()), it.value());
            scale = std::max(scale, std::abs(it.value()));
        }
    impl_->scale = scale > 0.0 ? scale : 1.0;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        const Eigen::VectorXd& row = constraints[c];
        if (row.size() != impl_->n)
            throw SingularSystem("constraint row length does not match the operator");
        for (Eigen::Index i = 0; i < row.size(); ++i) {
            if (row[i] == 0.0) continue;
            trip.emplace_back(static_cast<std::int32_t>(impl_->n + static_cast<Eigen::Index>(c)),
                              static_cast<std::int32_t>(i), row[i]);
            trip.emplace_back(static_cast<std::int32_t>(i),
                              static_cast<std::int32_t>(impl_->n + static_cast<Eigen::Index>(c)), row[i]);
        }
    }
    SpMat K(impl_->n + impl_->m, impl_->n + impl_->m);
    K.setFromTriplets(trip.begin(), trip.end());
    impl_->lu.compute(K);
    if (impl_->lu.info() != Eigen::Success)
        throw SingularSystem("bordered factorization failed: operator rank-deficient beyond its constraints");
}

BorderedSolver::~BorderedSolver() = default;
BorderedSolver::BorderedSolver(BorderedSolver&&) noexcept = default;
BorderedSolver& BorderedSolver::operator=(BorderedSolver&&) noexcept = default;

Eigen::VectorXd BorderedSolver::solve(const Eigen::VectorXd& rhs, double* defect_out) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(impl_->n + impl_->m);
    full.head(impl_->n) = rhs;
    Eigen::VectorXd sol = impl_->lu.solve(full);
    if (defect_out) *defect_out = impl_->m > 0 ? sol.tail(impl_->m).cwiseAbs().maxCoeff() : 0.0;
    return sol.head(impl_->n);
}

Eigen::VectorXcd BorderedSolver::solve(const Eigen::VectorXcd& rhs, double* defect_out) const {
    double dr = 0.0, di = 0.0;
    Eigen::VectorXd xr = solve(Eigen::VectorXd(rhs.real()), &dr);
    Eigen::VectorXd xi = solve(Eigen::VectorXd(rhs.imag()), &di);
    if (defect_out) *defect_out = std::max(dr, di);
    return xr + std::complex<double>(0.0, 1.0) * xi;
}

Field solve_constrained(const SparseSystem& system) {
    BorderedSolver solver(system.A, system.constraints);
    double defect = 0.0;
    Eigen::VectorXcd x = solver.solve(system.rhs, &defect);
    double rhs_norm = system.rhs.norm();
    double ref = std::max(rhs_norm, 1e-300);
    // The multipliers vanish for a compatible right-hand side; a large value
    // means the rhs has a component against the constrained kernel.
    if (defect > 1e-8 * ref)
        throw SingularSystem("right-hand side incompatible with the operator kernel (defect " +
                             format_g17(defect) + " vs rhs norm " + format_g17(rhs_norm) + ")");
    for (const auto& c : system.constraints) {
        std::complex<double> ci = c.cast<std::complex<double>>().dot(x);
        if (std::abs(ci) > 1e-12 * std::max(1.0, x.norm()))
            throw SingularSystem("constraint violated after bordered solve");
    }
    // Operator residual: A x differs from rhs only by the (tiny) multiplier
    // term, so the defect bound already accounts for it.
    double rnorm = (system.A.cast<std::complex<double>>() * x - system.rhs).norm();
    double mult_term = 0.0;
    for (const auto& c : system.constraints) mult_term += defect * c.norm();
    if (rnorm > 1e-10 * ref + 2.0 * mult_term)
        throw SingularSystem("bordered solve residual exceeds contract");
    Field out;
    out.v = std::move(x);
    return out;
}

} // namespace subwave
