// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "subwave/errors.hpp"
#include "subwave/fem.hpp"
#include "subwave/mesh.hpp"

using namespace subwave;

namespace {

CellGeometry reference_cell() {
    return build_cell(ShapeSpec::disk({0.25, 0.5}, 0.15), ShapeSpec::disk({0.7, 0.5}, 0.2));
}

Eigen::VectorXd nodal(const Mesh& mesh, const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd u(mesh.num_dofs);
    for (std::size_t v = 0; v < mesh.vertex.size(); ++v)
        u[mesh.dof[v]] = f(mesh.vertex[v]);
    return u;
}

} // namespace

TEST_CASE("background lattice on the empty cell") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 16);
    // The requested spacing is an upper bound; the column pitch lands on 1/18
    // and the row count follows the near-equilateral aspect.
    CHECK(mesh.n == 18);
    CHECK(mesh.h == doctest::Approx(1.0 / 18).epsilon(1e-15));
    CHECK(mesh.h <= 1.0 / 16);
    CHECK(mesh.num_dofs == 18 * 20);
    CHECK(mesh.tri.size() == 2 * 18 * 20);
    double area = 0.0;
    for (std::size_t t = 0; t < mesh.tri.size(); ++t) area += mesh.tri_area(t);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mesh.min_angle_deg() > 50.0);  // near-equilateral triangles
    CHECK(mesh.min_angle_deg() < 60.0 + 1e-9);
    CHECK(mesh.region_area(Region::H) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mesh spacing precondition") {
    CHECK_THROWS_AS(generate_mesh(empty_cell(), 0.4), ValidationError);
    CHECK_THROWS_AS(generate_mesh(empty_cell(), 0.0), ValidationError);
    CHECK_THROWS_AS(generate_mesh(empty_cell(), -0.1), ValidationError);
}

TEST_CASE("rod clearance preconditions") {
    // Rod 0.04 from the wall needs a pitch below 0.02.
    CellGeometry tight = one_rod_cell(ShapeSpec::disk({0.2, 0.5}, 0.16), Region::R);
    CHECK_THROWS_AS(generate_mesh(tight, 1.0 / 16), MeshFailure);
    // Rods 0.1 apart need a pitch below 0.05.
    CellGeometry close = build_cell(ShapeSpec::disk({0.3, 0.5}, 0.15), ShapeSpec::disk({0.7, 0.5}, 0.15));
    CHECK_THROWS_AS(generate_mesh(close, 1.0 / 8), MeshFailure);
}

TEST_CASE("discrete disk area converges at second order") {
    CellGeometry cell = one_rod_cell(ShapeSpec::disk({0.5, 0.5}, 0.2), Region::R);
    double exact = std::numbers::pi * 0.04;
    Mesh coarse = generate_mesh(cell, 1.0 / 32);
    Mesh fine = generate_mesh(cell, 1.0 / 64);
    double e32 = std::abs(coarse.region_area(Region::R) - exact);
    double e64 = std::abs(fine.region_area(Region::R) - exact);
    CHECK(e32 < 2e-3);
    CHECK(e64 < 6e-4);
    CHECK(e32 / e64 > 2.5);  // observed order about 2
    CHECK(coarse.region_area(Region::H) + coarse.region_area(Region::R) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-rod mesh conforms to both boundaries") {
    Mesh mesh = generate_mesh(reference_cell(), 1.0 / 64);
    CHECK(mesh.min_angle_deg() >= 15.0);
    CHECK(mesh.max_boundary_edge_length() <= mesh.h * (1.0 + 1e-9));

    CHECK(mesh.region_area(Region::P) == doctest::Approx(std::numbers::pi * 0.0225).epsilon(2e-3));
    CHECK(mesh.region_area(Region::R) == doctest::Approx(std::numbers::pi * 0.04).epsilon(2e-3));
    double total = mesh.region_area(Region::H) + mesh.region_area(Region::P) + mesh.region_area(Region::R);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    // The boundary chord loops close and approximate the rod perimeters.
    for (auto [edges, shape] : {std::pair{&mesh.edges_P, &mesh.cell.shape_P},
                                std::pair{&mesh.edges_R, &mesh.cell.shape_R}}) {
        REQUIRE(!edges->empty());
        double per = 0.0;
        std::map<std::int32_t, int> out_deg, in_deg;
        for (const auto& e : *edges) {
            per += (mesh.vertex[static_cast<std::size_t>(e[0])] -
                    mesh.vertex[static_cast<std::size_t>(e[1])]).norm();
            out_deg[e[0]]++;
            in_deg[e[1]]++;
        }
        CHECK(per == doctest::Approx(shape->perimeter()).epsilon(5e-3));
        CHECK(per < shape->perimeter());  // inscribed polygon
        for (const auto& [v, d] : out_deg) {
            CHECK(d == 1);
            CHECK(in_deg[v] == 1);
        }
    }
}

TEST_CASE("mesh cache round trip") {
    CellGeometry cell = reference_cell();
    Mesh mesh = generate_mesh(cell, 1.0 / 32);
    std::string path = "mesh_cache_test.bin";
    save_mesh(mesh, path);
    auto loaded = load_mesh(path, cell, 1.0 / 32);
    REQUIRE(loaded.has_value());
    CHECK(loaded->num_dofs == mesh.num_dofs);
    CHECK(loaded->tri.size() == mesh.tri.size());
    CHECK(loaded->vertex.size() == mesh.vertex.size());
    bool same = true;
    for (std::size_t v = 0; v < mesh.vertex.size(); ++v)
        same = same && mesh.vertex[v].x == loaded->vertex[v].x &&
               mesh.vertex[v].y == loaded->vertex[v].y && mesh.dof[v] == loaded->dof[v];
    for (std::size_t t = 0; t < mesh.tri.size(); ++t)
        same = same && mesh.tri[t] == loaded->tri[t] && mesh.tri_region[t] == loaded->tri_region[t];
    CHECK(same);
    CHECK(!load_mesh(path, cell, 1.0 / 16).has_value());
    CellGeometry other = build_cell(ShapeSpec::disk({0.25, 0.5}, 0.16), ShapeSpec::disk({0.7, 0.5}, 0.2));
    CHECK(!load_mesh(path, other, 1.0 / 32).has_value());
    CHECK(!load_mesh("no_such_file.bin", cell, 1.0 / 32).has_value());
    std::remove(path.c_str());
}

TEST_CASE("stiffness: symmetry, kernel, Dirichlet energy") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 32);
    SpMat K = assemble_stiffness(mesh, RegionCoeff::all(1.0));
    CHECK((Eigen::MatrixXd(K) - Eigen::MatrixXd(K).transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_dofs);
    CHECK((K * ones).cwiseAbs().maxCoeff() < 1e-12);

    auto energy = [](const Mesh& m, const SpMat& A) {
        Eigen::VectorXd u = nodal(m, [](const Vec2& p) { return std::sin(2.0 * std::numbers::pi * p.x); });
        return u.dot(A * u);
    };
    double exact = 2.0 * std::numbers::pi * std::numbers::pi;
    double e32 = std::abs(energy(mesh, K) - exact);
    Mesh fine = generate_mesh(empty_cell(), 1.0 / 64);
    double e64 = std::abs(energy(fine, assemble_stiffness(fine, RegionCoeff::all(1.0))) - exact);
    CHECK(e32 < 0.02 * exact);
    CHECK(e32 / e64 > 2.5);
}

TEST_CASE("stiffness with indefinite region weights stays symmetric") {
    Mesh mesh = generate_mesh(reference_cell(), 1.0 / 32);
    RegionCoeff c;
    c.H = 1.0;
    c.P = -1.0;
    SpMat K = assemble_stiffness(mesh, c);
    CHECK((Eigen::MatrixXd(K) - Eigen::MatrixXd(K).transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::VectorXd u = nodal(mesh, [](const Vec2& p) { return p.x * p.x - p.y; });
    CHECK(u.dot(K * u) != 0.0);  // genuinely indefinite data, still assembles
}

TEST_CASE("mass totals equal region areas") {
    Mesh mesh = generate_mesh(one_rod_cell(ShapeSpec::disk({0.5, 0.5}, 0.2), Region::R), 1.0 / 32);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_dofs);
    SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
    CHECK(ones.dot(M * ones) == doctest::Approx(1.0).epsilon(1e-12));
    SpMat MR = assemble_mass(mesh, RegionCoeff::only(Region::R));
    CHECK(ones.dot(MR * ones) == doctest::Approx(std::numbers::pi * 0.04).epsilon(2e-3));
    CHECK(ones.dot(MR * ones) == doctest::Approx(mesh.region_area(Region::R)).epsilon(1e-12));
    SpMat Z = assemble_mass(mesh, RegionCoeff{});
    CHECK(Z.nonZeros() == 0);
}

TEST_CASE("directional form is antisymmetric with zero full-cell row sums") {
    Mesh mesh = generate_mesh(reference_cell(), 1.0 / 32);
    Vec2 k{1.0, 0.0};
    SpMat C = assemble_directional(mesh, RegionCoeff::all(1.0), k);
    CHECK((Eigen::MatrixXd(C) + Eigen::MatrixXd(C).transpose()).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_dofs);
    CHECK((C * ones).cwiseAbs().maxCoeff() < 1e-13);
    // Restricted to one region the row sums become boundary terms instead.
    SpMat CH = assemble_directional(mesh, RegionCoeff::only(Region::H), k);
    CHECK((Eigen::MatrixXd(CH) + Eigen::MatrixXd(CH).transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("periodic Poisson solve matches the closed form") {
    auto solve_err = [](double h) {
        Mesh mesh = generate_mesh(empty_cell(), h);
        SparseSystem sys;
        sys.A = assemble_stiffness(mesh, RegionCoeff::all(1.0));
        SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
        Eigen::VectorXd mean_row = M * Eigen::VectorXd::Ones(mesh.num_dofs);
        sys.constraints.push_back(mean_row);
        sys.rhs = assemble_load(mesh, [](const Vec2& p) { return std::cos(2.0 * std::numbers::pi * p.x); })
                      .cast<std::complex<double>>();
        Field u = solve_constrained(sys);
        double pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
        double err = 0.0;
        for (std::size_t v = 0; v < mesh.vertex.size(); ++v) {
            double want = std::cos(2.0 * std::numbers::pi * mesh.vertex[v].x) / pi2;
            err = std::max(err, std::abs(u.v[mesh.dof[v]].real() - want));
        }
        CHECK(u.v.imag().cwiseAbs().maxCoeff() < 1e-15);
        return err;
    };
    double e32 = solve_err(1.0 / 32);
    double e64 = solve_err(1.0 / 64);
    CHECK(e32 < 1e-3);
    CHECK(e32 / e64 > 2.5);
}

TEST_CASE("incompatible right-hand side raises SingularSystem") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 16);
    SparseSystem sys;
    sys.A = assemble_stiffness(mesh, RegionCoeff::all(1.0));
    SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
    sys.constraints.push_back(M * Eigen::VectorXd::Ones(mesh.num_dofs));
    sys.rhs = (M * Eigen::VectorXd::Ones(mesh.num_dofs)).cast<std::complex<double>>();
    CHECK_THROWS_AS(solve_constrained(sys), SingularSystem);
}

TEST_CASE("zero right-hand side gives the zero field") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 16);
    SparseSystem sys;
    sys.A = assemble_stiffness(mesh, RegionCoeff::all(1.0));
    SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
    sys.constraints.push_back(M * Eigen::VectorXd::Ones(mesh.num_dofs));
    sys.rhs = Eigen::VectorXcd::Zero(mesh.num_dofs);
    Field u = solve_constrained(sys);
    CHECK(u.v.norm() == 0.0);
}

TEST_CASE("periodic Laplacian spectrum: kernel plus two degenerate pairs") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 16);
    SpMat K = assemble_stiffness(mesh, RegionCoeff::all(1.0));
    SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
    GevpOptions opt;
    opt.shift = -1.0;
    auto pairs = solve_gevp(K, M, 6, opt);
    REQUIRE(pairs.size() == 6);
    double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(pairs[0].lambda) < 1e-9);
    for (int i = 1; i <= 4; ++i) {
        CHECK(pairs[static_cast<std::size_t>(i)].lambda == doctest::Approx(four_pi2).epsilon(0.06));
        CHECK(pairs[static_cast<std::size_t>(i)].lambda >= four_pi2 * (1.0 - 1e-12));
    }
    // Column translation and the offset-row glide are exact lattice symmetries,
    // so the x and y fundamental modes each come as an exactly degenerate pair
    // (the pairs differ from each other because the pitches differ).
    CHECK(pairs[2].lambda - pairs[1].lambda < 1e-7 * four_pi2);
    CHECK(pairs[4].lambda - pairs[3].lambda < 1e-7 * four_pi2);
    CHECK(pairs[5].lambda > 1.5 * four_pi2);

    // B-orthonormality of the returned eigenfields.
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double g = pairs[i].phi.dot(M * pairs[j].phi);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("identical operators have unit spectrum") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 16);
    SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
    auto pairs = solve_gevp(M, M, 5, GevpOptions{});
    REQUIRE(pairs.size() == 5);
    for (const auto& p : pairs) CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iterative eigensolver path recovers repeated eigenvalues") {
    Mesh mesh = generate_mesh(empty_cell(), 1.0 / 64);  // thousands of dofs: iterative path
    SpMat K = assemble_stiffness(mesh, RegionCoeff::all(1.0));
    SpMat M = assemble_mass(mesh, RegionCoeff::all(1.0));
    GevpOptions opt;
    opt.shift = -1.0;
    auto pairs = solve_gevp(K, M, 5, opt);
    REQUIRE(pairs.size() == 5);
    double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(pairs[0].lambda) < 1e-9);
    for (int i = 1; i <= 4; ++i)
        CHECK(pairs[static_cast<std::size_t>(i)].lambda == doctest::Approx(four_pi2).epsilon(0.005));
    // Both copies of each exactly degenerate pair must be present, which
    // requires the locking restarts (one Krylov space holds only one copy).
    CHECK(pairs[2].lambda - pairs[1].lambda < 1e-6 * four_pi2);
    CHECK(pairs[4].lambda - pairs[3].lambda < 1e-6 * four_pi2);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double g = pairs[i].phi.dot(M * pairs[j].phi);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("interior and touching dof sets partition sensibly") {
    Mesh mesh = generate_mesh(reference_cell(), 1.0 / 32);
    auto inside_R = interior_dofs(mesh, Region::R);
    auto touching_R = dofs_touching(mesh, {Region::R});
    auto outside = dofs_touching(mesh, {Region::H, Region::P});
    CHECK(!inside_R.empty());
    CHECK(inside_R.size() < touching_R.size());
    // Interface dofs belong to both "touching R" and "touching H or P".
    CHECK(touching_R.size() + outside.size() > static_cast<std::size_t>(mesh.num_dofs));
    // Strict interior never touches the outside.
    std::vector<std::uint8_t> out_mark(static_cast<std::size_t>(mesh.num_dofs), 0);
    for (auto d : outside) out_mark[static_cast<std::size_t>(d)] = 1;
    for (auto d : inside_R) CHECK(!out_mark[static_cast<std::size_t>(d)]);
}

TEST_CASE("gradient integrals: partition-of-unity rows and linear exactness") {
    Mesh mesh = generate_mesh(reference_cell(), 1.0 / 32);
    for (Region r : {Region::H, Region::P, Region::R}) {
        Eigen::MatrixX2d G = assemble_gradient_integral(mesh, RegionCoeff::only(r));
        // Gradients of a partition of unity sum to zero per region.
        CHECK(std::abs(G.col(0).sum()) < 1e-12);
        CHECK(std::abs(G.col(1).sum()) < 1e-12);
    }
    // Dotting with nodal values of a linear function integrates its gradient
    // exactly: Sum_v (a.x_v) Int_P grad(phi_v) = |P| a for interior regions.
    Eigen::MatrixX2d GP = assemble_gradient_integral(mesh, RegionCoeff::only(Region::P));
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(mesh.num_dofs);
    for (std::size_t v = 0; v < mesh.vertex.size(); ++v)
        vals(mesh.dof[v]) = 2.0 * mesh.vertex[v].x - 0.7 * mesh.vertex[v].y;
    Eigen::Vector2d got = GP.transpose() * vals;
    double aP = mesh.region_area(Region::P);
    CHECK(std::abs(got(0) - 2.0 * aP) < 1e-12);
    CHECK(std::abs(got(1) + 0.7 * aP) < 1e-12);
    // Scaling behaves linearly in the coefficients.
    Eigen::MatrixX2d Gall = assemble_gradient_integral(mesh, {1.0, -2.0, 0.5});
    Eigen::MatrixX2d Gsum = assemble_gradient_integral(mesh, RegionCoeff::only(Region::H)) -
                            2.0 * GP +
                            0.5 * assemble_gradient_integral(mesh, RegionCoeff::only(Region::R));
    CHECK((Gall - Gsum).cwiseAbs().maxCoeff() < 1e-14);
}
