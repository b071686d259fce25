// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "subwave/geometry.hpp"

namespace subwave {

/// Zero-mean Green's function of the Laplacian on the unit torus:
/// Delta F = (periodic delta at 0) - 1, F(d) = -Sum_{n != 0}
/// cos(2 pi n.d) / (4 pi^2 |n|^2). Evaluated by an exponentially convergent
/// closed form (Bernoulli polynomial + image logarithms + geometric
/// remainder), exact to machine precision; `d` is wrapped internally, so any
/// offset is valid. Near d = 0 the function behaves like log|d|/(2 pi).
double torus_greens(Vec2 d);

/// Gradient of torus_greens with respect to d (wrapped the same way).
Vec2 torus_greens_grad(Vec2 d);

/// Smooth remainder of torus_greens at its singularity:
/// F_reg(d) = torus_greens(d) - log|d|/(2 pi), computed without cancellation
/// (valid for wrapped d; F_reg is even and smooth through d = 0).
double torus_greens_regular(Vec2 d);

/// lim_{d -> 0} torus_greens_regular(d).
double torus_greens_regular0();

/// Gradient of torus_greens_regular (odd and O(|d|) through d = 0).
Vec2 torus_greens_regular_grad(Vec2 d);

/// Literal truncated lattice sum -Sum_{0 < |n| <= truncation}
/// cos(2 pi n.d) / (4 pi^2 |n|^2) with Kahan-compensated accumulation.
/// O(truncation^2) per call; verification evaluator for torus_greens.
double torus_greens_fourier(Vec2 d, int truncation);

/// Magnitude of the first omitted Fourier shell for `truncation` (heuristic
/// error scale of torus_greens_fourier, roughly 1/(2 pi truncation)).
double torus_greens_tail_estimate(int truncation);

/// Quadrature weight for the 2*n_half-point trigonometric product rule
/// integrating s -> log(4 sin^2((t - s)/2)) f(s) over [0, 2 pi]: the weight
/// multiplying f(s_j) is log_kernel_weight(n_half, t - s_j). Exact for
/// trigonometric polynomials f of degree <= n_half.
double log_kernel_weight(int n_half, double dt);

/// Balanced trigonometric interpolation of N equispaced periodic samples
/// (t_j = 2 pi j / N, N even) evaluated at angle t.
double trig_interp(const std::vector<double>& samples, double t);

/// Rod-corrected periodic Green's function G(x, y) = F(x - y) + corrector:
/// the corrector is harmonic off the R rod, periodic, and enforces the
/// constant normal flux |R|/|boundary R| on the R-rod boundary (normal taken
/// outward of the domain, i.e. pointing into R) together with a zero boundary
/// average. It is realized as a single layer of mean-zero density on the
/// R-boundary quadrature nodes; disk rods only. Cells without an R rod get a
/// trivial corrector (G = F).
class PeriodicGreens {
public:
    /// Single-layer density and additive constant for one source point.
    struct Corrector {
        Vec2 y;
        Eigen::VectorXd sigma;  // one value per R-boundary node (empty if trivial)
        double c = 0.0;
    };

    int truncation() const { return truncation_; }
    double tail_estimate() const { return tail_estimate_; }
    bool has_corrector() const { return !rod_q_.nodes.empty(); }
    const BoundaryQuadrature& rod_nodes() const { return rod_q_; }

    /// Solves the corrector boundary system for source point y.
    Corrector corrector(const Vec2& y) const;

    /// G(x, y) and its x-gradient for the prepared source (corr.y must be the
    /// source point; x may be any point distinct from y modulo the lattice).
    double G(const Corrector& corr, const Vec2& x) const;
    Vec2 gradG_x(const Corrector& corr, const Vec2& x) const;

    /// Max |dG/dn - |R|/|boundary R|| over staggered R-boundary test points
    /// for source y (normal outward of the domain). Zero-rod cells return 0.
    double neumann_residual(const Vec2& y) const;

    /// Total flux of G through the R boundary at staggered test points
    /// (normal outward of the domain); equals the R area for a valid corrector.
    double flux(const Vec2& y) const;

    /// Boundary average of the corrector alone (should vanish by construction).
    double corrector_average(const Corrector& corr) const;

private:
    friend PeriodicGreens build_periodic_greens(const CellGeometry& cell, int truncation,
                                                int n_R);
    int truncation_ = 0;
    double tail_estimate_ = 0.0;
    Vec2 rod_center_;
    double rod_radius_ = 0.0;
    double flux_density_ = 0.0;  // |R|/|boundary R|
    BoundaryQuadrature rod_q_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;  // bordered boundary system
    Eigen::MatrixXd sr_;  // single-layer boundary matrix (log-quadrature split)
};

/// Prepares the rod-corrected Green's function: factorizes the corrector
/// boundary system on n_R R-boundary nodes and verifies the Neumann residual
/// at a probe source. Throws ValidationError if truncation < 16 or n_R < 16,
/// ConfigError subtypes for non-disk R rods, CorrectorFailure if the boundary
/// system is rank deficient or the residual check fails.
PeriodicGreens build_periodic_greens(const CellGeometry& cell, int truncation, int n_R = 128);

} // namespace subwave
