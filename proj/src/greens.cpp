// SPDX-License-Identifier: Apache-2.0
#include "subwave/greens.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "subwave/errors.hpp"
#include "subwave/util.hpp"

namespace subwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Number of terms of the geometric remainder sums; the m-th term carries a
// factor exp(-2 pi m), so 18 terms land far below double precision.
constexpr int kRemTerms = 18;

using Cplx = std::complex<double>;

// Wraps each component to [-1/2, 1/2).
Vec2 wrap(Vec2 d) {
    return {d.x - std::floor(d.x + 0.5), d.y - std::floor(d.y + 0.5)};
}

double bernoulli2(double a) { return a * a - a + 1.0 / 6.0; }

// phi(u) = (1 - exp(-u))/u, stable through u = 0.
Cplx phi_expm1(Cplx u) {
    if (std::abs(u) > 0.5) return (1.0 - std::exp(-u)) / u;
    Cplx term{1.0, 0.0};
    Cplx sum = term;
    for (int k = 1; k <= 16; ++k) {
        term *= -u / static_cast<double>(k + 1);
        sum += term;
    }
    return sum;
}

// w(u) = 1/(exp(u) - 1) - 1/u, stable through u = 0 (Bernoulli series).
Cplx cot_regular(Cplx u) {
    if (std::abs(u) > 0.5) return 1.0 / (std::exp(u) - 1.0) - 1.0 / u;
    Cplx u2 = u * u;
    Cplx s{-0.5, 0.0};
    s += u / 12.0;
    Cplx p = u * u2;  // u^3
    s -= p / 720.0;
    p *= u2;  // u^5
    s += p / 30240.0;
    p *= u2;  // u^7
    s -= p / 1209600.0;
    p *= u2;  // u^9
    s += p / 47900160.0;
    return s;
}

// Shared geometry of one evaluation: wrapped offset, the nearest-image
// complex coordinate zeta = a - i b (a = |d1|, b = d2), and the mirrored
// factor z2 = exp(-2 pi ((1 - a) - i b)).
struct Split {
    double a = 0.0;      // |d1| in [0, 1/2]
    double b = 0.0;      // d2 in [-1/2, 1/2)
    double sign1 = 1.0;  // sign of d1
    Cplx zeta;           // a - i b
    Cplx z2;             // e^{-2 pi ((1-a) - i b)}
};

Split split(Vec2 d) {
    Vec2 w = wrap(d);
    Split s;
    s.sign1 = w.x < 0.0 ? -1.0 : 1.0;
    s.a = std::abs(w.x);
    s.b = w.y;
    s.zeta = Cplx(s.a, -s.b);
    s.z2 = std::exp(-kTwoPi * Cplx(1.0 - s.a, -s.b));
    return s;
}

// Remainder sum R(c1, c2) = Sum_m f_m(b) (c1 q1^m + c2 q2^m) e^{-2 pi m} g_m
// with g_m = 1/(1 - e^{-2 pi m}); `use_sin` selects f_m = sin(2 pi m b)
// instead of cos; `per_m` divides each term by 2 pi m (the potential itself).
double remainder_sum(const Split& s, double c1, double c2, bool use_sin, bool per_m) {
    double q1 = std::exp(-kTwoPi * s.a);
    double q2 = std::exp(-kTwoPi * (1.0 - s.a));
    double q1m = 1.0, q2m = 1.0;
    double sum = 0.0;
    for (int m = 1; m <= kRemTerms; ++m) {
        q1m *= q1;
        q2m *= q2;
        double em = std::exp(-kTwoPi * m);
        double gm = 1.0 / (1.0 - em);
        double f = use_sin ? std::sin(kTwoPi * m * s.b) : std::cos(kTwoPi * m * s.b);
        double t = f * (c1 * q1m + c2 * q2m) * em * gm;
        if (per_m) t /= kTwoPi * m;
        sum += t;
    }
    return sum;
}

}  // namespace

double torus_greens(Vec2 d) {
    Split s = split(d);
    double r = std::abs(s.zeta);
    if (r == 0.0) return -std::numeric_limits<double>::infinity();
    Cplx u = kTwoPi * s.zeta;
    double log1 = std::log(kTwoPi * r) + std::log(std::abs(phi_expm1(u)));
    double log2 = std::log(std::abs(1.0 - s.z2));
    return -0.5 * bernoulli2(s.a) + (log1 + log2) / kTwoPi -
           remainder_sum(s, 1.0, 1.0, false, true);
}

double torus_greens_regular(Vec2 d) {
    Split s = split(d);
    Cplx u = kTwoPi * s.zeta;
    double log1 = std::log(kTwoPi) + std::log(std::abs(phi_expm1(u)));
    double log2 = std::log(std::abs(1.0 - s.z2));
    return -0.5 * bernoulli2(s.a) + (log1 + log2) / kTwoPi -
           remainder_sum(s, 1.0, 1.0, false, true);
}

double torus_greens_regular0() { return torus_greens_regular({0.0, 0.0}); }

Vec2 torus_greens_grad(Vec2 d) {
    Split s = split(d);
    Cplx u = kTwoPi * s.zeta;
    Cplx pole = 1.0 / u + cot_regular(u);           // z1/(1 - z1)
    Cplx mirror = s.z2 / (1.0 - s.z2);
    double da = -(s.a - 0.5) + pole.real() - mirror.real() -
                remainder_sum(s, -1.0, 1.0, false, false);
    double db = pole.imag() + mirror.imag() + remainder_sum(s, 1.0, 1.0, true, false);
    return {s.sign1 * da, db};
}

Vec2 torus_greens_regular_grad(Vec2 d) {
    Split s = split(d);
    Cplx u = kTwoPi * s.zeta;
    Cplx pole = cot_regular(u);  // z1/(1 - z1) minus the 1/u singularity
    Cplx mirror = s.z2 / (1.0 - s.z2);
    double da = -(s.a - 0.5) + pole.real() - mirror.real() -
                remainder_sum(s, -1.0, 1.0, false, false);
    double db = pole.imag() + mirror.imag() + remainder_sum(s, 1.0, 1.0, true, false);
    return {s.sign1 * da, db};
}

double torus_greens_fourier(Vec2 d, int truncation) {
    if (truncation < 1) throw ValidationError("torus_greens_fourier requires truncation >= 1");
    KahanSum sum;
    long t2 = static_cast<long>(truncation) * truncation;
    for (int n1 = -truncation; n1 <= truncation; ++n1) {
        for (int n2 = -truncation; n2 <= truncation; ++n2) {
            long nn = static_cast<long>(n1) * n1 + static_cast<long>(n2) * n2;
            if (nn == 0 || nn > t2) continue;
            double phase = kTwoPi * (n1 * d.x + n2 * d.y);
            sum.add(-std::cos(phase) / (4.0 * kPi * kPi * static_cast<double>(nn)));
        }
    }
    return sum.value();
}

double torus_greens_tail_estimate(int truncation) {
    if (truncation < 1) throw ValidationError("tail estimate requires truncation >= 1");
    long t2 = static_cast<long>(truncation) * truncation;
    long s2 = static_cast<long>(truncation + 1) * (truncation + 1);
    KahanSum sum;
    for (int n1 = -(truncation + 1); n1 <= truncation + 1; ++n1) {
        for (int n2 = -(truncation + 1); n2 <= truncation + 1; ++n2) {
            long nn = static_cast<long>(n1) * n1 + static_cast<long>(n2) * n2;
            if (nn <= t2 || nn > s2) continue;
            sum.add(1.0 / (4.0 * kPi * kPi * static_cast<double>(nn)));
        }
    }
    return sum.value();
}

double log_kernel_weight(int n_half, double dt) {
    if (n_half < 2) throw ValidationError("log_kernel_weight requires n_half >= 2");
    double s = 0.0;
    for (int m = 1; m < n_half; ++m) s += std::cos(m * dt) / m;
    return -(kTwoPi / n_half) * s - (kPi / (n_half * static_cast<double>(n_half))) *
                                        std::cos(n_half * dt);
}

double trig_interp(const std::vector<double>& samples, double t) {
    std::size_t n = samples.size();
    if (n < 2 || n % 2 != 0) throw ValidationError("trig_interp requires an even sample count");
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double u = t - kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        double half = std::sin(0.5 * u);
        if (std::abs(half) < 1e-12) return samples[j];
        acc += samples[j] * std::sin(0.5 * static_cast<double>(n) * u) * std::cos(0.5 * u) / half;
    }
    return acc / static_cast<double>(n);
}

namespace {

// Nystrom matrix of the adjoint double layer on the R boundary with the
// torus kernel (normal outward of R), including the curvature diagonal.
Eigen::MatrixXd double_layer_matrix(const BoundaryQuadrature& q, double radius) {
    int n = static_cast<int>(q.nodes.size());
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double kernel;
            if (i == j) {
                kernel = 1.0 / (4.0 * kPi * radius);
            } else {
                Vec2 d = wrap(q.nodes[i] - q.nodes[j]);
                Vec2 g = torus_greens_regular_grad(d);
                double free = q.normals[i].dot(d) / (kTwoPi * d.squared_norm());
                kernel = free + q.normals[i].dot(g);
            }
            K(i, j) = kernel * q.weights[j];
        }
    }
    return K;
}

// Kress single-layer matrix on the R boundary with the torus kernel: the
// log(4 sin^2) part integrated by the trigonometric product rule, the smooth
// part by the trapezoid rule.
Eigen::MatrixXd single_layer_matrix(const BoundaryQuadrature& q, double radius) {
    int n = static_cast<int>(q.nodes.size());
    int n_half = n / 2;
    double reg0 = torus_greens_regular0();
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double dt = kTwoPi * static_cast<double>(i - j) / n;
            double smooth = std::log(radius) / kTwoPi +
                            (i == j ? reg0 : torus_greens_regular(q.nodes[i] - q.nodes[j]));
            S(i, j) = radius * (log_kernel_weight(n_half, dt) / (4.0 * kPi) +
                                (kPi / n_half) * smooth);
        }
    }
    return S;
}

}  // namespace

PeriodicGreens build_periodic_greens(const CellGeometry& cell, int truncation, int n_R) {
    if (truncation < 16) throw ValidationError("periodic Greens truncation must be >= 16");
    PeriodicGreens g;
    g.truncation_ = truncation;
    g.tail_estimate_ = torus_greens_tail_estimate(truncation);
    if (!cell.has_R) return g;  // trivial corrector

    if (cell.shape_R.kind != ShapeKind::Disk)
        throw ValidationError("rod-corrected Greens function supports disk R rods only");
    if (n_R < 16 || n_R % 2 != 0)
        throw ValidationError("corrector node count must be even and >= 16");
    if (!(cell.shape_R.radius < 0.25))
        throw ValidationError(
            "corrector requires rod diameter < 1/2 so chord distances between "
            "boundary nodes agree with torus distances");

    g.rod_center_ = cell.shape_R.center;
    g.rod_radius_ = cell.shape_R.radius;
    g.flux_density_ = cell.shape_R.area() / cell.shape_R.perimeter();
    g.rod_q_ = boundary_quadrature(cell.shape_R, n_R);

    Eigen::MatrixXd K = double_layer_matrix(g.rod_q_, g.rod_radius_);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_R + 1, n_R + 1);
    M.topLeftCorner(n_R, n_R) = 0.5 * Eigen::MatrixXd::Identity(n_R, n_R) + K;
    for (int i = 0; i < n_R; ++i) {
        M(i, n_R) = 1.0;
        M(n_R, i) = g.rod_q_.weights[static_cast<std::size_t>(i)];
    }
    g.lu_.compute(M);
    if (g.lu_.rcond() < 1e-12)
        throw CorrectorFailure("corrector boundary system is numerically rank deficient");
    g.sr_ = single_layer_matrix(g.rod_q_, g.rod_radius_);

    // Probe the Neumann condition at a source point well away from the rod:
    // a P-boundary point if there is one, else the torus antipode of the
    // R center.
    Vec2 probe;
    if (cell.has_P) {
        probe = cell.shape_P.project_to_boundary(cell.shape_P.center + Vec2{1, 0});
    } else {
        probe = cell.shape_R.center + Vec2{0.5, 0.5};
        probe.x -= std::floor(probe.x);
        probe.y -= std::floor(probe.y);
    }
    double res = g.neumann_residual(probe);
    if (!(res < 1e-6))
        throw CorrectorFailure("corrector Neumann residual " + format_g17(res) +
                               " exceeds 1e-6 at the probe source");
    return g;
}

PeriodicGreens::Corrector PeriodicGreens::corrector(const Vec2& y) const {
    Corrector c;
    c.y = y;
    if (!has_corrector()) return c;
    int n = static_cast<int>(rod_q_.nodes.size());
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) {
        Vec2 grad = torus_greens_grad(rod_q_.nodes[static_cast<std::size_t>(i)] - y);
        rhs(i) = -rod_q_.normals[static_cast<std::size_t>(i)].dot(grad) - flux_density_;
    }
    rhs(n) = 0.0;
    Eigen::VectorXd sol = lu_.solve(rhs);
    c.sigma = sol.head(n);

    // Fix the additive constant by a zero boundary average of the corrector.
    Eigen::VectorXd values = sr_ * c.sigma;
    double avg = 0.0, length = 0.0;
    for (int i = 0; i < n; ++i) {
        avg += values(i) * rod_q_.weights[static_cast<std::size_t>(i)];
        length += rod_q_.weights[static_cast<std::size_t>(i)];
    }
    c.c = -avg / length;
    return c;
}

double PeriodicGreens::G(const Corrector& corr, const Vec2& x) const {
    double v = torus_greens(x - corr.y);
    for (int k = 0; k < corr.sigma.size(); ++k)
        v += torus_greens(x - rod_q_.nodes[static_cast<std::size_t>(k)]) * corr.sigma(k) *
             rod_q_.weights[static_cast<std::size_t>(k)];
    return v + corr.c;
}

Vec2 PeriodicGreens::gradG_x(const Corrector& corr, const Vec2& x) const {
    Vec2 v = torus_greens_grad(x - corr.y);
    for (int k = 0; k < corr.sigma.size(); ++k) {
        Vec2 g = torus_greens_grad(x - rod_q_.nodes[static_cast<std::size_t>(k)]);
        double s = corr.sigma(k) * rod_q_.weights[static_cast<std::size_t>(k)];
        v += g * s;
    }
    return v;
}

double PeriodicGreens::corrector_average(const Corrector& corr) const {
    if (!has_corrector() || corr.sigma.size() == 0) return 0.0;
    Eigen::VectorXd values = sr_ * corr.sigma;
    double avg = 0.0;
    for (int i = 0; i < values.size(); ++i)
        avg += (values(i) + corr.c) * rod_q_.weights[static_cast<std::size_t>(i)];
    return avg;
}

double PeriodicGreens::neumann_residual(const Vec2& y) const {
    if (!has_corrector()) return 0.0;
    Corrector corr = corrector(y);
    int n = static_cast<int>(rod_q_.nodes.size());
    std::vector<double> sigma(corr.sigma.data(), corr.sigma.data() + n);
    const Vec2 center = rod_center_;

    double worst = 0.0;
    for (int s = 0; s < n; ++s) {
        double t = kTwoPi * (s + 0.5) / n;
        Vec2 nrm{std::cos(t), std::sin(t)};
        Vec2 x = center + nrm * rod_radius_;
        // Exterior-side normal derivative of the single layer: principal
        // value (smooth kernel on a disk) plus half the interpolated density.
        double pv = 0.0;
        for (int k = 0; k < n; ++k) {
            Vec2 d = wrap(x - rod_q_.nodes[static_cast<std::size_t>(k)]);
            double kernel = nrm.dot(d) / (kTwoPi * d.squared_norm()) +
                            nrm.dot(torus_greens_regular_grad(d));
            pv += kernel * corr.sigma(k) * rod_q_.weights[static_cast<std::size_t>(k)];
        }
        double density = trig_interp(sigma, t);
        double dn = -nrm.dot(torus_greens_grad(x - y)) - (0.5 * density + pv);
        worst = std::max(worst, std::abs(dn - flux_density_));
    }
    return worst;
}

double PeriodicGreens::flux(const Vec2& y) const {
    if (!has_corrector()) return 0.0;
    Corrector corr = corrector(y);
    int n = static_cast<int>(rod_q_.nodes.size());
    std::vector<double> sigma(corr.sigma.data(), corr.sigma.data() + n);
    const Vec2 center = rod_center_;

    double total = 0.0;
    for (int s = 0; s < n; ++s) {
        double t = kTwoPi * (s + 0.5) / n;
        Vec2 nrm{std::cos(t), std::sin(t)};
        Vec2 x = center + nrm * rod_radius_;
        double pv = 0.0;
        for (int k = 0; k < n; ++k) {
            Vec2 d = wrap(x - rod_q_.nodes[static_cast<std::size_t>(k)]);
            double kernel = nrm.dot(d) / (kTwoPi * d.squared_norm()) +
                            nrm.dot(torus_greens_regular_grad(d));
            pv += kernel * corr.sigma(k) * rod_q_.weights[static_cast<std::size_t>(k)];
        }
        double dn = -nrm.dot(torus_greens_grad(x - y)) - (0.5 * trig_interp(sigma, t) + pv);
        total += dn * kTwoPi * rod_radius_ / n;
    }
    return total;
}

} // namespace subwave
