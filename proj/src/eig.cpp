// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "subwave/errors.hpp"
#include "subwave/fem.hpp"

namespace subwave {

namespace {

struct Candidate {
    double lambda;
    Eigen::VectorXd x;
    double residual;
};

double pair_residual(const SpMat& A, const SpMat& B, double lambda, const Eigen::VectorXd& x) {
    Eigen::VectorXd bx = B * x;
    double denom = bx.norm();
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return (A * x - lambda * bx).norm() / denom;
}

std::vector<EigPair> select(std::vector<Candidate>& cand, const SpMat& A, const SpMat& B, int k,
                            const GevpOptions& opt) {
    if (opt.window) {
        auto [lo, hi] = *opt.window;
        std::erase_if(cand, [&](const Candidate& c) { return c.lambda < lo || c.lambda > hi; });
    }
    std::sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) {
        return std::abs(a.lambda - opt.shift) < std::abs(b.lambda - opt.shift);
    });
    if (static_cast<int>(cand.size()) > k) cand.resize(static_cast<std::size_t>(k));
    std::sort(cand.begin(), cand.end(),
              [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });
    std::vector<EigPair> out;
    out.reserve(cand.size());
    for (auto& c : cand) {
        double bnorm = std::sqrt(std::max(0.0, c.x.dot(B * c.x)));
        if (bnorm > 0.0) c.x /= bnorm;
        c.residual = pair_residual(A, B, c.lambda, c.x);
        if (c.residual > 1e-8)
            throw ConvergenceFailure("eigenpair residual " + format_g17(c.residual) +
                                     " exceeds contract near eigenvalue " + format_g17(c.lambda) +
                                     " (" + std::to_string(out.size()) + " pairs converged)");
        out.push_back({c.lambda, std::move(c.x)});
    }
    return out;
}

std::vector<EigPair> dense_gevp(const SpMat& A, const SpMat& B, int k, const GevpOptions& opt) {
    Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
    Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Bd,
                                                                 Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("dense generalized eigensolve failed");
    std::vector<Candidate> cand;
    cand.reserve(static_cast<std::size_t>(es.eigenvalues().size()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        cand.push_back({es.eigenvalues()[i], es.eigenvectors().col(i), 0.0});
    return select(cand, A, B, k, opt);
}

// Shift-invert Lanczos with B inner product, full reorthogonalization, and
// locking restarts: converged pairs are locked and every later sweep runs
// B-orthogonal to them, so repeated eigenvalues are recovered copy by copy
// (a single Krylov space can only ever hold one vector per eigenvalue).
// Sweeps repeat until a whole fresh sweep leaves the k pairs nearest the
// shift unchanged, which confirms no copy within that distance is missing.
std::vector<EigPair> lanczos_gevp(const SpMat& A, const SpMat& B, int k, const GevpOptions& opt) {
    Eigen::Index n = A.rows();
    double sigma = opt.shift;
    Eigen::SparseLU<SpMat> lu;
    for (int attempt = 0;; ++attempt) {
        SpMat shifted = A - sigma * B;
        lu.compute(shifted);
        if (lu.info() == Eigen::Success) break;
        if (attempt >= 4)
            throw ConvergenceFailure("shifted operator is singular at every attempted shift");
        sigma += 1e-3 * (1.0 + std::abs(sigma));
    }

    int want = std::min<int>(k, static_cast<int>(n));
    int m_max = opt.max_subspace > 0 ? opt.max_subspace
                                     : std::min<int>(static_cast<int>(n), std::max(4 * k + 20, 60));
    std::vector<Candidate> locked;
    Eigen::MatrixXd X(n, 0), BX(n, 0);
    std::mt19937_64 rng(0x5eed5eed);
    std::normal_distribution<double> gauss;

    auto dist = [&](double lambda) { return std::abs(lambda - sigma); };
    auto kth_distance = [&]() {
        std::vector<double> d;
        d.reserve(locked.size());
        for (const auto& c : locked) d.push_back(dist(c.lambda));
        std::nth_element(d.begin(), d.begin() + (want - 1), d.end());
        return d[static_cast<std::size_t>(want - 1)];
    };

    for (int restart = 0; restart < 64; ++restart) {
        Eigen::MatrixXd V(n, m_max), BV(n, m_max);
        Eigen::VectorXd alpha(m_max), beta(m_max);
        auto reorthogonalize = [&](Eigen::VectorXd& w, int cols) {
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i < X.cols(); ++i) w -= BX.col(i).dot(w) * X.col(i);
                for (int i = 0; i < cols; ++i) w -= BV.col(i).dot(w) * V.col(i);
            }
        };

        int m = 0;
        {
            Eigen::VectorXd w(n);
            for (Eigen::Index i = 0; i < n; ++i) w[i] = gauss(rng);
            reorthogonalize(w, 0);
            Eigen::VectorXd bw = B * w;
            double nb = std::sqrt(std::max(0.0, w.dot(bw)));
            if (nb < 1e-12) break;  // B-range exhausted
            V.col(0) = w / nb;
            BV.col(0) = bw / nb;
        }
        for (int j = 0; j < m_max; ++j) {
            Eigen::VectorXd w = lu.solve(BV.col(j));
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            alpha[j] = BV.col(j).dot(w);
            w -= alpha[j] * V.col(j);
            reorthogonalize(w, j + 1);
            m = j + 1;
            if (j + 1 == m_max) break;
            Eigen::VectorXd bw = B * w;
            double nb = std::sqrt(std::max(0.0, w.dot(bw)));
            if (nb < 1e-12) break;  // invariant subspace; the next restart continues
            beta[j] = nb;
            V.col(j + 1) = w / nb;
            BV.col(j + 1) = bw / nb;
        }

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        std::vector<Candidate> fresh;
        for (Eigen::Index i = 0; i < m; ++i) {
            double theta = es.eigenvalues()[i];
            if (std::abs(theta) < 1e-14) continue;
            Candidate c;
            c.lambda = sigma + 1.0 / theta;
            c.x = V.leftCols(m) * es.eigenvectors().col(i);
            c.residual = pair_residual(A, B, c.lambda, c.x);
            if (c.residual <= 1e-8) fresh.push_back(std::move(c));
        }
        std::sort(fresh.begin(), fresh.end(), [&](const Candidate& a, const Candidate& b) {
            return dist(a.lambda) < dist(b.lambda);
        });

        double guard = locked.size() >= static_cast<std::size_t>(want)
                           ? kth_distance() * (1.0 + 1e-10)
                           : std::numeric_limits<double>::infinity();
        int locked_this_sweep = 0;
        bool set_changed = false;
        for (auto& c : fresh) {
            // A candidate nearly inside the locked span is a ghost copy of an
            // already-locked pair; a genuinely new copy stays near unit norm.
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index i = 0; i < X.cols(); ++i) c.x -= BX.col(i).dot(c.x) * X.col(i);
            Eigen::VectorXd bx = B * c.x;
            double nb = std::sqrt(std::max(0.0, c.x.dot(bx)));
            if (nb < 1e-6) continue;
            c.x /= nb;
            c.residual = pair_residual(A, B, c.lambda, c.x);
            if (c.residual > 1e-8) continue;
            X.conservativeResize(Eigen::NoChange, X.cols() + 1);
            BX.conservativeResize(Eigen::NoChange, BX.cols() + 1);
            X.col(X.cols() - 1) = c.x;
            BX.col(BX.cols() - 1) = bx / nb;
            if (dist(c.lambda) < guard) set_changed = true;
            locked.push_back(std::move(c));
            ++locked_this_sweep;
        }

        if (locked.size() >= static_cast<std::size_t>(want) && !set_changed) break;
        if (locked_this_sweep == 0) {
            if (m_max >= static_cast<int>(n)) break;
            m_max = std::min<int>(static_cast<int>(n), 2 * m_max);
        }
    }

    if (static_cast<int>(locked.size()) < want && !opt.window)
        throw ConvergenceFailure("only " + std::to_string(locked.size()) + " of " +
                                 std::to_string(k) + " eigenpairs converged");
    return select(locked, A, B, k, opt);
}

} // namespace

std::vector<EigPair> solve_gevp(const SpMat& A, const SpMat& B, int k, const GevpOptions& opt) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw ValidationError("generalized eigensolve needs square operators of equal size");
    if (k <= 0) return {};
    Eigen::Index n = A.rows();
    if (n <= 1200 || 3 * k >= n) return dense_gevp(A, B, k, opt);
    return lanczos_gevp(A, B, k, opt);
}

} // namespace subwave
