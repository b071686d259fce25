// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace subwave {

/// Plain 2D point/vector.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Compensated (Kahan) accumulator for long sums.
class KahanSum {
public:
    void add(double v) {
        double y = v - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// FNV-1a 64-bit hash, used for cache keys and CSV provenance headers.
class Fnv64 {
public:
    Fnv64& bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ull;
        }
        return *this;
    }
    Fnv64& add(double v) { return bytes(&v, sizeof v); }
    Fnv64& add(std::int64_t v) { return bytes(&v, sizeof v); }
    Fnv64& add(const std::string& s) { return bytes(s.data(), s.size()); }
    std::uint64_t value() const { return h_; }
    std::string hex() const;

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

/// Bisection to absolute tolerance `tol` on a bracketing interval [a,b] with
/// f(a)·f(b) <= 0. Returns the midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-10, int max_iter = 200);

/// `n` geometrically spaced values in [a, b] (a, b > 0, n >= 2).
std::vector<double> geomspace(double a, double b, int n);

/// `n` linearly spaced values in [a, b] (n >= 2).
std::vector<double> linspace(double a, double b, int n);

/// Format a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

} // namespace subwave
