// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace subwave {

/// Cylindrical Bessel function J_k(x) for integer order k >= 0 and x >= 0.
double bessel_j(int k, double x);

/// m-th positive zero of J_k (m >= 1), bracketed by a scan and refined by
/// bisection to ~1e-12 absolute.
double bessel_j_zero(int k, int m);

/// All positive zeros of J_k in (0, xmax], ascending. Consecutive zeros of
/// J_k sit close to pi apart (never closer than 3), so a half-unit scan
/// cannot skip any.
std::vector<double> bessel_j_zeros_upto(int k, double xmax);

} // namespace subwave
