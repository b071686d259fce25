// SPDX-License-Identifier: Apache-2.0
#include "subwave/bessel.hpp"

#include <cmath>
#include <stdexcept>

#include "subwave/util.hpp"

namespace subwave {

double bessel_j(int k, double x) {
    if (k < 0 || x < 0.0) throw std::domain_error("bessel_j requires k >= 0 and x >= 0");
    return std::cyl_bessel_j(static_cast<double>(k), x);
}

std::vector<double> bessel_j_zeros_upto(int k, double xmax) {
    std::vector<double> zeros;
    if (xmax <= 0.0) return zeros;
    // J_k is positive just right of the origin, so the first sign change met by
    // the scan is the first positive zero. For large orders the function
    // underflows to exactly 0.0 left of the turning point; that plateau is a
    // prefix of the scan (J_k has no zeros below x = k and recovers to normal
    // magnitudes long before the first one), so a vanishing value only counts
    // as a root when the previous sample was genuinely nonzero.
    const double dx = 0.5;
    double a = 1e-9;
    double fa = bessel_j(k, a);
    while (a < xmax) {
        double b = std::min(a + dx, xmax);
        double fb = bessel_j(k, b);
        if (fb == 0.0) {
            if (fa != 0.0) zeros.push_back(b);
        } else if (fa != 0.0 && ((fa < 0.0) != (fb < 0.0))) {
            zeros.push_back(bisect([k](double x) { return bessel_j(k, x); }, a, b, 1e-13, 200));
        }
        a = b;
        fa = fb;
    }
    return zeros;
}

double bessel_j_zero(int k, int m) {
    if (m < 1) throw std::domain_error("bessel_j_zero requires m >= 1");
    // Zeros are spaced close to pi apart beyond x ~ k, so this cap almost
    // always suffices on the first try; grow it geometrically if not.
    double xmax = (m + 0.5 * k + 2.0) * 3.2 + k;
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> zeros = bessel_j_zeros_upto(k, xmax);
        if (static_cast<int>(zeros.size()) >= m) return zeros[static_cast<std::size_t>(m - 1)];
        xmax *= 1.5;
    }
    throw std::runtime_error("bessel_j_zero: bracket search failed to enclose the requested zero");
}

} // namespace subwave
