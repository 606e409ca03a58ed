// SPDX-License-Identifier: Apache-2.0
#include "pedflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pedflow {

namespace {

// Lower incomplete gamma by power series, valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma Q(a, x) by modified Lentz continued fraction,
// valid for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be > 0");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_squared_cdf(double x, double dof) {
    if (dof < 0.0) throw std::invalid_argument("chi_squared_cdf: dof must be >= 0");
    if (x <= 0.0) return dof == 0.0 ? 1.0 : 0.0;
    if (dof == 0.0) return 1.0;
    return regularized_gamma_p(dof / 2.0, x / 2.0);
}

double chi_squared_quantile(double p, double dof) {
    if (dof < 0.0) throw std::invalid_argument("chi_squared_quantile: dof must be >= 0");
    if (p >= 1.0) throw std::invalid_argument("chi_squared_quantile: p must be < 1");
    if (p <= 0.0 || dof == 0.0) return 0.0;

    double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 20.0;
    while (chi_squared_cdf(hi, dof) < p) hi *= 2.0;
    double lo = 0.0;
    // ~60 halvings take the bracket well below the 1e-12 target.
    for (int i = 0; i < 200 && (hi - lo) > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi_squared_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double spearman_rank_correlation(const double* xs, const double* ys, int n) {
    if (n < 2) return 0.0;
    auto ranks = [n](const double* v) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::vector<double> r(static_cast<std::size_t>(n));
        int i = 0;
        while (i < n) {
            int j = i;
            while (j + 1 < n && v[idx[static_cast<std::size_t>(j + 1)]] == v[idx[static_cast<std::size_t>(i)]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;
            for (int k = i; k <= j; ++k) r[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(xs);
    const std::vector<double> ry = ranks(ys);
    const double mean = 0.5 * (n + 1);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = rx[static_cast<std::size_t>(i)] - mean;
        const double dy = ry[static_cast<std::size_t>(i)] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace pedflow
