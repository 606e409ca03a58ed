// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace pedflow {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
/// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-squared distribution with `dof` degrees of freedom.
/// dof = 0 denotes the degenerate point mass at zero (CDF 1 for x >= 0).
double chi_squared_cdf(double x, double dof);

/// p-th quantile of the chi-squared distribution with `dof` degrees of
/// freedom, computed by bisection on the CDF to 1e-12 absolute.
/// Returns 0 for p <= 0 or dof = 0; throws std::invalid_argument for
/// p >= 1 or dof < 0.
double chi_squared_quantile(double p, double dof);

/// Spearman rank correlation of two equal-length samples.
/// Ties receive average ranks. Returns 0 for fewer than 2 points or
/// when either sample is constant.
double spearman_rank_correlation(const double* xs, const double* ys, int n);

}  // namespace pedflow
