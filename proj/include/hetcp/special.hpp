#pragma once

namespace hetcp {

double normal_cdf(double x);

/// Inverse standard-normal CDF, Wichura's AS 241 (PPND16); relative error
/// about 1e-16 over (0, 1). Returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b) for a, b > 0, by Lentz's continued
/// fraction on whichever tail converges fastest.
double regularized_incomplete_beta(double a, double b, double x);

/// Kolmogorov survival function Q(t) = P(K > t) = 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_survival(double t);

}  // namespace hetcp
