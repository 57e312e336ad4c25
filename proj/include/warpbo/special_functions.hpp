#pragma once

namespace warpbo {

// Gauss error function, absolute error <= 1e-12 on finite inputs.
// Power series for |x| <= 2, Lentz continued fraction for erfc beyond.
double erf(double x);

// Regularized lower incomplete gamma P(alpha, x) = gamma(alpha, x) / Gamma(alpha).
// Series expansion for x < alpha + 1, continued fraction for Q otherwise;
// relative error <= 1e-10. Throws std::domain_error for alpha <= 0 or x < 0.
double reg_lower_incomplete_gamma(double alpha, double x);

} // namespace warpbo
