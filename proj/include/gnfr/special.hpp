#pragma once

#include "gnfr/common.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace gnfr {

/// Standard normal quantile Phi^{-1}(u), u in (0,1).
inline double normal_quantile(double u) {
    static const boost::math::normal_distribution<double> std_normal;
    return boost::math::quantile(std_normal, u);
}

inline double normal_cdf(double x) {
    static const boost::math::normal_distribution<double> std_normal;
    return boost::math::cdf(std_normal, x);
}

/// Beta(a,b) quantile via the inverse regularized incomplete beta function.
inline double beta_quantile(double u, double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw InvalidObjectError("beta_quantile: parameters must be positive");
    return boost::math::ibeta_inv(a, b, u);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Regularized lower incomplete gamma P(shape, rate*x) — the Gamma(shape, rate) CDF.
inline double gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(shape, rate * x);
}

inline double gamma_quantile(double u, double shape, double rate) {
    return boost::math::gamma_p_inv(shape, u) / rate;
}

}  // namespace gnfr
