#pragma once

#include "gnfr/special.hpp"

#include <cstdint>
#include <random>

namespace gnfr {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic substream: mixes (seed, stream) so replicates are
/// independent of evaluation order.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + stream;
    std::uint64_t a = detail::splitmix64(s);
    std::uint64_t b = detail::splitmix64(s);
    return Rng(a ^ (b << 1));
}

inline double draw_normal(Rng& rng, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    return d(rng);
}

inline double draw_uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

inline double draw_gamma(Rng& rng, double shape, double scale) {
    std::gamma_distribution<double> d(shape, scale);
    return d(rng);
}

inline double draw_beta(Rng& rng, double a, double b) {
    double x = draw_gamma(rng, a, 1.0);
    double y = draw_gamma(rng, b, 1.0);
    double s = x + y;
    if (s <= 0.0) return 0.5;  // both gammas underflowed; a,b tiny
    return x / s;
}

/// Truncated Gamma(shape, rate) on (lo, hi) by inverse-CDF sampling.
inline double draw_truncated_gamma(Rng& rng, double shape, double rate, double lo, double hi) {
    double flo = gamma_cdf(lo, shape, rate);
    double fhi = gamma_cdf(hi, shape, rate);
    if (fhi <= flo) return lo;  // all mass below the window
    double u = draw_uniform(rng, flo, fhi);
    double x = gamma_quantile(u, shape, rate);
    return std::min(std::max(x, lo), hi);
}

}  // namespace gnfr
