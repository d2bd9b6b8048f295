#pragma once

#include "gnfr/objects.hpp"
#include "gnfr/random.hpp"
#include "gnfr/special.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace gnfr {

/// Symmetric matrix square root by eigendecomposition; eigenvalues are
/// clipped at zero before the square root.
inline Mat matrix_sqrt(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success) throw InternalError("matrix_sqrt: eigendecomposition failed");
    Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// Matrix exponential of a symmetric matrix via its spectral decomposition.
inline Mat matrix_exp_sym(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success)
        throw InternalError("matrix_exp_sym: eigendecomposition failed");
    Vec lam = es.eigenvalues().array().exp();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// Trapezoidal integral of g over the grid, extended with flat values to the
/// boundary mass [0, u_1] and [u_M, 1].
inline double grid_integral(const Vec& g, const ProbGrid& grid) {
    const Vec& u = grid.points();
    const Eigen::Index m = u.size();
    double total = g[0] * u[0] + g[m - 1] * (1.0 - u[m - 1]);
    for (Eigen::Index j = 1; j < m; ++j)
        total += 0.5 * (g[j] + g[j - 1]) * (u[j] - u[j - 1]);
    return total;
}

/// Wasserstein-2 distance between 1-D distributions as the L2 distance of
/// their quantile functions on a shared grid.
inline double wasserstein2_quantile(const QuantileObject& a, const QuantileObject& b) {
    if (!(a.grid == b.grid))
        throw IncompatibleObjectsError("wasserstein2_quantile: grids differ");
    Vec g = (a.values - b.values).array().square();
    return std::sqrt(std::max(0.0, grid_integral(g, a.grid)));
}

/// Closed-form Wasserstein-2 distance between Gaussian measures.
inline double wasserstein2_gaussian(const GaussianMeasure& a, const GaussianMeasure& b) {
    if (a.dim() != b.dim())
        throw IncompatibleObjectsError("wasserstein2_gaussian: dimensions differ");
    Mat ra = matrix_sqrt(a.cov);
    Mat rb = matrix_sqrt(b.cov);
    double d2 = (a.mean - b.mean).squaredNorm() + (ra - rb).squaredNorm();
    return std::sqrt(std::max(0.0, d2));
}

inline double frobenius(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw IncompatibleObjectsError("frobenius: shapes differ");
    return (a - b).norm();
}

/// Uniform direction on S^{d-1}.
inline Vec draw_direction(Rng& rng, Eigen::Index d) {
    Vec v(d);
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < d; ++i) v[i] = draw_normal(rng);
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

/// Monte Carlo sliced Wasserstein-2 distance between equal-size point clouds
/// (columns are points): squared 1-D empirical W2 of the projections,
/// averaged over L uniform directions.
inline double sliced_wasserstein2_mc(const Mat& a, const Mat& b, int directions, Rng& rng) {
    if (a.rows() != b.rows()) throw IncompatibleObjectsError("sliced_wasserstein2_mc: dims differ");
    if (a.cols() != b.cols())
        throw IncompatibleObjectsError("sliced_wasserstein2_mc: cloud sizes differ");
    if (a.cols() < 1) throw InvalidObjectError("sliced_wasserstein2_mc: empty clouds");
    if (a.rows() < 2) throw InvalidObjectError("sliced_wasserstein2_mc: need dimension >= 2");
    if (directions < 1) throw InvalidObjectError("sliced_wasserstein2_mc: need L >= 1");
    const Eigen::Index m = a.cols();
    std::vector<double> pa(m), pb(m);
    double acc = 0.0;
    for (int l = 0; l < directions; ++l) {
        Vec theta = draw_direction(rng, a.rows());
        for (Eigen::Index j = 0; j < m; ++j) {
            pa[j] = theta.dot(a.col(j));
            pb[j] = theta.dot(b.col(j));
        }
        std::sort(pa.begin(), pa.end());
        std::sort(pb.begin(), pb.end());
        double w2sq = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            double diff = pa[j] - pb[j];
            w2sq += diff * diff;
        }
        acc += w2sq / double(m);
    }
    return std::sqrt(acc / double(directions));
}

/// Sliced Wasserstein-2 between Gaussian measures: exact 1-D Gaussian W2 per
/// Monte Carlo direction (projections of Gaussians are Gaussian).
inline double sliced_wasserstein2_gaussian_mc(const GaussianMeasure& a, const GaussianMeasure& b,
                                              int directions, Rng& rng) {
    if (a.dim() != b.dim())
        throw IncompatibleObjectsError("sliced_wasserstein2_gaussian_mc: dims differ");
    double acc = 0.0;
    for (int l = 0; l < directions; ++l) {
        Vec theta = draw_direction(rng, a.dim());
        double dm = theta.dot(a.mean - b.mean);
        double sa = std::sqrt(std::max(0.0, double(theta.dot(a.cov * theta))));
        double sb = std::sqrt(std::max(0.0, double(theta.dot(b.cov * theta))));
        acc += dm * dm + (sa - sb) * (sa - sb);
    }
    return std::sqrt(acc / double(directions));
}

/// Hellinger-type affinity distance between Beta(a1,b1) and Beta(a2,b2):
/// 1 - B((a1+a2)/2,(b1+b2)/2) / sqrt(B(a1,b1) B(a2,b2)).
inline double hellinger_beta(double a1, double b1, double a2, double b2) {
    if (a1 <= 0 || b1 <= 0 || a2 <= 0 || b2 <= 0)
        throw InvalidObjectError("hellinger_beta: parameters must be positive");
    double log_num = log_beta(0.5 * (a1 + a2), 0.5 * (b1 + b2));
    double log_den = 0.5 * (log_beta(a1, b1) + log_beta(a2, b2));
    return 1.0 - std::exp(log_num - log_den);
}

namespace detail {
/// Piecewise-linear evaluation with flat extrapolation outside [t_0, t_last].
inline double interp_flat(const Vec& t, const Vec& v, double x) {
    if (x <= t[0]) return v[0];
    const Eigen::Index n = t.size();
    if (x >= t[n - 1]) return v[n - 1];
    // binary search for the segment containing x
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        Eigen::Index mid = (lo + hi) / 2;
        if (t[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    double w = (x - t[lo]) / (t[hi] - t[lo]);
    return v[lo] + w * (v[hi] - v[lo]);
}
}  // namespace detail

/// L2 distance between sampled functions: both are linearly interpolated onto
/// a common equispaced grid on [0,1] (flat beyond the observed range) and the
/// trapezoidal L2 norm of the difference is returned.
inline double l2_function_distance(const SampledFunction& a, const SampledFunction& b,
                                   int grid_size = kDefaultGridSize) {
    if (grid_size < 2) throw InvalidObjectError("l2_function_distance: grid too small");
    double acc = 0.0;
    double prev = 0.0;
    double h = 1.0 / double(grid_size - 1);
    for (int j = 0; j < grid_size; ++j) {
        double t = double(j) * h;
        double diff = detail::interp_flat(a.times, a.values, t) -
                      detail::interp_flat(b.times, b.values, t);
        double sq = diff * diff;
        if (j > 0) acc += 0.5 * (sq + prev) * h;
        prev = sq;
    }
    return std::sqrt(acc);
}

/// Empirical quantile function of a sample evaluated on a grid, with linear
/// interpolation between order statistics. Output is monotone by construction.
inline QuantileObject empirical_quantiles(const std::vector<double>& samples,
                                          const ProbGrid& grid) {
    if (samples.size() < 2) throw DegenerateSampleError("empirical_quantiles: need >= 2 samples");
    std::vector<double> sorted(samples);
    for (double s : sorted)
        if (!std::isfinite(s)) throw InvalidObjectError("empirical_quantiles: non-finite sample");
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<Eigen::Index>(sorted.size());
    Vec out(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        double pos = grid.points()[j] * double(n - 1);
        auto k = static_cast<Eigen::Index>(std::floor(pos));
        auto k2 = std::min(k + 1, n - 1);
        double frac = pos - double(k);
        out[j] = sorted[k] * (1.0 - frac) + sorted[k2] * frac;
        if (j > 0 && out[j] < out[j - 1]) out[j] = out[j - 1];  // interpolation rounding
    }
    return QuantileObject(grid, out);
}

/// Distance between objects of the same kind; throws IncompatibleObjectsError
/// across kinds. Randomized kinds (point clouds) are not in the union, so all
/// cases here are deterministic.
inline double distance(const MetricObject& a, const MetricObject& b,
                       int function_grid_size = kDefaultGridSize) {
    if (a.index() != b.index())
        throw IncompatibleObjectsError("distance: objects of different kinds: " + kind_name(a) +
                                       " vs " + kind_name(b));
    struct Visitor {
        const MetricObject& other;
        int fgrid;
        double operator()(const EuclideanVector& x) const {
            const auto& y = std::get<EuclideanVector>(other);
            if (x.coords.size() != y.coords.size())
                throw IncompatibleObjectsError("distance: euclidean dimensions differ");
            return (x.coords - y.coords).norm();
        }
        double operator()(const QuantileObject& x) const {
            return wasserstein2_quantile(x, std::get<QuantileObject>(other));
        }
        double operator()(const GaussianMeasure& x) const {
            return wasserstein2_gaussian(x, std::get<GaussianMeasure>(other));
        }
        double operator()(const SpdObject& x) const {
            return frobenius(x.mat, std::get<SpdObject>(other).mat);
        }
        double operator()(const LaplacianObject& x) const {
            return frobenius(x.mat, std::get<LaplacianObject>(other).mat);
        }
        double operator()(const SampledFunction& x) const {
            return l2_function_distance(x, std::get<SampledFunction>(other), fgrid);
        }
    };
    return std::visit(Visitor{b, function_grid_size}, a);
}

}  // namespace gnfr
