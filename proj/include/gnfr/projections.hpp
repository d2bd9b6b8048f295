#pragma once

#include "gnfr/distances.hpp"
#include "gnfr/objects.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace gnfr {

struct ProjectionConfig {
    int max_iter = 1000;
    double tol = 1e-9;
    double psd_floor = 0.0;
};

/// L2 projection onto the nondecreasing cone (isotonic regression) by
/// pool-adjacent-violators. Idempotent; O(M).
inline Vec project_monotone(const Vec& v) {
    const Eigen::Index m = v.size();
    std::vector<double> level(m), weight(m);
    std::vector<Eigen::Index> count(m);
    Eigen::Index blocks = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!std::isfinite(v[i])) throw InvalidObjectError("project_monotone: non-finite entry");
        level[blocks] = v[i];
        weight[blocks] = 1.0;
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
            double w = weight[blocks - 2] + weight[blocks - 1];
            level[blocks - 2] =
                (level[blocks - 2] * weight[blocks - 2] + level[blocks - 1] * weight[blocks - 1]) /
                w;
            weight[blocks - 2] = w;
            count[blocks - 2] += count[blocks - 1];
            --blocks;
        }
    }
    Vec out(m);
    Eigen::Index pos = 0;
    for (Eigen::Index b = 0; b < blocks; ++b)
        for (Eigen::Index k = 0; k < count[b]; ++k) out[pos++] = level[b];
    return out;
}

/// Frobenius-nearest matrix with eigenvalues >= floor: symmetrize, clip the
/// spectrum, reconstruct.
inline Mat project_psd(const Mat& a, double floor = 0.0) {
    if (a.rows() != a.cols()) throw InvalidObjectError("project_psd: matrix not square");
    double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8) throw InvalidObjectError("project_psd: matrix asymmetric beyond tolerance");
    Mat s = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    if (es.info() != Eigen::Success) throw InternalError("project_psd: eigendecomposition failed");
    Vec lam = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// Nearest correlation matrix by alternating projections between the PSD cone
/// and the unit-diagonal affine set. Output has unit diagonal exactly.
inline Mat project_correlation(const Mat& a, const ProjectionConfig& cfg = {}) {
    if (a.rows() != a.cols()) throw InvalidObjectError("project_correlation: matrix not square");
    Mat x = 0.5 * (a + a.transpose());
    x.diagonal().setOnes();
    double change = 0.0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        Mat y = project_psd(x, 0.0);
        y.diagonal().setOnes();
        change = (y - x).norm();
        x = y;
        if (change < cfg.tol) {
            Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() >= -1e-8) return x;
        }
    }
    throw ConvergenceError("project_correlation: alternating projections did not converge",
                           cfg.max_iter, change);
}

/// Feasibility projection onto the graph-Laplacian set: cyclic enforcement of
/// symmetry, the off-diagonal box [-W, 0], and zero row sums via the diagonal.
inline LaplacianObject project_laplacian(const Mat& a, double weight_bound,
                                         const ProjectionConfig& cfg = {}) {
    if (a.rows() != a.cols()) throw InvalidObjectError("project_laplacian: matrix not square");
    if (weight_bound <= 0.0) throw InvalidObjectError("project_laplacian: weight bound must be > 0");
    Mat x = a;
    double change = 0.0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        Mat y = 0.5 * (x + x.transpose());
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            for (Eigen::Index j = 0; j < y.cols(); ++j) {
                if (i == j) continue;
                y(i, j) = std::min(0.0, std::max(-weight_bound, y(i, j)));
            }
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            double off = y.row(i).sum() - y(i, i);
            y(i, i) = -off;
        }
        change = (y - x).norm();
        x = y;
        if (change < cfg.tol) return LaplacianObject(x, weight_bound);
    }
    throw ConvergenceError("project_laplacian: did not converge", cfg.max_iter, change);
}

struct BarycenterResult {
    GaussianMeasure measure;
    bool weights_clipped;
    int iterations;
};

/// Wasserstein-2 barycenter of Gaussian measures with weights summing to n.
/// Negative weights are clipped to zero and the rest renormalized (flagged in
/// the result). Covariance via the standard fixed-point iteration
///   S <- S^{-1/2} (sum_i w_i (S^{1/2} S_i S^{1/2})^{1/2})^2 S^{-1/2}.
inline BarycenterResult gaussian_barycenter(const std::vector<GaussianMeasure>& measures,
                                            const Vec& weights,
                                            const ProjectionConfig& cfg = {}) {
    const auto n = static_cast<Eigen::Index>(measures.size());
    if (n == 0) throw DegenerateSampleError("gaussian_barycenter: no measures");
    if (weights.size() != n)
        throw IncompatibleObjectsError("gaussian_barycenter: weight/measure count mismatch");
    const Eigen::Index d = measures[0].dim();
    for (const auto& g : measures)
        if (g.dim() != d) throw IncompatibleObjectsError("gaussian_barycenter: dimensions differ");

    bool clipped = false;
    Vec w = weights;
    for (Eigen::Index i = 0; i < n; ++i)
        if (w[i] < 0.0) {
            w[i] = 0.0;
            clipped = true;
        }
    double total = w.sum();
    if (total <= 0.0)
        throw DegenerateSampleError("gaussian_barycenter: all weights clipped to zero");
    w /= total;

    Vec mean = Vec::Zero(d);
    Mat cov0 = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        mean += w[i] * measures[i].mean;
        cov0 += w[i] * measures[i].cov;
    }
    if (n == 1) return {GaussianMeasure(mean, measures[0].cov), clipped, 0};

    Mat cov = cov0 + 1e-12 * Mat::Identity(d, d);
    int it = 0;
    double change = 0.0;
    for (; it < cfg.max_iter; ++it) {
        Mat root = matrix_sqrt(cov);
        Eigen::SelfAdjointEigenSolver<Mat> es(cov);
        Vec inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        Mat root_inv = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
        Mat mid = Mat::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            mid += w[i] * matrix_sqrt(root * measures[i].cov * root);
        }
        Mat next = root_inv * mid * mid * root_inv;
        next = 0.5 * (next + next.transpose());
        change = (next - cov).norm();
        cov = next;
        if (change < cfg.tol) break;
    }
    if (it == cfg.max_iter)
        throw ConvergenceError("gaussian_barycenter: fixed point did not converge", it, change);
    return {GaussianMeasure(mean, project_psd(cov, 0.0)), clipped, it + 1};
}

/// Half-vectorization of the strict upper triangle, row-major.
inline Vec vech(const Mat& a) {
    if (a.rows() != a.cols()) throw InvalidObjectError("vech: matrix not square");
    const Eigen::Index r = a.rows();
    Vec out(r * (r - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = i + 1; j < r; ++j) out[k++] = a(i, j);
    return out;
}

/// Inverse half-vectorization onto the centered symmetric matrices: entries
/// are placed symmetrically off-diagonal and the diagonal is set to the
/// negative off-diagonal row sum, so row sums are zero.
inline Mat vech_inverse(const Vec& v) {
    const auto len = v.size();
    auto r = static_cast<Eigen::Index>(std::round(0.5 * (1.0 + std::sqrt(1.0 + 8.0 * double(len)))));
    if (r * (r - 1) / 2 != len)
        throw InvalidObjectError("vech_inverse: length is not a triangular number");
    Mat out = Mat::Zero(r, r);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = i + 1; j < r; ++j) {
            out(i, j) = v[k];
            out(j, i) = v[k];
            ++k;
        }
    for (Eigen::Index i = 0; i < r; ++i) {
        double off = out.row(i).sum();
        out(i, i) = -off;
    }
    return out;
}

}  // namespace gnfr
