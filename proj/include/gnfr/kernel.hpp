#pragma once

#include "gnfr/distances.hpp"
#include "gnfr/objects.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace gnfr {

struct KernelSpec {
    enum class Kind { gaussian_rbf, laplacian, linear };

    Kind kind = Kind::gaussian_rbf;
    double gamma = 1.0;    // rbf/laplacian bandwidth
    double offset_c = 1.0; // linear kernel offset

    static KernelSpec gaussian_rbf(double gamma) {
        if (gamma <= 0.0) throw InvalidObjectError("KernelSpec: gamma must be positive");
        return {Kind::gaussian_rbf, gamma, 0.0};
    }
    static KernelSpec laplacian(double gamma) {
        if (gamma <= 0.0) throw InvalidObjectError("KernelSpec: gamma must be positive");
        return {Kind::laplacian, gamma, 0.0};
    }
    static KernelSpec linear(double offset = 1.0) { return {Kind::linear, 0.0, offset}; }
};

/// Kernel evaluation between metric objects. The linear kernel is defined for
/// Euclidean vectors only; rbf/laplacian go through the object distance.
inline double kernel_eval(const KernelSpec& spec, const MetricObject& x1, const MetricObject& x2) {
    if (spec.kind == KernelSpec::Kind::linear) {
        const auto* a = std::get_if<EuclideanVector>(&x1);
        const auto* b = std::get_if<EuclideanVector>(&x2);
        if (!a || !b)
            throw IncompatibleObjectsError("kernel_eval: linear kernel needs Euclidean vectors");
        if (a->coords.size() != b->coords.size())
            throw IncompatibleObjectsError("kernel_eval: euclidean dimensions differ");
        return spec.offset_c + a->coords.dot(b->coords);
    }
    double d = distance(x1, x2);
    if (spec.kind == KernelSpec::Kind::gaussian_rbf) return std::exp(-spec.gamma * d * d);
    return std::exp(-spec.gamma * d);
}

/// Median-free bandwidth rule gamma = 1 / (2 * mean pairwise squared
/// distance).
inline double bandwidth_heuristic(const std::vector<MetricObject>& objects) {
    const auto n = static_cast<Eigen::Index>(objects.size());
    if (n < 2) throw DegenerateSampleError("bandwidth_heuristic: need at least 2 objects");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = distance(objects[i], objects[j]);
            acc += d * d;
        }
    double mean_sq = acc / (0.5 * double(n) * double(n - 1));
    if (mean_sq <= 0.0)
        throw DegenerateSampleError("bandwidth_heuristic: all pairwise distances are zero");
    return 1.0 / (2.0 * mean_sq);
}

/// Kernel Gram system for a training sample: Gram matrix K, doubly centered
/// Gram G = QKQ with Q = I - 11'/n, and cached factorizations of the
/// Tikhonov-regularized matrices (K + eps I) and (G + eps I).
class GramSystem {
  public:
    GramSystem(std::vector<MetricObject> objects, KernelSpec spec, double epsilon)
        : objects_(std::move(objects)), spec_(spec) {
        const auto n = static_cast<Eigen::Index>(objects_.size());
        if (n < 2) throw DegenerateSampleError("GramSystem: need at least 2 objects");
        k_.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            k_(i, i) = kernel_eval(spec_, objects_[i], objects_[i]);
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double v = kernel_eval(spec_, objects_[i], objects_[j]);
                k_(i, j) = v;
                k_(j, i) = v;
            }
        }
        row_means_ = k_.rowwise().mean();
        // G = QKQ without forming Q
        Mat centered = k_.colwise() - row_means_;
        Vec col_means = centered.colwise().mean();
        g_ = centered.rowwise() - col_means.transpose();
        g_ = 0.5 * (g_ + g_.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> esk(k_, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Mat> esg(g_, Eigen::EigenvaluesOnly);
        if (esk.info() != Eigen::Success || esg.info() != Eigen::Success)
            throw InternalError("GramSystem: eigenvalue computation failed");
        double scale = std::max(1.0, k_.diagonal().maxCoeff());
        if (esk.eigenvalues().minCoeff() < -1e-8 * scale)
            throw InvalidObjectError("GramSystem: Gram matrix is not PSD");
        g_eigenvalues_ = esg.eigenvalues();
        set_epsilon(epsilon);
    }

    /// Cheap re-regularization reusing the assembled K, G and spectra.
    GramSystem with_epsilon(double epsilon) const {
        GramSystem out(*this);
        out.set_epsilon(epsilon);
        return out;
    }

    Eigen::Index size() const { return k_.rows(); }
    const std::vector<MetricObject>& objects() const { return objects_; }
    const KernelSpec& kernel() const { return spec_; }
    const Mat& gram() const { return k_; }
    const Mat& centered_gram() const { return g_; }
    const Vec& gram_row_means() const { return row_means_; }
    const Vec& centered_eigenvalues() const { return g_eigenvalues_; }
    double epsilon() const { return epsilon_; }

    Vec solve_k(const Vec& rhs) const { return k_solver_.solve(rhs); }
    Mat solve_k(const Mat& rhs) const { return k_solver_.solve(rhs); }
    Vec solve_g(const Vec& rhs) const { return g_solver_.solve(rhs); }
    Mat solve_g(const Mat& rhs) const { return g_solver_.solve(rhs); }

    /// tr[G (G + eps I)^{-1}] from the spectrum of G.
    double smoother_trace(double epsilon) const {
        double tr = 0.0;
        for (Eigen::Index i = 0; i < g_eigenvalues_.size(); ++i) {
            double lam = std::max(0.0, g_eigenvalues_[i]);
            tr += lam / (lam + epsilon);
        }
        return tr;
    }

  private:
    void set_epsilon(double epsilon) {
        if (epsilon <= 0.0) throw InvalidObjectError("GramSystem: epsilon must be positive");
        epsilon_ = epsilon;
        const Eigen::Index n = k_.rows();
        k_solver_.compute(k_ + epsilon * Mat::Identity(n, n));
        g_solver_.compute(g_ + epsilon * Mat::Identity(n, n));
        if (k_solver_.info() != Eigen::Success || g_solver_.info() != Eigen::Success)
            throw InternalError("GramSystem: factorization failed");
    }

    std::vector<MetricObject> objects_;
    KernelSpec spec_;
    Mat k_;
    Mat g_;
    Vec row_means_;
    Vec g_eigenvalues_;
    double epsilon_ = 0.0;
    Eigen::LDLT<Mat> k_solver_;
    Eigen::LDLT<Mat> g_solver_;
};

inline GramSystem build_gram(std::vector<MetricObject> objects, const KernelSpec& spec,
                             double epsilon) {
    return GramSystem(std::move(objects), spec, epsilon);
}

struct CrossVector {
    Vec k_x;  // kernel evaluations kappa(X_i, x)
    Vec d_x;  // k_x centered against the training mean embedding
};

/// Cross-kernel vector at a new point: d_x[i] = <kappa(., X_i), kappa(., x) -
/// mu_hat> = kappa(X_i, x) - mean_j kappa(X_i, X_j). At training points the
/// d_x columns reproduce KQ.
inline CrossVector cross_vector(const GramSystem& sys, const MetricObject& x) {
    const Eigen::Index n = sys.size();
    Vec k_x(n);
    for (Eigen::Index i = 0; i < n; ++i) k_x[i] = kernel_eval(sys.kernel(), sys.objects()[i], x);
    return {k_x, k_x - sys.gram_row_means()};
}

}  // namespace gnfr
