#pragma once

#include "gnfr/common.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gnfr {

/// Probability grid on which quantile functions are sampled: strictly
/// increasing interior points of (0,1).
class ProbGrid {
  public:
    explicit ProbGrid(Vec points) : points_(std::move(points)) { validate(); }

    /// Equispaced interior grid u_j = j/(M+1), j = 1..M.
    static ProbGrid equispaced(int m) {
        if (m < 2) throw InvalidObjectError("ProbGrid: need at least 2 points");
        Vec u(m);
        for (int j = 0; j < m; ++j) u[j] = double(j + 1) / double(m + 1);
        return ProbGrid(u);
    }

    const Vec& points() const { return points_; }
    Eigen::Index size() const { return points_.size(); }

    bool operator==(const ProbGrid& other) const {
        return points_.size() == other.points_.size() && points_ == other.points_;
    }

  private:
    void validate() const {
        if (points_.size() < 2) throw InvalidObjectError("ProbGrid: need at least 2 points");
        if (points_[0] <= 0.0 || points_[points_.size() - 1] >= 1.0)
            throw InvalidObjectError("ProbGrid: points must lie strictly inside (0,1)");
        for (Eigen::Index j = 1; j < points_.size(); ++j)
            if (points_[j] <= points_[j - 1])
                throw InvalidObjectError("ProbGrid: points must be strictly increasing");
    }

    Vec points_;
};

inline constexpr int kDefaultGridSize = 100;

/// 1-D distribution represented by samples of its quantile function on a ProbGrid.
struct QuantileObject {
    ProbGrid grid;
    Vec values;

    QuantileObject(ProbGrid g, Vec v) : grid(std::move(g)), values(std::move(v)) { validate(); }

    void validate() const {
        if (values.size() != grid.size())
            throw InvalidObjectError("QuantileObject: values/grid length mismatch");
        for (Eigen::Index j = 0; j < values.size(); ++j) {
            if (!std::isfinite(values[j]))
                throw InvalidObjectError("QuantileObject: non-finite value");
            if (j > 0 && values[j] < values[j - 1])
                throw InvalidObjectError("QuantileObject: values must be nondecreasing");
        }
    }
};

/// Gaussian measure N(mean, cov) with a symmetric PSD covariance.
struct GaussianMeasure {
    Vec mean;
    Mat cov;

    GaussianMeasure(Vec m, Mat c) : mean(std::move(m)), cov(std::move(c)) { validate(); }

    Eigen::Index dim() const { return mean.size(); }

    void validate() const {
        if (cov.rows() != cov.cols() || cov.rows() != mean.size())
            throw InvalidObjectError("GaussianMeasure: dimension mismatch");
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw InvalidObjectError("GaussianMeasure: covariance not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(cov, Eigen::EigenvaluesOnly);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-10 * scale)
            throw InvalidObjectError("GaussianMeasure: covariance not PSD");
    }
};

/// Symmetric positive semi-definite matrix object.
struct SpdObject {
    Mat mat;

    explicit SpdObject(Mat m) : mat(std::move(m)) { validate(); }

    void validate() const {
        if (mat.rows() != mat.cols()) throw InvalidObjectError("SpdObject: matrix not square");
        double sym_scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
        if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sym_scale)
            throw InvalidObjectError("SpdObject: matrix not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(mat, Eigen::EigenvaluesOnly);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-8 * scale)
            throw InvalidObjectError("SpdObject: matrix not PSD");
    }
};

/// Graph Laplacian: symmetric, zero row sums, off-diagonals in [-W, 0].
struct LaplacianObject {
    Mat mat;
    double weight_bound;

    explicit LaplacianObject(Mat m, double bound = 1.0)
        : mat(std::move(m)), weight_bound(bound) {
        validate();
    }

    void validate() const {
        if (mat.rows() != mat.cols()) throw InvalidObjectError("LaplacianObject: matrix not square");
        if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > 1e-8)
            throw InvalidObjectError("LaplacianObject: matrix not symmetric");
        if ((mat.rowwise().sum()).cwiseAbs().maxCoeff() > 1e-8)
            throw InvalidObjectError("LaplacianObject: row sums not zero");
        for (Eigen::Index i = 0; i < mat.rows(); ++i)
            for (Eigen::Index j = 0; j < mat.cols(); ++j) {
                if (i == j) continue;
                if (mat(i, j) > 1e-10 || mat(i, j) < -weight_bound - 1e-10)
                    throw InvalidObjectError("LaplacianObject: off-diagonal outside [-W, 0]");
            }
    }
};

/// Function observed at (possibly sparse, irregular) time points in [0,1].
struct SampledFunction {
    Vec times;
    Vec values;

    SampledFunction(Vec t, Vec v) : times(std::move(t)), values(std::move(v)) { validate(); }

    void validate() const {
        if (times.size() != values.size())
            throw InvalidObjectError("SampledFunction: times/values length mismatch");
        if (times.size() < 2) throw InvalidObjectError("SampledFunction: need at least 2 points");
        for (Eigen::Index j = 0; j < times.size(); ++j) {
            if (times[j] < 0.0 || times[j] > 1.0)
                throw InvalidObjectError("SampledFunction: times must lie in [0,1]");
            if (j > 0 && times[j] <= times[j - 1])
                throw InvalidObjectError("SampledFunction: times must be strictly increasing");
        }
    }
};

struct EuclideanVector {
    Vec coords;

    explicit EuclideanVector(Vec c) : coords(std::move(c)) {
        if (coords.size() < 1) throw InvalidObjectError("EuclideanVector: empty");
    }
};

/// Tagged union over the supported object kinds. Distances are defined only
/// between objects of the same kind with compatible dimensions/grids.
using MetricObject = std::variant<EuclideanVector, QuantileObject, GaussianMeasure, SpdObject,
                                  LaplacianObject, SampledFunction>;

inline std::string kind_name(const MetricObject& obj) {
    struct Namer {
        std::string operator()(const EuclideanVector&) const { return "euclidean"; }
        std::string operator()(const QuantileObject&) const { return "quantile"; }
        std::string operator()(const GaussianMeasure&) const { return "gaussian"; }
        std::string operator()(const SpdObject&) const { return "spd"; }
        std::string operator()(const LaplacianObject&) const { return "laplacian"; }
        std::string operator()(const SampledFunction&) const { return "function"; }
    };
    return std::visit(Namer{}, obj);
}

inline void validate(const MetricObject& obj) {
    std::visit(
        [](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (!std::is_same_v<T, EuclideanVector>) o.validate();
        },
        obj);
}

}  // namespace gnfr
