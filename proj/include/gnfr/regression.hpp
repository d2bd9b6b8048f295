#pragma once

#include "gnfr/kernel.hpp"
#include "gnfr/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace gnfr {

struct WeightVector {
    Vec w;
};

struct GlfrWeights {
    Vec w;
};

struct FitOptions {
    ProjectionConfig projection;
    double laplacian_bound = 1.0;
};

/// Trained regression state: predictor Gram system plus the responses (all of
/// one kind). Immutable after construction; all queries are const.
class FittedModel {
  public:
    FittedModel(GramSystem gram, std::vector<MetricObject> responses, FitOptions options = {})
        : gram_(std::move(gram)), responses_(std::move(responses)), options_(options) {
        if (static_cast<Eigen::Index>(responses_.size()) != gram_.size())
            throw IncompatibleObjectsError("FittedModel: responses length != sample size");
        for (const auto& y : responses_) {
            validate(y);
            (void)distance(responses_.front(), y);  // enforces one kind + compatible dims/grids
        }
    }

    const GramSystem& gram() const { return gram_; }
    const std::vector<MetricObject>& responses() const { return responses_; }
    const FitOptions& options() const { return options_; }
    Eigen::Index size() const { return gram_.size(); }
    double epsilon() const { return gram_.epsilon(); }

  private:
    GramSystem gram_;
    std::vector<MetricObject> responses_;
    FitOptions options_;
};

inline FittedModel fit(std::vector<MetricObject> predictors, std::vector<MetricObject> responses,
                       const KernelSpec& spec, double epsilon, FitOptions options = {}) {
    return FittedModel(build_gram(std::move(predictors), spec, epsilon), std::move(responses),
                       options);
}

namespace detail {
/// Weights from a centered cross vector: w = 1 + n G (G+eps)^{-1} Q (K+eps)^{-1} d_x.
inline Vec weights_from_cross(const GramSystem& sys, const Vec& d_x) {
    const Eigen::Index n = sys.size();
    Vec t = sys.solve_k(d_x);
    Vec c_x = t.array() - t.mean();
    Vec s = sys.solve_g(c_x);
    return Vec::Ones(n) + double(n) * (sys.centered_gram() * s);
}

/// Same, for a batch of query points (columns of d-matrix).
inline Mat weights_from_cross(const GramSystem& sys, const Mat& d_cols) {
    const Eigen::Index n = sys.size();
    Mat t = sys.solve_k(d_cols);
    Mat c = t.rowwise() - t.colwise().mean();
    Mat s = sys.solve_g(c);
    return Mat::Ones(n, d_cols.cols()) + double(n) * (sys.centered_gram() * s);
}
}  // namespace detail

/// Nonlinear weights at a query point, such that the empirical objective is
/// J_n(y) = (1/n) sum_i w_i d^2(Y_i, y). mean(w) = 1.
inline WeightVector weights_at(const FittedModel& model, const MetricObject& x) {
    CrossVector cross = cross_vector(model.gram(), x);
    return {detail::weights_from_cross(model.gram(), cross.d_x)};
}

/// Global-linear weights w_i = 1 + (x - xbar)' Sigma^{-1} (X_i - xbar) with
/// the 1/n-normalized empirical covariance.
inline GlfrWeights glfr_weights(const Mat& x_data, const Vec& x) {
    const Eigen::Index n = x_data.rows();
    const Eigen::Index p = x_data.cols();
    if (x.size() != p) throw IncompatibleObjectsError("glfr_weights: dimension mismatch");
    if (n < 2) throw DegenerateSampleError("glfr_weights: need at least 2 rows");
    Vec xbar = x_data.colwise().mean();
    Mat centered = x_data.rowwise() - xbar.transpose();
    Mat sigma = centered.transpose() * centered / double(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    if (es.info() != Eigen::Success) throw InternalError("glfr_weights: eigensolver failed");
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > 1e12)
        throw DegenerateSampleError("glfr_weights: empirical covariance is singular");
    Vec dir = es.eigenvectors() *
              (es.eigenvalues().cwiseInverse().asDiagonal() *
               (es.eigenvectors().transpose() * (x - xbar)));
    return {Vec::Ones(n) + centered * dir};
}

namespace detail {
inline const ProbGrid& response_grid(const std::vector<MetricObject>& responses) {
    return std::get<QuantileObject>(responses.front()).grid;
}

/// Weighted response average + projection onto the valid set, per kind.
inline MetricObject predict_from_weights(const FittedModel& model, const Vec& w) {
    const auto& responses = model.responses();
    const auto n = static_cast<Eigen::Index>(responses.size());
    const MetricObject& first = responses.front();
    const ProjectionConfig& cfg = model.options().projection;

    if (std::holds_alternative<QuantileObject>(first)) {
        const ProbGrid& grid = response_grid(responses);
        Vec avg = Vec::Zero(grid.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& q = std::get<QuantileObject>(responses[i]);
            if (!(q.grid == grid))
                throw IncompatibleObjectsError("predict: response grids differ");
            avg += w[i] * q.values;
        }
        avg /= double(n);
        return QuantileObject(grid, project_monotone(avg));
    }
    if (std::holds_alternative<SpdObject>(first)) {
        const auto& m0 = std::get<SpdObject>(first).mat;
        Mat avg = Mat::Zero(m0.rows(), m0.cols());
        for (Eigen::Index i = 0; i < n; ++i)
            avg += w[i] * std::get<SpdObject>(responses[i]).mat;
        avg /= double(n);
        return SpdObject(project_psd(avg, cfg.psd_floor));
    }
    if (std::holds_alternative<LaplacianObject>(first)) {
        const auto& m0 = std::get<LaplacianObject>(first).mat;
        Mat avg = Mat::Zero(m0.rows(), m0.cols());
        for (Eigen::Index i = 0; i < n; ++i)
            avg += w[i] * std::get<LaplacianObject>(responses[i]).mat;
        avg /= double(n);
        return project_laplacian(avg, model.options().laplacian_bound, cfg);
    }
    if (std::holds_alternative<GaussianMeasure>(first)) {
        std::vector<GaussianMeasure> measures;
        measures.reserve(n);
        for (Eigen::Index i = 0; i < n; ++i)
            measures.push_back(std::get<GaussianMeasure>(responses[i]));
        return gaussian_barycenter(measures, w, cfg).measure;
    }
    if (std::holds_alternative<EuclideanVector>(first)) {
        Vec avg = Vec::Zero(std::get<EuclideanVector>(first).coords.size());
        for (Eigen::Index i = 0; i < n; ++i)
            avg += w[i] * std::get<EuclideanVector>(responses[i]).coords;
        return EuclideanVector(avg / double(n));
    }
    throw IncompatibleObjectsError("predict: unsupported response kind " + kind_name(first));
}
}  // namespace detail

/// Weighted Frechet mean estimate at a query predictor.
inline MetricObject predict(const FittedModel& model, const MetricObject& x) {
    WeightVector wv = weights_at(model, x);
    return detail::predict_from_weights(model, wv.w);
}

/// Fitted values at all training predictors (shared factorization work).
inline std::vector<MetricObject> predict_at_training(const FittedModel& model) {
    const GramSystem& sys = model.gram();
    const Eigen::Index n = sys.size();
    Mat d_cols = sys.gram().colwise() - sys.gram_row_means();  // = KQ
    Mat w_all = detail::weights_from_cross(sys, d_cols);
    std::vector<MetricObject> out;
    out.reserve(n);
    for (Eigen::Index j = 0; j < n; ++j)
        out.push_back(detail::predict_from_weights(model, w_all.col(j)));
    return out;
}

/// Empirical objective J_n(y) = (1/n) sum_i w_i d^2(Y_i, y) at a query point.
inline double objective_value(const FittedModel& model, const MetricObject& x,
                              const MetricObject& y) {
    if (y.index() != model.responses().front().index())
        throw IncompatibleObjectsError("objective_value: y kind differs from responses");
    WeightVector wv = weights_at(model, x);
    const Eigen::Index n = model.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = distance(model.responses()[i], y);
        acc += wv.w[i] * d * d;
    }
    return acc / double(n);
}

/// Matrix form (1/n) h'1 + h' G (G+eps)^{-1} c_x of the same objective; used
/// for consistency diagnostics.
inline double objective_value_matrix_form(const FittedModel& model, const MetricObject& x,
                                          const MetricObject& y) {
    const GramSystem& sys = model.gram();
    const Eigen::Index n = sys.size();
    Vec h(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = distance(model.responses()[i], y);
        h[i] = d * d;
    }
    CrossVector cross = cross_vector(sys, x);
    Vec t = sys.solve_k(cross.d_x);
    Vec c_x = t.array() - t.mean();
    return h.mean() + h.dot(sys.centered_gram() * sys.solve_g(c_x));
}

struct GcvEntry {
    double epsilon;
    double gcv;
    double trace_term;    // tr[QG(G+eps)^-1 + 11'/n]
    double denominator;   // (1 - trace_term/n)^2
    bool finite;
};

struct GcvResult {
    double best_epsilon;
    std::vector<GcvEntry> table;
};

inline std::vector<double> default_epsilon_grid() {
    return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
}

inline constexpr double kDefaultEpsilon = 1e-3;

/// Generalized cross-validation over an epsilon grid: for each candidate the
/// model is fit on the full sample and scored by
///   GCV(eps) = (1/n) sum_i d^2(Y_i, Yhat_i) / (1 - tr[QG(G+eps)^-1 + 11'/n]/n)^2.
/// Candidates with nonpositive denominator score infinity.
inline GcvResult gcv_tune(const std::vector<MetricObject>& predictors,
                          const std::vector<MetricObject>& responses, const KernelSpec& spec,
                          std::vector<double> grid = default_epsilon_grid(),
                          FitOptions options = {}) {
    if (grid.empty()) throw InvalidObjectError("gcv_tune: empty epsilon grid");
    for (double e : grid)
        if (e <= 0.0) throw InvalidObjectError("gcv_tune: epsilon must be positive");
    std::sort(grid.begin(), grid.end());

    GramSystem base = build_gram(predictors, spec, grid.front());
    const auto n = static_cast<Eigen::Index>(predictors.size());
    GcvResult result{grid.front(), {}};
    double best = std::numeric_limits<double>::infinity();
    bool any_finite = false;

    for (double eps : grid) {
        GramSystem sys = (eps == grid.front()) ? base : base.with_epsilon(eps);
        double trace_term = sys.smoother_trace(eps) + 1.0;
        double denom_root = 1.0 - trace_term / double(n);
        GcvEntry entry{eps, std::numeric_limits<double>::infinity(), trace_term,
                       denom_root * denom_root, false};
        if (denom_root > 0.0) {
            FittedModel model(sys, responses, options);
            std::vector<MetricObject> fitted = predict_at_training(model);
            double sse = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double d = distance(responses[i], fitted[i]);
                sse += d * d;
            }
            entry.gcv = (sse / double(n)) / entry.denominator;
            entry.finite = true;
            any_finite = true;
            if (entry.gcv < best) {
                best = entry.gcv;
                result.best_epsilon = eps;
            }
        }
        result.table.push_back(entry);
    }
    if (!any_finite)
        throw DegenerateSampleError("gcv_tune: no epsilon in the grid has a valid denominator");
    return result;
}

}  // namespace gnfr
