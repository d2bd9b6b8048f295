#pragma once

#include "gnfr/regression.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace gnfr {

/// Monotone 1-D transport map sampled at response-domain abscissae.
struct TransportMap {
    Vec abscissae;
    Vec values;
};

namespace detail {

/// Left-continuous inverse of a gridded quantile function: smallest u with
/// Q(u) >= a, linearly interpolated; clamped to the grid range.
inline double quantile_inverse(const QuantileObject& q, double a) {
    const Vec& u = q.grid.points();
    const Vec& v = q.values;
    const Eigen::Index m = v.size();
    if (a <= v[0]) return u[0];
    if (a > v[m - 1]) return u[m - 1];
    const double* begin = v.data();
    const double* it = std::lower_bound(begin, begin + m, a);
    Eigen::Index j = it - begin;  // first index with v[j] >= a, j >= 1 here
    if (v[j] > v[j - 1])
        return u[j - 1] + (a - v[j - 1]) / (v[j] - v[j - 1]) * (u[j] - u[j - 1]);
    return u[j];
}

/// Quantile function evaluated at probability t by linear interpolation.
inline double quantile_at(const QuantileObject& q, double t) {
    const Vec& u = q.grid.points();
    const Vec& v = q.values;
    const Eigen::Index m = v.size();
    if (t <= u[0]) return v[0];
    if (t >= u[m - 1]) return v[m - 1];
    Eigen::Index lo = 0, hi = m - 1;
    while (hi - lo > 1) {
        Eigen::Index mid = (lo + hi) / 2;
        if (u[mid] <= t)
            lo = mid;
        else
            hi = mid;
    }
    double w = (t - u[lo]) / (u[hi] - u[lo]);
    return v[lo] + w * (v[hi] - v[lo]);
}

}  // namespace detail

/// Optimal transport map from the observed to the fitted 1-D distribution,
/// T = Q_fitted o F_observed, evaluated on the given abscissae. Outside the
/// observed support the map continues with slope one from the boundary
/// transport (so identical distributions give the identity on the whole
/// line, not only on their support).
inline TransportMap residual_map(const QuantileObject& observed, const QuantileObject& fitted,
                                 const Vec& abscissae) {
    if (!(observed.grid == fitted.grid))
        throw IncompatibleObjectsError("residual_map: grids differ");
    const Eigen::Index m = observed.values.size();
    const double obs_lo = observed.values[0];
    const double obs_hi = observed.values[m - 1];
    const double shift_lo = fitted.values[0] - obs_lo;
    const double shift_hi = fitted.values[m - 1] - obs_hi;
    Vec out(abscissae.size());
    for (Eigen::Index i = 0; i < abscissae.size(); ++i) {
        double a = abscissae[i];
        if (a <= obs_lo)
            out[i] = a + shift_lo;
        else if (a >= obs_hi)
            out[i] = a + shift_hi;
        else
            out[i] = detail::quantile_at(fitted, detail::quantile_inverse(observed, a));
        if (i > 0 && out[i] < out[i - 1]) out[i] = out[i - 1];
    }
    return {abscissae, out};
}

/// Equispaced abscissae spanning the pooled range of the observed quantiles.
inline Vec transport_abscissae(const std::vector<MetricObject>& quantile_objects, int count = 200) {
    if (count < 2) throw InvalidObjectError("transport_abscissae: need at least 2 points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& obj : quantile_objects) {
        const auto& q = std::get<QuantileObject>(obj);
        lo = std::min(lo, q.values[0]);
        hi = std::max(hi, q.values[q.values.size() - 1]);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    Vec out(count);
    for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * double(i) / double(count - 1);
    return out;
}

struct LooResult {
    std::vector<MetricObject> predictions;
    Vec distances;               // response-space distance per held-out subject
    std::vector<double> epsilons;  // epsilon used per fold
};

/// Leave-one-out prediction: for each subject, fit on the other n-1 pairs and
/// predict at the held-out predictor. epsilon == nullopt re-tunes GCV per fold.
inline LooResult loo_predict(const std::vector<MetricObject>& predictors,
                             const std::vector<MetricObject>& responses, const KernelSpec& spec,
                             std::optional<double> epsilon, FitOptions options = {}) {
    const auto n = static_cast<Eigen::Index>(predictors.size());
    if (n < 3) throw DegenerateSampleError("loo_predict: need at least 3 subjects");
    if (static_cast<Eigen::Index>(responses.size()) != n)
        throw IncompatibleObjectsError("loo_predict: predictor/response count mismatch");

    LooResult result;
    result.predictions.reserve(n);
    result.distances.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<MetricObject> fold_x, fold_y;
        fold_x.reserve(n - 1);
        fold_y.reserve(n - 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            fold_x.push_back(predictors[j]);
            fold_y.push_back(responses[j]);
        }
        try {
            double eps = epsilon ? *epsilon
                                 : gcv_tune(fold_x, fold_y, spec, default_epsilon_grid(), options)
                                       .best_epsilon;
            FittedModel model = fit(std::move(fold_x), std::move(fold_y), spec, eps, options);
            MetricObject pred = predict(model, predictors[i]);
            result.distances[i] = distance(responses[i], pred);
            result.predictions.push_back(std::move(pred));
            result.epsilons.push_back(eps);
        } catch (const std::exception& e) {
            throw InternalError("loo_predict: subject " + std::to_string(i) + ": " + e.what());
        }
    }
    return result;
}

/// Pointwise mean of transport maps sharing abscissae.
inline TransportMap mean_transport_map(const std::vector<TransportMap>& maps) {
    if (maps.empty()) throw DegenerateSampleError("mean_transport_map: no maps");
    Vec acc = Vec::Zero(maps.front().values.size());
    for (const auto& m : maps) {
        if (m.values.size() != acc.size())
            throw IncompatibleObjectsError("mean_transport_map: abscissae mismatch");
        acc += m.values;
    }
    return {maps.front().abscissae, acc / double(maps.size())};
}

}  // namespace gnfr
