#pragma once

#include "gnfr/regression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gnfr {

enum class ModelId {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    I8dense,
    I8sparse,
    II1,
    II2,
    III1,
    III2,
    IV1
};

inline const std::vector<std::pair<ModelId, std::string>>& model_id_names() {
    static const std::vector<std::pair<ModelId, std::string>> names{
        {ModelId::I1, "I1"},           {ModelId::I2, "I2"},
        {ModelId::I3, "I3"},           {ModelId::I4, "I4"},
        {ModelId::I5, "I5"},           {ModelId::I6, "I6"},
        {ModelId::I7, "I7"},           {ModelId::I8dense, "I8dense"},
        {ModelId::I8sparse, "I8sparse"}, {ModelId::II1, "II1"},
        {ModelId::II2, "II2"},         {ModelId::III1, "III1"},
        {ModelId::III2, "III2"},       {ModelId::IV1, "IV1"}};
    return names;
}

inline std::string to_string(ModelId id) {
    for (const auto& [mid, name] : model_id_names())
        if (mid == id) return name;
    throw InternalError("unknown model id");
}

inline ModelId model_id_from_string(const std::string& name) {
    for (const auto& [mid, n] : model_id_names())
        if (n == name) return mid;
    throw InvalidObjectError("unknown model_id: " + name);
}

/// Declarative description of one simulation model run.
struct ScenarioSpec {
    ModelId model_id = ModelId::I1;
    int n = 100;            // total sample size, split in halves
    int m = 50;             // discrete observations per subject
    int p = 4;              // Euclidean/predictor dimension where applicable
    int r = 5;              // matrix dimension where applicable
    std::uint64_t seed = 1;
    int replicates = 10;
    int mc_directions = 50;  // Monte Carlo directions for sliced distances
    int grid_size = kDefaultGridSize;

    void validate() const {
        if (n < 4 || n % 2 != 0) throw InvalidObjectError("ScenarioSpec: n must be even and >= 4");
        if (m < 2) throw InvalidObjectError("ScenarioSpec: m must be >= 2");
        if (p < 1 || r < 1) throw InvalidObjectError("ScenarioSpec: dimensions must be >= 1");
        if (replicates < 1) throw InvalidObjectError("ScenarioSpec: replicates must be >= 1");
        if (mc_directions < 1) throw InvalidObjectError("ScenarioSpec: mc_directions must be >= 1");
        if (grid_size < 2) throw InvalidObjectError("ScenarioSpec: grid_size must be >= 2");
        switch (model_id) {
            case ModelId::I1:
            case ModelId::I2:
                if (p < 4) throw InvalidObjectError("ScenarioSpec: models I.1-I.2 need p >= 4");
                break;
            case ModelId::III1:
            case ModelId::III2:
            case ModelId::IV1:
                if (r < 2) throw InvalidObjectError("ScenarioSpec: matrix models need r >= 2");
                break;
            default:
                break;
        }
    }
};

/// One generated paired sample plus the latent regression targets.
struct Dataset {
    std::vector<MetricObject> predictors;
    std::vector<MetricObject> responses;       // observed (recovered) responses
    std::vector<MetricObject> true_responses;  // conditional Frechet means given the features
    int ridge_count = 0;                       // covariance ridging events (diagnostic)
};

struct MpeReport {
    std::vector<double> errors;  // one mean prediction error per replicate
    double mean = 0.0;
    double stderr_ = 0.0;
};

// --- low-level generator pieces -------------------------------------------

/// One AR(1) predictor row mapped through 2*Phi - 1: stationary recursion
/// U_1 = Z_1, U_j = 0.5 U_{j-1} + sqrt(0.75) Z_j, entries in (-1, 1).
inline Vec ar1_uniform_row(int p, Rng& rng) {
    Vec u(p);
    u[0] = draw_normal(rng);
    for (int j = 1; j < p; ++j) u[j] = 0.5 * u[j - 1] + std::sqrt(0.75) * draw_normal(rng);
    Vec x(p);
    for (int j = 0; j < p; ++j) x[j] = 2.0 * normal_cdf(u[j]) - 1.0;
    return x;
}

inline Mat gen_euclidean_X(int n, int p, Rng& rng) {
    Mat x(n, p);
    for (int i = 0; i < n; ++i) x.row(i) = ar1_uniform_row(p, rng);
    return x;
}

/// Coefficients of models I.1-I.2, zero-padded to dimension p.
inline std::pair<Vec, Vec> i1_coefficients(int p) {
    Vec beta = Vec::Zero(p), gamma = Vec::Zero(p);
    beta.head(4) << 1.0, -2.0, 0.0, 1.0;
    gamma.head(4) << 0.1, 0.2, 1.0, 0.3;
    return {beta, gamma};
}

inline double i2_transport(double y, int k) { return y - std::sin(k * y) / std::abs(double(k)); }

inline double i8_mean_function(double s) { return s + std::sin(s); }
inline double i8_eigenfunction1(double s) { return std::sqrt(2.0) * std::sin(2.0 * M_PI * s); }
inline double i8_eigenfunction2(double s) { return std::sqrt(2.0) * std::cos(2.0 * M_PI * s); }

inline QuantileObject gaussian_quantile_object(double mu, double sigma, const ProbGrid& grid) {
    Vec v(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        v[j] = mu + sigma * normal_quantile(grid.points()[j]);
        if (j > 0 && v[j] < v[j - 1]) v[j] = v[j - 1];  // guards sigma near 0
    }
    return QuantileObject(grid, v);
}

inline QuantileObject beta_quantile_object(double a, double b, const ProbGrid& grid) {
    Vec v(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) v[j] = beta_quantile(grid.points()[j], a, b);
    return QuantileObject(grid, v);
}

/// E sqrt(X) for X ~ Gamma(shape, rate) truncated to (lo, hi), by midpoint
/// quadrature (generation-side latent targets only).
inline double truncated_gamma_mean_sqrt(double shape, double rate, double lo, double hi) {
    const int n_nodes = 512;
    double mass = 0.0, acc = 0.0;
    double log_norm = shape * std::log(rate) - std::lgamma(shape);
    for (int k = 0; k < n_nodes; ++k) {
        double t = lo + (hi - lo) * (k + 0.5) / n_nodes;
        double logpdf = log_norm + (shape - 1.0) * std::log(t) - rate * t;
        double w = std::exp(logpdf) * (hi - lo) / n_nodes;
        mass += w;
        acc += std::sqrt(t) * w;
    }
    if (mass <= 0.0) return std::sqrt(lo);
    return acc / mass;
}

namespace detail {

struct ScenarioContext {
    const ScenarioSpec& spec;
    ProbGrid grid;
    explicit ScenarioContext(const ScenarioSpec& s)
        : spec(s), grid(ProbGrid::equispaced(s.grid_size)) {}
};

inline std::vector<double> gaussian_draws(Rng& rng, double mu, double sigma, int m) {
    std::vector<double> out(m);
    for (double& v : out) v = draw_normal(rng, mu, sigma);
    return out;
}

inline void gen_I1_I2(const ScenarioContext& ctx, Rng& rng, bool transported, Dataset& out) {
    const auto& spec = ctx.spec;
    auto [beta, gamma] = i1_coefficients(spec.p);
    const double nu1 = std::sqrt(0.1);
    const double nu2 = 0.25;
    for (int i = 0; i < spec.n; ++i) {
        Vec x = ar1_uniform_row(spec.p, rng);
        while (std::abs(gamma.dot(x)) < 1e-12) x = ar1_uniform_row(spec.p, rng);
        double bx = beta.dot(x);
        double gx = std::abs(gamma.dot(x));
        double mu_y = draw_normal(rng, bx * bx, nu1);
        double sigma_y = draw_gamma(rng, gx * gx / nu2, nu2 / gx);
        std::vector<double> draws = gaussian_draws(rng, mu_y, sigma_y, spec.m);
        if (transported) {
            static const int ks[4] = {-2, -1, 1, 2};
            int k = ks[std::min<int>(3, int(draw_uniform(rng, 0.0, 4.0)))];
            for (double& d : draws) d = i2_transport(d, k);
        }
        out.predictors.push_back(EuclideanVector(x));
        out.responses.push_back(empirical_quantiles(draws, ctx.grid));
        out.true_responses.push_back(gaussian_quantile_object(bx * bx, gx, ctx.grid));
    }
}

inline void gen_I3_I4_I5(const ScenarioContext& ctx, Rng& rng, ModelId id, Dataset& out) {
    const auto& spec = ctx.spec;
    const double nu1 = std::sqrt(0.1);
    const QuantileObject mu1 = beta_quantile_object(2.0, 1.0, ctx.grid);
    const QuantileObject mu2 = beta_quantile_object(2.0, 3.0, ctx.grid);
    for (int i = 0; i < spec.n; ++i) {
        double a = draw_gamma(rng, 2.0, 1.0);        // rate 1
        double b = draw_gamma(rng, 2.0, 1.0 / 3.0);  // rate 3
        a = std::max(a, 1e-8);
        b = std::max(b, 1e-8);
        std::vector<double> draws(spec.m);
        for (double& d : draws) d = draw_beta(rng, a, b);
        QuantileObject xq = empirical_quantiles(draws, ctx.grid);

        double mean_feature = 0.0, slope_mean = 0.0, mu_y = 0.0, sigma_y = 0.0;
        if (id == ModelId::I3) {
            double w1 = wasserstein2_quantile(xq, mu1);
            double w2 = wasserstein2_quantile(xq, mu2);
            mean_feature = std::exp(w1 * w1) + std::exp(w2 * w2);
            mu_y = draw_normal(rng, mean_feature, nu1);
            sigma_y = 0.1;
            slope_mean = 0.1;
        } else if (id == ModelId::I4) {
            double w1 = wasserstein2_quantile(xq, mu1);
            double w2 = std::max(wasserstein2_quantile(xq, mu2), 1e-8);
            mean_feature = std::exp(w1 * w1);
            mu_y = draw_normal(rng, mean_feature, nu1);
            sigma_y = draw_gamma(rng, w2 * w2, 1.0 / w2);  // shape W2^2, rate W2
            slope_mean = w2;
        } else {
            double h1 = hellinger_beta(a, b, 2.0, 1.0);
            double h2 = hellinger_beta(a, b, 2.0, 3.0);
            mean_feature = std::exp(h1);
            mu_y = draw_normal(rng, mean_feature, 0.2);
            sigma_y = std::exp(h2);
            slope_mean = sigma_y;
        }
        out.predictors.push_back(xq);
        out.responses.push_back(
            empirical_quantiles(gaussian_draws(rng, mu_y, sigma_y, spec.m), ctx.grid));
        out.true_responses.push_back(gaussian_quantile_object(mean_feature, slope_mean, ctx.grid));
    }
}

inline GaussianMeasure fit_gaussian_cloud(const Mat& cloud, int& ridge_count) {
    const Eigen::Index m = cloud.cols();
    Vec mean = cloud.rowwise().mean();
    Mat centered = cloud.colwise() - mean;
    Mat cov = centered * centered.transpose() / double(m - 1);
    Eigen::SelfAdjointEigenSolver<Mat> es(cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-12) {
        cov += 1e-8 * Mat::Identity(cov.rows(), cov.cols());
        ++ridge_count;
    }
    return GaussianMeasure(mean, cov);
}

inline const GaussianMeasure& scenario_mu1() {
    static const GaussianMeasure mu1([] {
        Vec m(2);
        m << -1.0, 0.0;
        return m;
    }(), [] {
        Mat c = Mat::Zero(2, 2);
        c.diagonal() << 1.0, 0.5;
        return c;
    }());
    return mu1;
}

inline const GaussianMeasure& scenario_mu2() {
    static const GaussianMeasure mu2([] {
        Vec m(2);
        m << 0.0, 1.0;
        return m;
    }(), [] {
        Mat c = Mat::Zero(2, 2);
        c.diagonal() << 0.5, 1.0;
        return c;
    }());
    return mu2;
}

inline Mat gaussian_cloud(Rng& rng, double a, double b, int m) {
    Mat cloud(2, m);
    double sd = std::sqrt(std::max(b, 1e-12));
    for (int j = 0; j < m; ++j) {
        cloud(0, j) = draw_normal(rng, a, sd);
        cloud(1, j) = draw_normal(rng, a, sd);
    }
    return cloud;
}

inline void gen_I6_I7(const ScenarioContext& ctx, Rng& rng, ModelId id, Dataset& out) {
    const auto& spec = ctx.spec;
    const double nu1 = std::sqrt(0.1);
    for (int i = 0; i < spec.n; ++i) {
        double a = draw_normal(rng, 0.5, 0.5);
        double b = draw_beta(rng, 2.0, 3.0);
        GaussianMeasure x = fit_gaussian_cloud(gaussian_cloud(rng, a, b, spec.m), out.ridge_count);
        double w1 = wasserstein2_gaussian(x, scenario_mu1());
        double mean_feature = std::exp(w1);
        double mu_y = draw_normal(rng, mean_feature, nu1);
        double sigma_y = 0.0, slope_mean = 0.0;
        if (id == ModelId::I6) {
            sigma_y = 0.1;
            slope_mean = 0.1;
        } else {
            double w2 = wasserstein2_gaussian(x, scenario_mu2());
            double l1 = draw_normal(rng, w2, 0.5);
            double l2 = draw_normal(rng, w2, 0.5);
            sigma_y = 0.5 * std::abs(l1 - l2);  // |tau1' diag(l) tau2|
            slope_mean = 0.5 / std::sqrt(M_PI); // E|N(0, 0.5)| / 2
        }
        out.predictors.push_back(x);
        out.responses.push_back(
            empirical_quantiles(gaussian_draws(rng, mu_y, sigma_y, spec.m), ctx.grid));
        out.true_responses.push_back(gaussian_quantile_object(mean_feature, slope_mean, ctx.grid));
    }
}

inline void gen_I8(const ScenarioContext& ctx, Rng& rng, bool dense, Dataset& out) {
    const auto& spec = ctx.spec;
    const double lambda1 = 1.0, lambda2 = 0.7;
    const double noise_sd = std::sqrt(0.1);
    const double nu1 = std::sqrt(0.1);
    for (int i = 0; i < spec.n; ++i) {
        double xi1 = draw_normal(rng, 0.0, std::sqrt(lambda1));
        double xi2 = draw_normal(rng, 0.0, std::sqrt(lambda2));
        int n_times = dense ? 50 : 3 + std::min(2, int(draw_uniform(rng, 0.0, 3.0)));
        std::vector<double> times(n_times);
        bool strict = false;
        while (!strict) {
            for (double& t : times) t = draw_uniform(rng);
            std::sort(times.begin(), times.end());
            strict = true;
            for (int j = 1; j < n_times; ++j)
                if (times[j] <= times[j - 1]) strict = false;
        }
        Vec t(n_times), v(n_times);
        for (int j = 0; j < n_times; ++j) {
            t[j] = times[j];
            v[j] = i8_mean_function(times[j]) + xi1 * i8_eigenfunction1(times[j]) +
                   xi2 * i8_eigenfunction2(times[j]) + draw_normal(rng, 0.0, noise_sd);
        }
        double mean_target = xi1 * lambda1 - xi2 * lambda2;
        double mu_y = draw_normal(rng, mean_target, nu1);
        out.predictors.push_back(SampledFunction(t, v));
        out.responses.push_back(
            empirical_quantiles(gaussian_draws(rng, mu_y, 0.1, spec.m), ctx.grid));
        out.true_responses.push_back(gaussian_quantile_object(mean_target, 0.1, ctx.grid));
    }
}

inline void gen_II(const ScenarioContext& ctx, Rng& rng, ModelId id, Dataset& out) {
    const auto& spec = ctx.spec;
    Mat frame(2, 2);  // fixed orthonormal eigenframe of II.2
    frame << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0),
        1.0 / std::sqrt(2.0);
    for (int i = 0; i < spec.n; ++i) {
        double a = draw_normal(rng, 0.5, 0.5);
        double b = draw_beta(rng, 2.0, 3.0);
        GaussianMeasure x = fit_gaussian_cloud(gaussian_cloud(rng, a, b, spec.m), out.ridge_count);
        double w1 = wasserstein2_gaussian(x, scenario_mu1());
        Vec mu_y(2);
        mu_y << draw_normal(rng, w1, 1.0), draw_normal(rng, w1, 1.0);
        Vec true_mean = Vec::Constant(2, w1);
        Mat cov, true_cov;
        if (id == ModelId::II1) {
            cov = Mat::Identity(2, 2);
            true_cov = Mat::Identity(2, 2);
        } else {
            double w2 = std::max(wasserstein2_gaussian(x, scenario_mu2()), 1e-6);
            double l1 = draw_truncated_gamma(rng, w2 * w2, w2, 0.2, 2.0);
            double l2 = draw_truncated_gamma(rng, w2 * w2, w2, 0.2, 2.0);
            Mat lam = Mat::Zero(2, 2);
            lam.diagonal() << l1, l2;
            cov = frame * lam * frame.transpose();
            double s = truncated_gamma_mean_sqrt(w2 * w2, w2, 0.2, 2.0);
            true_cov = s * s * Mat::Identity(2, 2);  // frame * (s^2 I) * frame' = s^2 I
        }
        out.predictors.push_back(x);
        out.responses.push_back(GaussianMeasure(mu_y, cov));
        out.true_responses.push_back(GaussianMeasure(true_mean, true_cov));
    }
}

struct SpdLaw {
    Vec b;       // U(2,4) offsets
    Vec c;       // U(0,1) centers
    Mat s;       // symmetrized N(0, 0.5) matrix
    Mat theta;   // symmetrized U(0, 0.5) matrix

    SpdLaw(int r, Rng& rng) : b(r), c(r), s(r, r), theta(r, r) {
        for (int j = 0; j < r; ++j) {
            b[j] = draw_uniform(rng, 2.0, 4.0);
            c[j] = draw_uniform(rng, 0.0, 1.0);
        }
        Mat a(r, r), v(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                a(i, j) = draw_normal(rng, 0.0, std::sqrt(0.5));
                v(i, j) = draw_uniform(rng, 0.0, 0.5);
            }
        s = 0.5 * (a + a.transpose());
        theta = 0.5 * (v + v.transpose());
    }

    Vec mean(double x) const {
        Vec mu(b.size());
        for (Eigen::Index j = 0; j < b.size(); ++j)
            mu[j] = b[j] - 2.0 * (x - c[j]) * (x - c[j]);
        return mu;
    }

    Mat covariance(double x) const {
        Mat arg = (2.0 * M_PI * (x + 0.1) * theta).array().sin().matrix().cwiseProduct(s);
        return (x + 2.0 * x * x * x) * matrix_exp_sym(arg);
    }
};

inline SpdObject draw_spd_response(const SpdLaw& law, double x, Rng& rng, int& ridge_count) {
    const auto r = law.b.size();
    Mat sigma = law.covariance(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    Vec lam = es.eigenvalues();
    if (lam.minCoeff() < 1e-10) {
        lam = lam.cwiseMax(1e-10);
        ++ridge_count;
    }
    Mat inv_root =
        es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    Vec z(r);
    for (Eigen::Index j = 0; j < r; ++j) z[j] = draw_normal(rng);
    Vec y = law.mean(x) + inv_root * z;
    return SpdObject(y * y.transpose());
}

inline SpdObject spd_true_response(const SpdLaw& law, double x) {
    // E(YY') = mu mu' + Sigma^{-1}
    Mat sigma = law.covariance(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    Vec lam = es.eigenvalues().cwiseMax(1e-10);
    Mat inv = es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    Vec mu = law.mean(x);
    Mat out = mu * mu.transpose() + inv;
    return SpdObject(0.5 * (out + out.transpose()));
}

inline void gen_III(const ScenarioContext& ctx, Rng& rng, ModelId id, Dataset& out) {
    const auto& spec = ctx.spec;
    SpdLaw law(spec.r, rng);
    if (id == ModelId::III1) {
        for (int i = 0; i < spec.n; ++i) {
            double x = draw_beta(rng, 0.5, 2.0);
            while (x <= 0.0 || x >= 1.0) x = draw_beta(rng, 0.5, 2.0);
            Vec xv(1);
            xv << x;
            out.predictors.push_back(EuclideanVector(xv));
            out.responses.push_back(draw_spd_response(law, x, rng, out.ridge_count));
            out.true_responses.push_back(spd_true_response(law, x));
        }
        return;
    }
    // III.2: SPD predictors, responses conditioned on the standardized scalar
    // index beta' X beta
    Vec beta(spec.p);
    for (int j = 0; j < spec.p; ++j) beta[j] = draw_uniform(rng, 0.0, 1.0);
    std::vector<Mat> preds;
    std::vector<double> index(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        Mat cloud(spec.p, spec.m);
        for (int a = 0; a < spec.p; ++a)
            for (int j = 0; j < spec.m; ++j) cloud(a, j) = draw_normal(rng);
        Vec mean = cloud.rowwise().mean();
        Mat centered = cloud.colwise() - mean;
        Mat cov = centered * centered.transpose() / double(spec.m - 1);
        preds.push_back(cov);
        index[i] = beta.dot(cov * beta);
    }
    // standardize the index to (0,1) by its empirical CDF: rank / (n+1)
    std::vector<int> order(spec.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return index[a] < index[b]; });
    std::vector<double> u(spec.n);
    for (int rank = 0; rank < spec.n; ++rank)
        u[order[rank]] = double(rank + 1) / double(spec.n + 1);
    for (int i = 0; i < spec.n; ++i) {
        out.predictors.push_back(SpdObject(preds[i]));
        out.responses.push_back(draw_spd_response(law, u[i], rng, out.ridge_count));
        out.true_responses.push_back(spd_true_response(law, u[i]));
    }
}

inline void gen_IV1(const ScenarioContext& ctx, Rng& rng, Dataset& out) {
    const auto& spec = ctx.spec;
    const int d = spec.r * (spec.r - 1) / 2;
    for (int i = 0; i < spec.n; ++i) {
        double x = draw_uniform(rng);
        while (x <= 0.0 || x >= 1.0) x = draw_uniform(rng);
        Vec entries(d);
        for (int j = 0; j < d; ++j) entries[j] = -draw_beta(rng, x, 1.0 - x);
        Vec xv(1);
        xv << x;
        out.predictors.push_back(EuclideanVector(xv));
        out.responses.push_back(LaplacianObject(vech_inverse(entries), 1.0));
        out.true_responses.push_back(
            LaplacianObject(vech_inverse(Vec::Constant(d, -x)), 1.0));
    }
}

}  // namespace detail

/// Generate one replicate of a scenario; deterministic function of (spec, rng
/// state).
inline Dataset generate_dataset(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    detail::ScenarioContext ctx(spec);
    Dataset out;
    out.predictors.reserve(spec.n);
    out.responses.reserve(spec.n);
    out.true_responses.reserve(spec.n);
    switch (spec.model_id) {
        case ModelId::I1: detail::gen_I1_I2(ctx, rng, false, out); break;
        case ModelId::I2: detail::gen_I1_I2(ctx, rng, true, out); break;
        case ModelId::I3:
        case ModelId::I4:
        case ModelId::I5: detail::gen_I3_I4_I5(ctx, rng, spec.model_id, out); break;
        case ModelId::I6:
        case ModelId::I7: detail::gen_I6_I7(ctx, rng, spec.model_id, out); break;
        case ModelId::I8dense: detail::gen_I8(ctx, rng, true, out); break;
        case ModelId::I8sparse: detail::gen_I8(ctx, rng, false, out); break;
        case ModelId::II1:
        case ModelId::II2: detail::gen_II(ctx, rng, spec.model_id, out); break;
        case ModelId::III1:
        case ModelId::III2: detail::gen_III(ctx, rng, spec.model_id, out); break;
        case ModelId::IV1: detail::gen_IV1(ctx, rng, out); break;
    }
    return out;
}

/// Response-space error metric for a scenario: native distance of the
/// response kind; sliced W2 over mc_directions for multivariate Gaussians.
inline double response_error(const ScenarioSpec& spec, const MetricObject& predicted,
                             const MetricObject& observed, Rng& mc_rng) {
    if (std::holds_alternative<GaussianMeasure>(predicted))
        return sliced_wasserstein2_gaussian_mc(std::get<GaussianMeasure>(predicted),
                                               std::get<GaussianMeasure>(observed),
                                               spec.mc_directions, mc_rng);
    return distance(predicted, observed);
}

/// Full replication harness: generate, split in halves, GCV-tune, fit,
/// predict on the test half, score against the latent true responses.
inline MpeReport run_scenario(const ScenarioSpec& spec) {
    spec.validate();
    MpeReport report;
    report.errors.reserve(spec.replicates);
    for (int b = 0; b < spec.replicates; ++b) {
        Rng rng = make_rng(spec.seed, 2 * std::uint64_t(b));
        Rng mc_rng = make_rng(spec.seed, 2 * std::uint64_t(b) + 1);
        Dataset data = generate_dataset(spec, rng);
        const int half = spec.n / 2;

        std::vector<MetricObject> train_x(data.predictors.begin(), data.predictors.begin() + half);
        std::vector<MetricObject> train_y(data.responses.begin(), data.responses.begin() + half);

        double gamma = bandwidth_heuristic(train_x);
        KernelSpec kernel = KernelSpec::gaussian_rbf(gamma);
        try {
            GcvResult tuned = gcv_tune(train_x, train_y, kernel);
            FittedModel model = fit(train_x, train_y, kernel, tuned.best_epsilon);
            double acc = 0.0;
            for (int j = half; j < spec.n; ++j) {
                MetricObject pred = predict(model, data.predictors[j]);
                acc += response_error(spec, pred, data.true_responses[j], mc_rng);
            }
            report.errors.push_back(acc / double(half));
        } catch (const std::exception& e) {
            throw InternalError("run_scenario: replicate " + std::to_string(b) + " failed: " +
                                e.what());
        }
    }
    const auto b_count = static_cast<double>(report.errors.size());
    report.mean = std::accumulate(report.errors.begin(), report.errors.end(), 0.0) / b_count;
    if (report.errors.size() > 1) {
        double var = 0.0;
        for (double e : report.errors) var += (e - report.mean) * (e - report.mean);
        report.stderr_ = std::sqrt(var / (b_count - 1.0) / b_count);
    }
    return report;
}

// --- plain-text config and CSV interfaces ----------------------------------

/// Parse a `key = value` scenario config; keys are the ScenarioSpec field
/// names. Unknown keys and malformed lines are reported with line numbers.
inline ScenarioSpec parse_scenario_config(std::istream& in) {
    ScenarioSpec spec;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        auto comment = trimmed.find('#');
        if (comment != std::string::npos) trimmed = trimmed.substr(0, comment);
        auto not_space = [](unsigned char c) { return !std::isspace(c); };
        trimmed.erase(trimmed.begin(), std::find_if(trimmed.begin(), trimmed.end(), not_space));
        trimmed.erase(std::find_if(trimmed.rbegin(), trimmed.rend(), not_space).base(),
                      trimmed.end());
        if (trimmed.empty()) continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), not_space).base(), key.end());
        value.erase(value.begin(), std::find_if(value.begin(), value.end(), not_space));
        try {
            if (key == "model_id")
                spec.model_id = model_id_from_string(value);
            else if (key == "n")
                spec.n = std::stoi(value);
            else if (key == "m")
                spec.m = std::stoi(value);
            else if (key == "p")
                spec.p = std::stoi(value);
            else if (key == "r")
                spec.r = std::stoi(value);
            else if (key == "seed")
                spec.seed = std::stoull(value);
            else if (key == "replicates")
                spec.replicates = std::stoi(value);
            else if (key == "mc_directions")
                spec.mc_directions = std::stoi(value);
            else if (key == "grid_size")
                spec.grid_size = std::stoi(value);
            else
                throw ParseError("unknown key: " + key, line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("bad value for key " + key + ": " + value, line_no);
        }
    }
    spec.validate();
    return spec;
}

inline std::string serialize_scenario_config(const ScenarioSpec& spec) {
    std::ostringstream out;
    out << "model_id = " << to_string(spec.model_id) << "\n";
    out << "n = " << spec.n << "\n";
    out << "m = " << spec.m << "\n";
    out << "p = " << spec.p << "\n";
    out << "r = " << spec.r << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "replicates = " << spec.replicates << "\n";
    out << "mc_directions = " << spec.mc_directions << "\n";
    out << "grid_size = " << spec.grid_size << "\n";
    return out.str();
}

/// Per-replicate errors plus a trailing summary row.
inline void write_mpe_csv(std::ostream& out, const MpeReport& report) {
    out << "replicate,error\n";
    for (size_t b = 0; b < report.errors.size(); ++b)
        out << b << "," << format_double(report.errors[b]) << "\n";
    out << "summary," << format_double(report.mean) << "," << format_double(report.stderr_)
        << "\n";
}

}  // namespace gnfr
