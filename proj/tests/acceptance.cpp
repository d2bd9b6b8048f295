// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include "gnfr/cli.hpp"
#include "gnfr/gnfr.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace gnfr;

namespace {

int g_failures = 0;

class Criterion {
  public:
    Criterion(int number, std::string label)
        : number_(number), label_(std::move(label)), start_(std::chrono::steady_clock::now()) {}

    void finish(bool ok, double budget_seconds, const std::string& detail) {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                          .count();
        bool in_budget = secs < budget_seconds;
        bool pass = ok && in_budget;
        if (!pass) ++g_failures;
        std::printf("[%s] criterion %2d: %-38s (%.2fs/%gs) %s\n", pass ? "PASS" : "FAIL", number_,
                    label_.c_str(), secs, budget_seconds, detail.c_str());
        std::fflush(stdout);
    }

  private:
    int number_;
    std::string label_;
    std::chrono::steady_clock::time_point start_;
};

Vec isotonic_maxmin(const Vec& v) {
    const Eigen::Index n = v.size();
    Vec out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index s = 0; s <= i; ++s) {
            double worst = std::numeric_limits<double>::infinity();
            for (Eigen::Index t = i; t < n; ++t) {
                double sum = 0.0;
                for (Eigen::Index k = s; k <= t; ++k) sum += v[k];
                worst = std::min(worst, sum / double(t - s + 1));
            }
            best = std::max(best, worst);
        }
        out[i] = best;
    }
    return out;
}

QuantileObject gaussian_quantiles(double mu, double sigma, const ProbGrid& grid) {
    Vec v(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j)
        v[j] = mu + sigma * normal_quantile(grid.points()[j]);
    return QuantileObject(grid, v);
}

std::vector<MetricObject> random_euclidean(Rng& rng, int n, int p) {
    std::vector<MetricObject> out;
    for (int i = 0; i < n; ++i) {
        Vec v(p);
        for (int j = 0; j < p; ++j) v[j] = draw_uniform(rng, -1.0, 1.0);
        out.push_back(EuclideanVector(v));
    }
    return out;
}

std::vector<MetricObject> random_quantile_responses(Rng& rng, int n, const ProbGrid& grid) {
    std::vector<MetricObject> out;
    for (int i = 0; i < n; ++i)
        out.push_back(
            gaussian_quantiles(draw_normal(rng), 0.5 + draw_uniform(rng, 0.0, 1.0), grid));
    return out;
}

// One-sided binomial tail P(Bin(n, 1/2) >= k).
double binomial_tail(int n, int k) {
    double total = 0.0;
    for (int j = k; j <= n; ++j) {
        double log_choose = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        total += std::exp(log_choose - n * std::log(2.0));
    }
    return total;
}

void criterion1_glfr_equivalence() {
    Criterion crit(1, "GLFR equivalence (linear kernel)");
    Rng rng = make_rng(4001);
    const int n = 50, p = 3;
    std::vector<MetricObject> xs = random_euclidean(rng, n, p);
    Mat x_mat(n, p);
    for (int i = 0; i < n; ++i) x_mat.row(i) = std::get<EuclideanVector>(xs[i]).coords;
    ProbGrid grid = ProbGrid::equispaced(20);
    std::vector<MetricObject> ys = random_quantile_responses(rng, n, grid);
    FittedModel model = fit(xs, ys, KernelSpec::linear(1.0), 1e-10);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        Vec q(p);
        for (int j = 0; j < p; ++j) q[j] = draw_uniform(rng, -1.0, 1.0);
        Vec w = weights_at(model, EuclideanVector(q)).w;
        Vec g = glfr_weights(x_mat, q).w;
        worst = std::max(worst, (w - g).cwiseAbs().maxCoeff());
    }
    crit.finish(worst < 1e-4, 1.0, "max |w - w_glfr| = " + format_double(worst));
}

void criterion2_weight_mean() {
    Criterion crit(2, "weight mean(w) = 1");
    Rng rng = make_rng(4002);
    ProbGrid grid = ProbGrid::equispaced(25);
    double worst = 0.0;
    int pairs = 0;

    // Euclidean predictors under all three kernels
    for (const KernelSpec& spec :
         {KernelSpec::gaussian_rbf(0.8), KernelSpec::laplacian(0.8), KernelSpec::linear(1.0)}) {
        std::vector<MetricObject> xs = random_euclidean(rng, 30, 3);
        std::vector<MetricObject> ys = random_quantile_responses(rng, 30, grid);
        FittedModel model = fit(xs, ys, spec, kDefaultEpsilon);
        for (int rep = 0; rep < 20; ++rep) {
            Vec q(3);
            for (int j = 0; j < 3; ++j) q[j] = draw_uniform(rng, -1.5, 1.5);
            worst = std::max(worst, std::abs(weights_at(model, EuclideanVector(q)).w.mean() - 1.0));
            ++pairs;
        }
    }
    // quantile-distribution predictors, rbf and laplacian
    {
        std::vector<MetricObject> xs, ys;
        for (int i = 0; i < 25; ++i) {
            std::vector<double> draws(40);
            for (double& d : draws) d = draw_normal(rng, draw_normal(rng), 1.0);
            xs.push_back(empirical_quantiles(draws, grid));
            ys.push_back(gaussian_quantiles(draw_normal(rng), 1.0, grid));
        }
        for (const KernelSpec& spec : {KernelSpec::gaussian_rbf(0.5), KernelSpec::laplacian(0.5)}) {
            FittedModel model = fit(xs, ys, spec, kDefaultEpsilon);
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<double> draws(40);
                for (double& d : draws) d = draw_normal(rng, draw_normal(rng), 1.0);
                MetricObject q = empirical_quantiles(draws, grid);
                worst = std::max(worst, std::abs(weights_at(model, q).w.mean() - 1.0));
                ++pairs;
            }
        }
    }
    // SPD predictors under rbf
    {
        std::vector<MetricObject> xs, ys;
        for (int i = 0; i < 20; ++i) {
            Mat a(3, 3);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) a(r, c) = draw_normal(rng);
            xs.push_back(SpdObject(a * a.transpose()));
            ys.push_back(SpdObject(Mat::Identity(3, 3) * draw_uniform(rng, 0.5, 2.0)));
        }
        FittedModel model = fit(xs, ys, KernelSpec::gaussian_rbf(0.2), kDefaultEpsilon);
        for (int rep = 0; rep < 20; ++rep) {
            Mat a(3, 3);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) a(r, c) = draw_normal(rng);
            MetricObject q = SpdObject(a * a.transpose());
            worst = std::max(worst, std::abs(weights_at(model, q).w.mean() - 1.0));
            ++pairs;
        }
    }
    crit.finish(worst < 1e-8 && pairs >= 100, 5.0,
                "pairs = " + std::to_string(pairs) + ", worst |mean - 1| = " + format_double(worst));
}

void criterion3_projection_oracles() {
    Criterion crit(3, "projection oracles");
    Rng rng = make_rng(4003);
    double worst_monotone = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
        int len = 2 + int(draw_uniform(rng, 0.0, 6.999));
        Vec v(len);
        for (int i = 0; i < len; ++i) v[i] = draw_normal(rng, 0.0, 2.0);
        worst_monotone =
            std::max(worst_monotone, (project_monotone(v) - isotonic_maxmin(v)).cwiseAbs().maxCoeff());
    }

    double worst_eig = 0.0;
    bool optimal = true;
    for (int rep = 0; rep < 100; ++rep) {
        Mat a(5, 5);
        for (int r = 0; r < 5; ++r)
            for (int c = r; c < 5; ++c) {
                double val = draw_normal(rng, 0.0, 1.5);
                a(r, c) = val;
                a(c, r) = val;
            }
        Mat proj = project_psd(a, 0.0);
        Eigen::SelfAdjointEigenSolver<Mat> es(proj, Eigen::EigenvaluesOnly);
        worst_eig = std::min(es.eigenvalues().minCoeff(), worst_eig);
        double dist = (a - proj).norm();
        for (int c = 0; c < 50; ++c) {
            Mat b(5, 5);
            for (int r = 0; r < 5; ++r)
                for (int s = 0; s < 5; ++s) b(r, s) = draw_normal(rng);
            Mat cand = b * b.transpose();
            if (dist > (a - cand).norm() + 1e-9) optimal = false;
        }
    }
    bool ok = worst_monotone < 1e-8 && worst_eig >= -1e-10 && optimal;
    crit.finish(ok, 10.0,
                "isotonic dev = " + format_double(worst_monotone) +
                    ", min eig = " + format_double(worst_eig) +
                    (optimal ? ", optimality ok" : ", optimality FAILED"));
}

void criterion4_distance_oracles() {
    Criterion crit(4, "distance oracles (W2 + sliced W2)");
    Rng rng = make_rng(4004);
    const int m_grid = 1000;
    ProbGrid grid = ProbGrid::equispaced(m_grid);
    double worst_w2 = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        double mu1 = draw_uniform(rng, -2, 2), mu2 = draw_uniform(rng, -2, 2);
        double s1 = draw_uniform(rng, 0.5, 1.5), s2 = draw_uniform(rng, 0.5, 1.5);
        double closed = std::sqrt((mu1 - mu2) * (mu1 - mu2) + (s1 - s2) * (s1 - s2));
        double gridded = wasserstein2_quantile(gaussian_quantiles(mu1, s1, grid),
                                               gaussian_quantiles(mu2, s2, grid));
        worst_w2 = std::max(worst_w2, std::abs(closed - gridded));
    }
    bool w2_ok = worst_w2 < 2.0 / m_grid;

    // sliced W2: Monte Carlo on sampled clouds vs direction-averaged analytic;
    // identity-covariance mean-shift pairs as in the N((0,0),I)-vs-N((2,0),I)
    // reference case, where the finite-cloud error stays inside the 5% band
    double worst_rel = 0.0;
    for (int pair = 0; pair < 5; ++pair) {
        Vec m1(2), m2(2);
        m1 << draw_uniform(rng, -1, 1), draw_uniform(rng, -1, 1);
        double delta = draw_uniform(rng, 1.8, 3.0);
        double angle = draw_uniform(rng, 0.0, 2.0 * M_PI);
        m2 << m1[0] + delta * std::cos(angle), m1[1] + delta * std::sin(angle);
        Mat c1 = Mat::Identity(2, 2), c2 = Mat::Identity(2, 2);

        // analytic oracle averaged over 1e4 fixed directions
        Rng dir_rng = make_rng(9000 + pair);
        double acc = 0.0;
        const int n_dirs = 10000;
        for (int l = 0; l < n_dirs; ++l) {
            Vec theta = draw_direction(dir_rng, 2);
            double dm = theta.dot(m1 - m2);
            double sa = std::sqrt(theta.dot(c1 * theta));
            double sb = std::sqrt(theta.dot(c2 * theta));
            acc += dm * dm + (sa - sb) * (sa - sb);
        }
        double oracle = std::sqrt(acc / n_dirs);

        const int cloud = 2000;
        Mat a(2, cloud), b(2, cloud);
        for (int j = 0; j < cloud; ++j) {
            a(0, j) = m1[0] + std::sqrt(c1(0, 0)) * draw_normal(rng);
            a(1, j) = m1[1] + std::sqrt(c1(1, 1)) * draw_normal(rng);
            b(0, j) = m2[0] + std::sqrt(c2(0, 0)) * draw_normal(rng);
            b(1, j) = m2[1] + std::sqrt(c2(1, 1)) * draw_normal(rng);
        }
        Rng mc_rng = make_rng(9100 + pair);
        double mc = sliced_wasserstein2_mc(a, b, 500, mc_rng);
        worst_rel = std::max(worst_rel, std::abs(mc - oracle) / oracle);
    }
    bool sw_ok = worst_rel < 0.05;
    crit.finish(w2_ok && sw_ok, 30.0,
                "worst grid-W2 err = " + format_double(worst_w2) + " (bound " +
                    format_double(2.0 / m_grid) + "), worst sliced rel err = " +
                    format_double(worst_rel));
}

void criterion5_objective_consistency() {
    Criterion crit(5, "objective weight/matrix consistency");
    Rng rng = make_rng(4005);
    ProbGrid grid = ProbGrid::equispaced(20);
    double worst = 0.0;
    for (int model_rep = 0; model_rep < 10; ++model_rep) {
        std::vector<MetricObject> xs = random_euclidean(rng, 25, 2);
        std::vector<MetricObject> ys = random_quantile_responses(rng, 25, grid);
        double eps = std::pow(10.0, -draw_uniform(rng, 1.0, 5.0));
        FittedModel model = fit(xs, ys, KernelSpec::gaussian_rbf(0.7), eps);
        for (int rep = 0; rep < 10; ++rep) {
            Vec q(2);
            q << draw_uniform(rng, -1, 1), draw_uniform(rng, -1, 1);
            MetricObject y =
                gaussian_quantiles(draw_normal(rng), 0.4 + draw_uniform(rng, 0, 1), grid);
            double a = objective_value(model, EuclideanVector(q), y);
            double b = objective_value_matrix_form(model, EuclideanVector(q), y);
            worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30}));
        }
    }
    crit.finish(worst < 1e-8, 10.0, "worst relative gap = " + format_double(worst));
}

void criterion6_gcv_formula() {
    Criterion crit(6, "GCV trace and limit");
    Rng rng = make_rng(4006);
    double worst_trace = 0.0;
    for (int n : {10, 30, 50}) {
        std::vector<MetricObject> xs = random_euclidean(rng, n, 2);
        GramSystem sys = build_gram(xs, KernelSpec::gaussian_rbf(0.6), 1e-3);
        // epsilons where the dense oracle itself is conditioned well below
        // the 1e-10 comparison gate
        for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
            Mat q = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / n);
            Mat reg = sys.centered_gram() + eps * Mat::Identity(n, n);
            Mat dense = q * reg.ldlt().solve(sys.centered_gram()).transpose();
            worst_trace = std::max(worst_trace, std::abs(sys.smoother_trace(eps) - dense.trace()));
        }
    }
    // denominator limit: eps -> infinity gives (1 - 1/n)^2
    const int n = 30;
    std::vector<MetricObject> xs = random_euclidean(rng, n, 2);
    GramSystem sys = build_gram(xs, KernelSpec::gaussian_rbf(0.6), 1.0);
    double trace_term = sys.smoother_trace(1e14) + 1.0;
    double denom = (1.0 - trace_term / n) * (1.0 - trace_term / n);
    double expected = (1.0 - 1.0 / n) * (1.0 - 1.0 / n);
    bool ok = worst_trace < 1e-10 && std::abs(denom - expected) < 1e-10;
    crit.finish(ok, 5.0,
                "trace err = " + format_double(worst_trace) +
                    ", limit err = " + format_double(std::abs(denom - expected)));
}

void criterion7_table_trend() {
    Criterion crit(7, "Model I.1 MPE band and n-monotonicity");
    ScenarioSpec spec200;
    spec200.model_id = ModelId::I1;
    spec200.n = 200;
    spec200.m = 50;
    spec200.p = 4;
    spec200.seed = 2024;
    spec200.replicates = 20;
    ScenarioSpec spec400 = spec200;
    spec400.n = 400;

    MpeReport r200 = run_scenario(spec200);
    MpeReport r400 = run_scenario(spec400);
    int wins = 0;
    for (int b = 0; b < 20; ++b)
        if (r400.errors[b] < r200.errors[b]) ++wins;
    double p_value = binomial_tail(20, wins);

    bool band_ok = r200.mean >= 0.01 && r200.mean <= 0.12;
    bool montone_ok = r400.mean < r200.mean && p_value < 0.05;
    std::string detail = "MPE(200) = " + format_double(r200.mean) + " (band [0.01, 0.12]" +
                         (band_ok ? " ok)" : " MISSED)") + ", MPE(400) = " +
                         format_double(r400.mean) + ", wins = " + std::to_string(wins) +
                         "/20, p = " + format_double(p_value);
    crit.finish(band_ok && montone_ok, 600.0, detail);
}

void criterion8_generation_invariants() {
    Criterion crit(8, "generator invariants, 14 models");
    bool ok = true;
    std::string failed;
    for (const auto& [id, name] : model_id_names()) {
        for (int b = 0; b < 2; ++b) {
            ScenarioSpec spec;
            spec.model_id = id;
            spec.n = 40;
            spec.m = 20;
            spec.p = (id == ModelId::III2) ? 5 : 4;
            spec.r = 5;
            spec.seed = 90 + b;
            try {
                Rng rng = make_rng(spec.seed, b);
                Dataset data = generate_dataset(spec, rng);
                for (int i = 0; i < spec.n; ++i) {
                    validate(data.predictors[i]);
                    validate(data.responses[i]);
                    validate(data.true_responses[i]);
                }
            } catch (const std::exception& e) {
                ok = false;
                failed = name + std::string(": ") + e.what();
            }
        }
    }
    crit.finish(ok, 120.0, ok ? "all objects valid" : failed);
}

void criterion9_residual_identity() {
    Criterion crit(9, "mean LOO transport map ~ identity");
    ScenarioSpec spec;
    spec.model_id = ModelId::I1;
    spec.n = 200;
    spec.m = 50;
    spec.seed = 17;
    Rng rng = make_rng(spec.seed, 0);
    Dataset data = generate_dataset(spec, rng);

    double gamma = bandwidth_heuristic(data.predictors);
    KernelSpec kernel = KernelSpec::gaussian_rbf(gamma);
    double eps = gcv_tune(data.predictors, data.responses, kernel).best_epsilon;
    LooResult loo = loo_predict(data.predictors, data.responses, kernel, eps);

    Vec abscissae = transport_abscissae(data.responses, 200);
    std::vector<TransportMap> maps;
    for (int i = 0; i < spec.n; ++i)
        maps.push_back(residual_map(std::get<QuantileObject>(data.responses[i]),
                                    std::get<QuantileObject>(loo.predictions[i]), abscissae));
    TransportMap mean_map = mean_transport_map(maps);
    double range = abscissae[abscissae.size() - 1] - abscissae[0];
    double mean_abs = (mean_map.values - abscissae).cwiseAbs().mean();
    crit.finish(mean_abs <= 0.05 * range, 120.0,
                "mean |T(a) - a| = " + format_double(mean_abs) + " vs bound " +
                    format_double(0.05 * range));
}

void criterion10_reproducibility() {
    Criterion crit(10, "byte-identical simulate runs");
    auto run_to = [](const std::string& path) {
        std::vector<const char*> argv{"gnfr",      "--out", path.c_str(),
                                      "simulate", "--spec", "fixtures/model_I1_small.cfg"};
        return gnfr::cli::run(static_cast<int>(argv.size()), argv.data());
    };
    int s1 = run_to("acceptance_sim_a.csv");
    int s2 = run_to("acceptance_sim_b.csv");
    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    };
    std::string a = slurp("acceptance_sim_a.csv");
    std::string b = slurp("acceptance_sim_b.csv");
    std::remove("acceptance_sim_a.csv");
    std::remove("acceptance_sim_b.csv");
    bool ok = s1 == 0 && s2 == 0 && !a.empty() && a == b;
    crit.finish(ok, 120.0, ok ? std::to_string(a.size()) + " bytes identical" : "outputs differ");
}

}  // namespace

int main() {
    criterion1_glfr_equivalence();
    criterion2_weight_mean();
    criterion3_projection_oracles();
    criterion4_distance_oracles();
    criterion5_objective_consistency();
    criterion6_gcv_formula();
    criterion7_table_trend();
    criterion8_generation_invariants();
    criterion9_residual_identity();
    criterion10_reproducibility();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
