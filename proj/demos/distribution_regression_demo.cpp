// Fits distributional responses against Euclidean predictors on synthetic
// data and prints the tuned epsilon plus a few predicted quantiles.

#include "gnfr/gnfr.hpp"

#include <cstdio>

using namespace gnfr;

int main() {
    const int n = 80, m = 40, p = 3;
    ProbGrid grid = ProbGrid::equispaced(50);
    Rng rng = make_rng(2024);

    std::vector<MetricObject> predictors, responses;
    for (int i = 0; i < n; ++i) {
        Vec x(p);
        for (int j = 0; j < p; ++j) x[j] = draw_uniform(rng, -1.0, 1.0);
        double mu = x.sum() * x.sum();
        double sigma = 0.5 + 0.3 * std::abs(x[0]);
        std::vector<double> draws(m);
        for (double& d : draws) d = draw_normal(rng, mu, sigma);
        predictors.push_back(EuclideanVector(x));
        responses.push_back(empirical_quantiles(draws, grid));
    }

    KernelSpec kernel = KernelSpec::gaussian_rbf(bandwidth_heuristic(predictors));
    GcvResult tuned = gcv_tune(predictors, responses, kernel);
    FittedModel model = fit(predictors, responses, kernel, tuned.best_epsilon);

    std::printf("n = %d, gamma = %.4f, tuned epsilon = %g\n", n, kernel.gamma,
                tuned.best_epsilon);

    Vec query(p);
    query << 0.5, -0.25, 0.75;
    auto prediction = std::get<QuantileObject>(predict(model, EuclideanVector(query)));
    std::printf("predicted quantiles at u = 0.1 / 0.5 / 0.9: %.3f / %.3f / %.3f\n",
                prediction.values[4], prediction.values[24], prediction.values[44]);
    std::printf("true quantiles             at u = 0.1 / 0.5 / 0.9: %.3f / %.3f / %.3f\n",
                1.0 + 0.65 * normal_quantile(0.1), 1.0, 1.0 + 0.65 * normal_quantile(0.9));
    return 0;
}
