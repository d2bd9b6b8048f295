#include "gnfr/kernel.hpp"
#include "gnfr/random.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace gnfr;

namespace {

MetricObject euclid(std::initializer_list<double> vals) {
    Vec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return EuclideanVector(v);
}

}  // namespace

TEST_CASE("kernel_eval examples") {
    KernelSpec rbf = KernelSpec::gaussian_rbf(1.0);
    MetricObject zero = euclid({0.0});
    MetricObject one = euclid({1.0});
    CHECK(kernel_eval(rbf, zero, zero) == 1.0);
    CHECK(kernel_eval(rbf, zero, one) == Catch::Approx(std::exp(-1.0)));

    KernelSpec lap = KernelSpec::laplacian(2.0);
    CHECK(kernel_eval(lap, zero, one) == Catch::Approx(std::exp(-2.0)));

    KernelSpec lin = KernelSpec::linear(1.0);
    CHECK(kernel_eval(lin, euclid({1.0, 2.0}), euclid({3.0, -1.0})) == Catch::Approx(2.0));

    MetricObject spd = SpdObject(Mat::Identity(2, 2));
    CHECK_THROWS_AS(kernel_eval(lin, spd, spd), IncompatibleObjectsError);
    CHECK_THROWS_AS(KernelSpec::gaussian_rbf(-1.0), InvalidObjectError);
}

TEST_CASE("bandwidth_heuristic examples") {
    std::vector<MetricObject> two{euclid({0.0}), euclid({1.0})};
    CHECK(bandwidth_heuristic(two) == Catch::Approx(0.5));

    std::vector<MetricObject> three{euclid({0.0}), euclid({1.0}), euclid({2.0})};
    CHECK(bandwidth_heuristic(three) == Catch::Approx(0.25));

    // scaling all distances by c scales gamma by c^-2
    std::vector<MetricObject> scaled{euclid({0.0}), euclid({3.0}), euclid({6.0})};
    CHECK(bandwidth_heuristic(scaled) == Catch::Approx(0.25 / 9.0));

    std::vector<MetricObject> same{euclid({2.0}), euclid({2.0})};
    CHECK_THROWS_AS(bandwidth_heuristic(same), DegenerateSampleError);
}

TEST_CASE("build_gram n=2 hand case") {
    // K = [[1, a], [a, 1]] -> G = (1-a)/2 * [[1, -1], [-1, 1]]
    std::vector<MetricObject> pts{euclid({0.0}), euclid({1.0})};
    KernelSpec rbf = KernelSpec::gaussian_rbf(0.7);
    GramSystem sys = build_gram(pts, rbf, 1e-3);
    double a = std::exp(-0.7);
    CHECK(sys.gram()(0, 1) == Catch::Approx(a));
    double g = (1.0 - a) / 2.0;
    CHECK(sys.centered_gram()(0, 0) == Catch::Approx(g).margin(1e-12));
    CHECK(sys.centered_gram()(0, 1) == Catch::Approx(-g).margin(1e-12));
    CHECK(sys.centered_gram()(1, 1) == Catch::Approx(g).margin(1e-12));
}

TEST_CASE("centered Gram has zero row sums and unit rbf diagonal") {
    Rng rng = make_rng(3);
    std::vector<MetricObject> pts;
    for (int i = 0; i < 12; ++i) {
        Vec v(3);
        for (int j = 0; j < 3; ++j) v[j] = draw_normal(rng);
        pts.push_back(EuclideanVector(v));
    }
    GramSystem sys = build_gram(pts, KernelSpec::gaussian_rbf(0.4), 1e-4);
    CHECK(sys.gram().diagonal().isApproxToConstant(1.0, 1e-12));
    CHECK(sys.centered_gram().rowwise().sum().cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sys.centered_gram().colwise().sum().cwiseAbs().maxCoeff() < 1e-8);
    // congruence by a projector keeps PSD
    CHECK(sys.centered_eigenvalues().minCoeff() > -1e-8);
    // distinct points: rbf Gram strictly positive definite
    Eigen::SelfAdjointEigenSolver<Mat> es(sys.gram(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("cross_vector at training points reproduces K and KQ columns") {
    Rng rng = make_rng(4);
    std::vector<MetricObject> pts;
    for (int i = 0; i < 9; ++i) {
        Vec v(2);
        v << draw_normal(rng), draw_normal(rng);
        pts.push_back(EuclideanVector(v));
    }
    GramSystem sys = build_gram(pts, KernelSpec::gaussian_rbf(0.8), 1e-3);
    const Eigen::Index n = sys.size();
    Mat q = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / double(n));
    Mat kq = sys.gram() * q;
    for (Eigen::Index j = 0; j < n; ++j) {
        CrossVector cv = cross_vector(sys, pts[j]);
        CHECK((cv.k_x - sys.gram().col(j)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((cv.d_x - kq.col(j)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cross_vector on duplicated training objects is constant") {
    // all training objects identical: d_x is a constant vector, which the
    // centering projector inside c_x annihilates (weights then equal 1)
    std::vector<MetricObject> pts{euclid({1.0, 1.0}), euclid({1.0, 1.0}), euclid({1.0, 1.0})};
    GramSystem sys = build_gram(pts, KernelSpec::gaussian_rbf(1.0), 1e-3);
    CrossVector cv = cross_vector(sys, euclid({0.3, -0.2}));
    CHECK((cv.d_x.array() - cv.d_x[0]).abs().maxCoeff() < 1e-12);
    // at a training point the constant is zero
    CrossVector cv_self = cross_vector(sys, pts[0]);
    CHECK(cv_self.d_x.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("with_epsilon refactorizes without rebuilding") {
    std::vector<MetricObject> pts{euclid({0.0}), euclid({0.5}), euclid({1.5})};
    GramSystem sys = build_gram(pts, KernelSpec::gaussian_rbf(1.0), 1e-2);
    GramSystem sys2 = sys.with_epsilon(1e-4);
    CHECK(sys2.epsilon() == 1e-4);
    CHECK(sys2.gram() == sys.gram());
    Vec rhs = Vec::Ones(3);
    Vec x = sys2.solve_g(rhs);
    CHECK(((sys.centered_gram() + 1e-4 * Mat::Identity(3, 3)) * x - rhs).norm() < 1e-10);
    CHECK_THROWS_AS(sys.with_epsilon(0.0), InvalidObjectError);
}

TEST_CASE("smoother_trace matches dense trace") {
    Rng rng = make_rng(8);
    std::vector<MetricObject> pts;
    for (int i = 0; i < 15; ++i) {
        Vec v(2);
        v << draw_normal(rng), draw_normal(rng);
        pts.push_back(EuclideanVector(v));
    }
    GramSystem sys = build_gram(pts, KernelSpec::gaussian_rbf(0.6), 1e-3);
    for (double eps : {1e-5, 1e-3, 1e-1}) {
        Mat dense = sys.centered_gram() *
                    (sys.centered_gram() + eps * Mat::Identity(15, 15)).inverse();
        CHECK(sys.smoother_trace(eps) == Catch::Approx(dense.trace()).margin(1e-9));
    }
}
