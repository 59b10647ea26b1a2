#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spdsliced/kernels.hpp"
#include "spdsliced/sliced.hpp"

using namespace spdsliced;

namespace {

EmpiricalSpdMeasure random_measure(RandomStream &s, Index n, Index d, double spread = 0.6) {
    std::vector<SpdMatrixd> pts;
    for (Index i = 0; i < n; ++i) pts.emplace_back(oracle::random_spd(s, d, spread));
    return EmpiricalSpdMeasure(std::move(pts));
}

std::shared_ptr<const ProjectionBasis> basis(std::uint64_t seed, Index d, Index L) {
    return std::make_shared<const ProjectionBasis>(build_projection_basis(RngState{seed, 0}, d, L, SamplerKind::eig_uniform));
}

std::vector<QuantileFeature> features(const std::vector<EmpiricalSpdMeasure> &ms,
                                      const std::shared_ptr<const ProjectionBasis> &b, Index M) {
    std::vector<QuantileFeature> out;
    for (const auto &m : ms) out.push_back(quantile_feature(m, b, midpoint_quantile_levels(M)));
    return out;
}

}  // namespace

TEST_CASE("quantile levels") {
    const Vector q = midpoint_quantile_levels(4);
    CHECK(q(0) == 0.125);
    CHECK(q(3) == 0.875);
    CHECK_THROWS_AS(midpoint_quantile_levels(0), Error);
}

TEST_CASE("feature of a single atom is its scaled projection at every level") {
    RandomStream s(RngState{1, 0});
    const SpdMatrixd x(oracle::random_spd(s, 3));
    const auto b = basis(2, 3, 20);
    const auto f = quantile_feature(EmpiricalSpdMeasure({x}), b, midpoint_quantile_levels(7));
    REQUIRE(f.values.rows() == 7);
    REQUIRE(f.values.cols() == 20);
    for (Index l = 0; l < 20; ++l) {
        const double t = geodesic_coordinate((*b)[l], x) / std::sqrt(7.0 * 20.0);
        for (Index j = 0; j < 7; ++j) CHECK(f.values(j, l) == doctest::Approx(t).epsilon(1e-12));
    }
}

TEST_CASE("feature distance equals the sliced discrepancy on matching grids") {
    RandomStream s(RngState{3, 0});
    const auto b = basis(4, 3, 50);
    const auto mu = random_measure(s, 40, 3), nu = random_measure(s, 40, 3);
    // With M = n equal-size measures the left-continuous quantile grid is exact.
    const auto fm = quantile_feature(mu, b, midpoint_quantile_levels(40));
    const auto fn = quantile_feature(nu, b, midpoint_quantile_levels(40));
    CHECK(squared_feature_distance(fm, fn) == doctest::Approx(spdsw(mu, nu, *b, 2).value).epsilon(1e-10));
    CHECK(squared_feature_distance(fm, fm) == 0.0);
    const auto other = basis(5, 3, 50);
    CHECK_THROWS_AS(squared_feature_distance(fm, quantile_feature(nu, other, midpoint_quantile_levels(40))), Error);
}

TEST_CASE("features are bitwise reproducible and invariant to point order") {
    RandomStream s(RngState{6, 0});
    const auto mu = random_measure(s, 25, 4);
    const auto f1 = quantile_feature(mu, basis(7, 4, 30), midpoint_quantile_levels(10));
    const auto f2 = quantile_feature(mu.fresh_copy(), basis(7, 4, 30), midpoint_quantile_levels(10));
    CHECK(f1.values == f2.values);
    auto pts = mu.points();
    std::reverse(pts.begin(), pts.end());
    const auto f3 = quantile_feature(EmpiricalSpdMeasure(pts), basis(7, 4, 30), midpoint_quantile_levels(10));
    CHECK(f1.values == f3.values);
}

TEST_CASE("Gaussian kernel") {
    RandomStream s(RngState{8, 0});
    std::vector<EmpiricalSpdMeasure> ms;
    for (int i = 0; i < 12; ++i) ms.push_back(random_measure(s, 15, 3, 0.3 + 0.1 * i));
    const auto b = basis(9, 3, 40);
    const auto fs = features(ms, b, 20);
    const double sigma = median_heuristic_sigma(fs);
    CHECK(sigma > 0);
    const auto k = gaussian_kernel(fs, sigma);
    CHECK(k.entries.diagonal() == Vector::Ones(12));
    CHECK(k.entries == k.entries.transpose());
    CHECK(k.entries.minCoeff() > 0);
    CHECK(k.entries.maxCoeff() <= 1.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(k.entries).eigenvalues().minCoeff() >= -1e-12);
    CHECK((gaussian_kernel(fs, 1e12).entries - Matrix::Ones(12, 12)).cwiseAbs().maxCoeff() <= 1e-12);
    for (Index i = 0; i < 12; ++i)
        for (Index j = 0; j < 12; ++j)
            CHECK(k.entries(i, j) == doctest::Approx(std::exp(-squared_feature_distance(fs[std::size_t(i)], fs[std::size_t(j)]) /
                                                              (2 * sigma * sigma)))
                                         .epsilon(1e-12));
    const Matrix cross = gaussian_cross_kernel(fs, fs, sigma);
    CHECK((cross - k.entries).cwiseAbs().maxCoeff() <= 1e-15);

    const auto summed = sum_kernels({k, k, gaussian_kernel(fs, 2 * sigma)});
    CHECK((summed.entries - (2 * k.entries + gaussian_kernel(fs, 2 * sigma).entries)).norm() <= 1e-14);
    CHECK_THROWS_AS(sum_kernels({k, GramMatrix{Matrix::Ones(3, 3), 1}}), Error);
}

TEST_CASE("median heuristic falls back to one for identical features") {
    RandomStream s(RngState{10, 0});
    const auto mu = random_measure(s, 10, 3);
    const auto fs = features({mu, mu, mu}, basis(11, 3, 10), 5);
    CHECK(median_heuristic_sigma(fs) == 1.0);
}

TEST_CASE("kernel ridge") {
    SUBCASE("identity Gram with unit penalty halves the centered targets") {
        Vector y(4);
        y << 1, 2, 3, 6;
        const auto model = kernel_ridge_fit(GramMatrix{Matrix::Identity(4, 4), 1}, y, 1.0);
        CHECK((model.coefficients - (y.array() - 3.0).matrix() / 2).norm() <= 1e-15);
        CHECK(model.target_mean == 3.0);
        CHECK(model.condition_number == doctest::Approx(1.0));
    }
    SUBCASE("small penalty nearly interpolates and the residual is tiny") {
        RandomStream s(RngState{12, 0});
        std::vector<EmpiricalSpdMeasure> ms;
        Vector y(15);
        for (int i = 0; i < 15; ++i) {
            ms.push_back(random_measure(s, 20, 3, 0.2 + 0.1 * i));
            y(i) = s.normal();
        }
        const auto fs = features(ms, basis(13, 3, 30), 20);
        const auto k = gaussian_kernel(fs, median_heuristic_sigma(fs));
        const auto model = kernel_ridge_fit(k, y, 1e-8);
        const Vector centered = y.array() - y.mean();
        const Matrix system = k.entries + 1e-8 * Matrix::Identity(15, 15);
        CHECK((system * model.coefficients - centered).norm() <= 1e-8 * centered.norm());
        // In-sample residuals equal minus the penalty times the coefficients.
        CHECK((kernel_ridge_predict(k.entries, model) - y + 1e-8 * model.coefficients).norm() <= 1e-8 * y.norm());

        // Permuting the training items permutes the coefficients.
        std::vector<QuantileFeature> rev(fs.rbegin(), fs.rend());
        const auto krev = gaussian_kernel(rev, k.sigma);
        const auto mrev = kernel_ridge_fit(krev, y.reverse(), 1e-8);
        CHECK((mrev.coefficients.reverse() - model.coefficients).norm() <= 1e-6 * model.coefficients.norm());
    }
    SUBCASE("constant targets are predicted exactly") {
        const auto model = kernel_ridge_fit(GramMatrix{Matrix::Constant(3, 3, 0.5) + 0.5 * Matrix::Identity(3, 3), 1},
                                            Vector::Constant(3, 4.0), 1e-3);
        CHECK(kernel_ridge_predict(Matrix::Constant(2, 3, 0.3), model) == Vector::Constant(2, 4.0));
    }
    SUBCASE("ill-conditioned systems are refused") {
        CHECK_THROWS_AS(kernel_ridge_fit(GramMatrix{Matrix::Ones(4, 4), 1}, Vector::Ones(4), 1e-16), Error);
        CHECK_THROWS_AS(kernel_ridge_fit(GramMatrix{Matrix::Identity(2, 2), 1}, Vector::Ones(2), 0.0), Error);
    }
}

TEST_CASE("k-fold indices partition the items") {
    for (Index n : {5, 17, 100}) {
        const auto folds = kfold_indices(n, 5, RngState{14, std::uint64_t(n)});
        REQUIRE(folds.size() == 5);
        std::vector<int> seen(std::size_t(n), 0);
        for (const auto &f : folds) {
            CHECK(Index(f.size()) >= n / 5);
            CHECK(Index(f.size()) <= n / 5 + 1);
            for (Index i : f) ++seen[std::size_t(i)];
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
        CHECK(folds == kfold_indices(n, 5, RngState{14, std::uint64_t(n)}));
    }
    CHECK_THROWS_AS(kfold_indices(3, 5, RngState{}), Error);
}

TEST_CASE("regression scores") {
    Vector t(4), p(4);
    t << 1, 2, 3, 4;
    p << 1, 2, 3, 5;
    CHECK(r2_score(t, t) == 1.0);
    CHECK(r2_score(t, p) == doctest::Approx(1.0 - 1.0 / 5.0));
    CHECK(r2_score(t, Vector::Constant(4, 2.5)) == doctest::Approx(0.0));
    CHECK(mean_absolute_error(t, p) == 0.25);
}
