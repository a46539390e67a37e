#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "medgap/ols.hpp"
#include "oracle_utils.hpp"

using namespace medgap;

TEST_CASE("mean difference: exact group means") {
    Vector y(4), d(4);
    y << 1, 1, 3, 3;
    d << 0, 0, 1, 1;
    const EffectEstimate effect = ate_mean_difference(y, d);
    CHECK(effect.estimate == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(effect.kind == EstimatorKind::mean_difference);
    CHECK(effect.n_used == 4);
}

TEST_CASE("mean difference: identical groups give estimate 0, p-value 1") {
    Vector y(6), d(6);
    y << 2, 5, 7, 2, 5, 7;
    d << 0, 0, 0, 1, 1, 1;
    const EffectEstimate effect = ate_mean_difference(y, d);
    CHECK(effect.estimate == 0.0);
    CHECK(effect.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean difference: hand-computed Welch standard error") {
    Vector y(4), d(4);
    y << 0, 2, 1, 5;
    d << 0, 0, 1, 1;
    const EffectEstimate effect = ate_mean_difference(y, d);
    CHECK(effect.estimate == doctest::Approx(2.0).epsilon(1e-14));
    // var0 = 2, var1 = 8, SE = sqrt(2/2 + 8/2) = sqrt(5)
    CHECK(effect.standard_error == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(effect.p_value ==
          doctest::Approx(normal_p_value_two_sided(2.0, std::sqrt(5.0))).epsilon(1e-12));
}

TEST_CASE("mean difference: empty group is an error") {
    Vector y(3), d(3);
    y << 1, 2, 3;
    d << 1, 1, 1;
    CHECK_THROWS_AS(ate_mean_difference(y, d), EmptySampleError);
}

TEST_CASE("ols controls: orthogonal controls leave the estimate unchanged") {
    // Controls constructed orthogonal to both D and Y.
    const Index n = 8;
    Vector y(n), d(n), w(n);
    y << 1, 1, 3, 3, 2, 2, 4, 4;
    d << 0, 0, 0, 0, 1, 1, 1, 1;
    w << 1, -1, 1, -1, 1, -1, 1, -1;
    CHECK(std::abs(w.dot(d)) <= 1e-12);
    CHECK(std::abs(w.dot(y)) <= 1e-12);
    const EffectEstimate plain = ate_mean_difference(y, d);
    const EffectEstimate adjusted = ate_ols_controls(y, d, w);
    CHECK(adjusted.estimate == doctest::Approx(plain.estimate).epsilon(1e-10));
}

TEST_CASE("ols controls: exact linear outcome gives SE 0") {
    Rng rng(4);
    const Index n = 40;
    Vector y(n), d(n);
    Matrix w(n, 1);
    for (Index i = 0; i < n; ++i) {
        d[i] = i % 2 == 0 ? 1.0 : 0.0;
        w(i, 0) = rng.normal();
        y[i] = 2.0 * d[i] + w(i, 0);
    }
    const EffectEstimate effect = ate_ols_controls(y, d, w);
    CHECK(effect.estimate == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(effect.standard_error <= 1e-8);
}

TEST_CASE("ols controls: closer to truth than the raw difference under confounding") {
    Rng rng(12);
    const Index n = 200;
    const double theta = 1.5;
    Vector y(n), d(n);
    Matrix w(n, 1);
    for (Index i = 0; i < n; ++i) {
        w(i, 0) = rng.normal();
        d[i] = rng.uniform() < normal_cdf(1.2 * w(i, 0)) ? 1.0 : 0.0;
        y[i] = theta * d[i] + 2.0 * w(i, 0) + 0.3 * rng.normal();
    }
    // Independent oracle: brute-force normal-equations regression.
    Matrix design(n, 3);
    design.col(0).setOnes();
    design.col(1) = d;
    design.col(2) = w.col(0);
    const Vector oracle_beta =
        (design.transpose() * design).ldlt().solve(design.transpose() * y);

    const EffectEstimate adjusted = ate_ols_controls(y, d, w);
    const EffectEstimate raw = ate_mean_difference(y, d);
    CHECK(adjusted.estimate == doctest::Approx(oracle_beta[1]).epsilon(1e-8));
    CHECK(std::abs(adjusted.estimate - theta) < std::abs(raw.estimate - theta));
}

TEST_CASE("HC1 covariance matches the direct sandwich formula") {
    Rng rng(9);
    const Index n = 12, k = 3;
    Matrix design(n, k);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rng.normal();
        design(i, 2) = rng.uniform();
        y[i] = design(i, 1) - design(i, 2) + 0.5 * rng.normal();
    }
    const OlsFit fit = fit_ols(design, y, HcVariant::hc1);
    // Direct small-n computation of (n/(n-k)) (X'X)^-1 X' diag(r^2) X (X'X)^-1.
    const Matrix xtx_inv = (design.transpose() * design).inverse();
    const Matrix meat =
        design.transpose() * fit.residuals.array().square().matrix().asDiagonal() *
        design;
    const Matrix expected = (static_cast<double>(n) / static_cast<double>(n - k)) *
                            xtx_inv * meat * xtx_inv;
    CHECK((fit.robust_covariance - expected).cwiseAbs().maxCoeff() <= 1e-10);

    // Residuals orthogonal to the design.
    for (Index j = 0; j < k; ++j) {
        const double alignment = std::abs(design.col(j).dot(fit.residuals)) /
                                 (design.col(j).norm() * fit.residuals.norm() + 1e-300);
        CHECK(alignment <= 1e-8);
    }
    // Symmetric positive semidefinite.
    CHECK((fit.robust_covariance - fit.robust_covariance.transpose())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    const Eigen::SelfAdjointEigenSolver<Matrix> eigensolver(fit.robust_covariance);
    CHECK(eigensolver.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("rank-deficient controls raise a singularity error") {
    Vector y(6), d(6);
    Matrix w(6, 2);
    Rng rng(2);
    for (Index i = 0; i < 6; ++i) {
        y[i] = rng.normal();
        d[i] = i % 2 == 0 ? 1.0 : 0.0;
        w(i, 0) = rng.normal();
        w(i, 1) = 2.0 * w(i, 0);
    }
    CHECK_THROWS_AS(ate_ols_controls(y, d, w), SingularityError);
}

TEST_CASE("HC variants order as expected on heteroscedastic data") {
    Rng rng(33);
    const Index n = 60;
    Matrix design(n, 2);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rng.normal();
        y[i] = design(i, 1) + std::abs(design(i, 1)) * rng.normal();
    }
    const double hc0 = fit_ols(design, y, HcVariant::hc0).robust_covariance(1, 1);
    const double hc1 = fit_ols(design, y, HcVariant::hc1).robust_covariance(1, 1);
    const double hc3 = fit_ols(design, y, HcVariant::hc3).robust_covariance(1, 1);
    CHECK(hc1 > hc0);
    CHECK(hc3 > hc0);
}
