#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "medgap/numkit.hpp"
#include "oracle_utils.hpp"

using namespace medgap;

TEST_CASE("least squares: identity design returns the response") {
    const Matrix design = Matrix::Identity(3, 3);
    Vector response(3);
    response << 1, 2, 3;
    const Vector beta = solve_least_squares(design, response);
    CHECK(beta.isApprox(response, 1e-12));
}

TEST_CASE("least squares: intercept-only fit is the mean") {
    const Matrix design = Matrix::Ones(4, 1);
    Vector response(4);
    response << 1, 2, 3, 4;
    const Vector beta = solve_least_squares(design, response);
    CHECK(beta[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("least squares: duplicated column raises a named singularity") {
    Matrix design(5, 3);
    Rng rng(11);
    for (Index i = 0; i < 5; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rng.normal();
        design(i, 2) = design(i, 1);
    }
    try {
        solve_least_squares(design, Vector::Ones(5));
        FAIL("expected SingularityError");
    } catch (const SingularityError& err) {
        CHECK(err.column_index == 2);
    }
}

TEST_CASE("least squares residuals are orthogonal to the design") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 20 + static_cast<Index>(rng.uniform_index(80));
        const Index p = 2 + static_cast<Index>(rng.uniform_index(5));
        Matrix design(n, p);
        Vector response(n);
        for (Index i = 0; i < n; ++i) {
            design(i, 0) = 1.0;
            for (Index j = 1; j < p; ++j) design(i, j) = rng.normal();
            response[i] = rng.normal();
        }
        const Vector beta = solve_least_squares(design, response);
        const Vector residual = response - design * beta;
        for (Index j = 0; j < p; ++j) {
            const double alignment =
                std::abs(design.col(j).dot(residual)) /
                (design.col(j).norm() * residual.norm() + 1e-300);
            CHECK(alignment <= 1e-8);
        }
    }
}

TEST_CASE("normal cdf matches the series/continued-fraction oracle") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    for (double x = -6.0; x <= 6.0; x += 0.173) {
        CHECK(std::abs(normal_cdf(x) - oracle::normal_cdf(x)) <= 1e-12);
    }
}

TEST_CASE("normal cdf is monotone and symmetric") {
    double previous = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.05) {
        const double value = normal_cdf(x);
        CHECK(value >= previous);
        previous = value;
        CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) <= 1e-12);
    }
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile(0.975) ==
          doctest::Approx(oracle::kQuantile0975).epsilon(1e-9));
    for (double p = 0.0005; p < 1.0; p += 0.0137) {
        CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-10);
    }
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("log_normal_cdf stays accurate deep in the left tail") {
    for (double x = -5.0; x <= 5.0; x += 0.31) {
        CHECK(log_normal_cdf(x) ==
              doctest::Approx(std::log(oracle::normal_cdf(x))).epsilon(1e-10));
    }
    // Against the asymptotic region: continuity across the switch point.
    const double left = log_normal_cdf(-37.001);
    const double right = log_normal_cdf(-36.999);
    CHECK(std::abs(left - right) <= 1e-3 * std::abs(right));
}

TEST_CASE("two-sided p-value conventions") {
    CHECK(normal_p_value_two_sided(0.0, 0.0) == 1.0);
    CHECK(normal_p_value_two_sided(1.0, 0.0) == 0.0);
    CHECK(normal_p_value_two_sided(1.959963984540054, 1.0) ==
          doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("rng: identical state reproduces identical draws") {
    Rng a(7, 0), b(7, 0);
    for (int i = 0; i < 5; ++i) {
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("rng: distinct substreams differ") {
    const Rng root(7);
    Rng s1 = root.substream(1);
    Rng s2 = root.substream(2);
    CHECK(s1.uniform() != s2.uniform());
}

TEST_CASE("rng: empirical mean of uniforms is one half") {
    Rng rng(123, 5);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += rng.uniform();
    CHECK(std::abs(sum / n - 0.5) <= 0.01);
}

TEST_CASE("rng: uniform_index covers the range without bias artifacts") {
    Rng rng(99);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto draw = rng.uniform_index(7);
        CHECK(draw < 7);
        seen.insert(draw);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("rng: normals have the right moments") {
    Rng rng(2024, 3);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) <= 0.02);
    CHECK(std::abs(sum_sq / n - 1.0) <= 0.03);
}

TEST_CASE("derive_seed is stable and spreads indices") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("parallel_for runs every index exactly once") {
    std::vector<int> hits(1000, 0);
    parallel_for(1000, 4, [&](std::size_t i) { hits[i] += 1; });
    for (const int h : hits) CHECK(h == 1);
}
