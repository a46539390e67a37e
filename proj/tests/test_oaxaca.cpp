#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "medgap/oaxaca.hpp"
#include "medgap/synthetic.hpp"

using namespace medgap;

namespace {

Dataset tiny_dataset(const std::vector<double>& g, const std::vector<double>& y,
                     const std::vector<double>& x) {
    std::vector<Column> columns(3);
    columns[0].name = "g";
    columns[0].values = g;
    columns[1].name = "y";
    columns[1].values = y;
    columns[2].name = "x1";
    columns[2].values = x;
    return Dataset::from_columns(columns);
}

RoleMap tiny_roles() {
    RoleMap roles;
    roles.group = "g";
    roles.outcome = "y";
    roles.mediators_m1 = {"x1"};
    return roles;
}

}  // namespace

TEST_CASE("identical groups decompose to zero everywhere") {
    // Duplicated data with the group label randomized across copies.
    Rng rng(1);
    const Index n = 50;
    Vector y(2 * n), g(2 * n), x(2 * n);
    for (Index i = 0; i < n; ++i) {
        const double xi = rng.normal();
        const double yi = 1.0 + 2.0 * xi + rng.normal();
        x[i] = xi;
        x[n + i] = xi;
        y[i] = yi;
        y[n + i] = yi;
        g[i] = 0.0;
        g[n + i] = 1.0;
    }
    const Vector components = oaxaca_components(y, g, x);
    for (Index k = 0; k < 5; ++k) {
        CHECK(std::abs(components[k]) <= 1e-10);
    }
}

TEST_CASE("a mediator constant within groups is a named collinearity error") {
    const Dataset data = tiny_dataset({1, 1, 1, 0, 0, 0}, {5, 5, 5, 2, 2, 2},
                                      {2, 2, 2, 1, 1, 1});
    try {
        oaxaca_decompose(data, tiny_roles(), MediatorSet::m1);
        FAIL("expected SingularityError");
    } catch (const SingularityError& err) {
        const std::string what = err.what();
        CHECK(what.find("x1") != std::string::npos);
    }
}

TEST_CASE("adding-up identity holds exactly for both references") {
    Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 40 + static_cast<Index>(rng.uniform_index(200));
        Vector y(n), g(n);
        Matrix x(n, 2);
        for (Index i = 0; i < n; ++i) {
            g[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
            x(i, 0) = rng.normal() + 0.4 * g[i];
            x(i, 1) = rng.normal();
            y[i] = 0.5 * g[i] + x(i, 0) - 0.3 * x(i, 1) + rng.normal();
        }
        const Vector components = oaxaca_components(y, g, x);
        CHECK(std::abs(components[1] + components[2] - components[0]) <= 1e-10);
        CHECK(std::abs(components[3] + components[4] - components[0]) <= 1e-10);
    }
}

TEST_CASE("location shift of the outcome leaves all components unchanged") {
    Rng rng(3);
    const Index n = 120;
    Vector y(n), g(n);
    Matrix x(n, 1);
    for (Index i = 0; i < n; ++i) {
        g[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
        x(i, 0) = rng.normal() + 0.5 * g[i];
        y[i] = g[i] + 2.0 * x(i, 0) + rng.normal();
    }
    const Vector base = oaxaca_components(y, g, x);
    const Vector shifted = oaxaca_components(y.array() + 1000.0, g, x);
    for (Index k = 0; k < 5; ++k) {
        CHECK(std::abs(base[k] - shifted[k]) <= 1e-8);
    }
}

TEST_CASE("closed-form recovery on a conforming DGP") {
    // Y = 1*G + 2*X + u, X = 0.5*G + e: indirect 1.0, direct 1.0.
    SyntheticDgp dgp;
    dgp.n = 10000;
    dgp.dim_w = 1;
    dgp.gamma = Vector::Zero(1);
    dgp.kappa = Vector::Zero(1);
    dgp.alpha = Vector::Constant(1, 0.5);
    dgp.delta = Matrix::Zero(1, 1);
    dgp.beta = Vector::Constant(1, 2.0);
    dgp.theta = 1.0;
    dgp.seed = 99;
    const Dataset data = generate(dgp);
    const DecompositionResult result =
        oaxaca_decompose(data, synthetic_roles(dgp), MediatorSet::m1);
    CHECK(std::abs(result.indirect_ref_male - 1.0) <= 0.1);
    CHECK(std::abs(result.indirect_ref_female - 1.0) <= 0.1);
    CHECK(std::abs(result.direct_ref_male - 1.0) <= 0.1);
    CHECK(std::abs(result.direct_ref_female - 1.0) <= 0.1);
    CHECK(result.n_trimmed == 0);
    CHECK(result.n_used == 10000);
}

TEST_CASE("pooled coefficients make both references agree") {
    // When both group regressions estimate the same slopes (no interaction in
    // the DGP), f- and m-referenced indirect effects converge at large n.
    SyntheticDgp dgp;
    dgp.n = 20000;
    dgp.dim_w = 1;
    dgp.gamma = Vector::Zero(1);
    dgp.kappa = Vector::Zero(1);
    dgp.alpha = Vector::Constant(1, 0.7);
    dgp.delta = Matrix::Zero(1, 1);
    dgp.beta = Vector::Constant(1, 1.5);
    dgp.theta = 0.4;
    dgp.seed = 7;
    const Dataset data = generate(dgp);
    const DecompositionResult result =
        oaxaca_decompose(data, synthetic_roles(dgp), MediatorSet::m1);
    CHECK(std::abs(result.indirect_ref_female - result.indirect_ref_male) <= 0.08);
}

TEST_CASE("empty group raises EmptySampleError") {
    const Dataset data = tiny_dataset({1, 1, 1}, {1, 2, 3}, {0.5, 1.0, 1.5});
    CHECK_THROWS_AS(oaxaca_decompose(data, tiny_roles(), MediatorSet::m1),
                    EmptySampleError);
}

TEST_CASE("missingness accounting flows into the result") {
    Dataset data = [] {
        std::vector<Column> columns(3);
        columns[0].name = "g";
        columns[0].values = {1, 1, 0, 0, 1, 0};
        columns[1].name = "y";
        columns[1].values = {5, 4, 2, 1, 0, 3};
        columns[1].missing = {0, 0, 0, 0, 1, 0};
        columns[2].name = "x1";
        columns[2].values = {1, 2, 1, 2, 1, 0};
        return Dataset::from_columns(columns);
    }();
    const DecompositionResult result =
        oaxaca_decompose(data, tiny_roles(), MediatorSet::m1);
    CHECK(result.n_dropped_missing == 1);
    CHECK(result.n_used == 5);
}

TEST_CASE("optional control columns keep the adding-up identity") {
    Rng rng(8);
    const Index n = 400;
    std::vector<Column> columns(4);
    columns[0].name = "g";
    columns[1].name = "y";
    columns[2].name = "x1";
    columns[3].name = "w1";
    for (Index i = 0; i < n; ++i) {
        const double g = rng.uniform() < 0.5 ? 1.0 : 0.0;
        const double w = rng.normal();
        const double x = 0.5 * g + 0.3 * w + rng.normal();
        const double y = g + 2.0 * x + w + rng.normal();
        columns[0].values.push_back(g);
        columns[1].values.push_back(y);
        columns[2].values.push_back(x);
        columns[3].values.push_back(w);
    }
    const Dataset data = Dataset::from_columns(columns);
    RoleMap roles = tiny_roles();
    roles.controls = {"w1"};
    const DecompositionResult result =
        oaxaca_decompose(data, roles, MediatorSet::m1, /*include_controls=*/true);
    CHECK(std::abs(result.indirect_ref_female + result.direct_ref_female -
                   result.total_gap) <= 1e-10);
    CHECK(std::abs(result.indirect_ref_male + result.direct_ref_male -
                   result.total_gap) <= 1e-10);
}
