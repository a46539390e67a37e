#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "medgap/balance.hpp"
#include "medgap/pipeline.hpp"
#include "medgap/serialize.hpp"
#include "medgap/synthetic.hpp"

using namespace medgap;

namespace {

Dataset balanced_dataset() {
    std::vector<Column> columns(4);
    columns[0].name = "g";
    columns[1].name = "y";
    columns[2].name = "w1";
    columns[3].name = "x1";
    Rng rng(1);
    for (int i = 0; i < 40; ++i) {
        const double w = rng.normal();
        const double x = rng.normal();
        for (const double g : {1.0, 0.0}) {
            columns[0].values.push_back(g);
            columns[1].values.push_back(rng.normal());
            columns[2].values.push_back(w);
            columns[3].values.push_back(x);
        }
    }
    return Dataset::from_columns(columns);
}

RoleMap demo_roles() {
    RoleMap roles;
    roles.group = "g";
    roles.outcome = "y";
    roles.controls = {"w1"};
    roles.mediators_m1 = {"x1"};
    return roles;
}

}  // namespace

TEST_CASE("identical covariate distributions give zero differences, p = 1") {
    std::vector<Column> columns(4);
    columns[0].name = "g";
    columns[1].name = "y";
    columns[2].name = "w1";
    columns[3].name = "x1";
    Rng rng(2);
    for (int i = 0; i < 40; ++i) {
        const double w = rng.normal();
        const double x = rng.uniform();
        for (const double g : {0.0, 1.0}) {
            columns[0].values.push_back(g);
            columns[1].values.push_back(rng.normal());
            columns[2].values.push_back(w);
            columns[3].values.push_back(x);
        }
    }
    const Dataset data = Dataset::from_columns(columns);
    const BalanceTable table = balance_table(data, demo_roles());
    for (const auto& row : table.rows) {
        CHECK(row.difference == 0.0);
        CHECK(row.p_value == 1.0);
        CHECK(row.n_missing == 0);
    }
}

TEST_CASE("the group dummy itself balances at difference 1") {
    std::vector<Column> columns(4);
    columns[0].name = "g";
    columns[1].name = "y";
    columns[2].name = "w1";
    columns[3].name = "x1";
    Rng rng(3);
    for (int i = 0; i < 30; ++i) {
        const double g = i % 2 == 0 ? 1.0 : 0.0;
        columns[0].values.push_back(g);
        columns[1].values.push_back(rng.normal());
        columns[2].values.push_back(g);  // w1 == g
        columns[3].values.push_back(rng.normal());
    }
    const Dataset data = Dataset::from_columns(columns);
    const BalanceTable table = balance_table(data, demo_roles());
    CHECK(table.rows[0].name == "w1");
    CHECK(table.rows[0].difference == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equal weights reproduce the unweighted table") {
    const Dataset data = balanced_dataset();
    const BalanceTable unweighted = balance_table(data, demo_roles());
    const Vector ones = Vector::Ones(static_cast<Index>(data.n_rows()));
    const BalanceTable weighted = balance_table(data, demo_roles(), &ones);
    REQUIRE(weighted.rows.size() == unweighted.rows.size());
    for (std::size_t k = 0; k < weighted.rows.size(); ++k) {
        CHECK(weighted.rows[k].mean_group0 ==
              doctest::Approx(unweighted.rows[k].mean_group0).epsilon(1e-14));
        CHECK(weighted.rows[k].mean_group1 ==
              doctest::Approx(unweighted.rows[k].mean_group1).epsilon(1e-14));
        CHECK(weighted.rows[k].p_value ==
              doctest::Approx(unweighted.rows[k].p_value).epsilon(1e-12));
    }
}

TEST_CASE("IPW reweighting shrinks covariate differences on a confounded DGP") {
    SyntheticDgp dgp;
    dgp.n = 2000;
    dgp.dim_w = 2;
    dgp.gamma = Vector::Constant(2, 0.6);
    dgp.kappa = Vector::Constant(2, 0.5);
    dgp.alpha = Vector::Constant(1, 0.5);
    dgp.delta = Matrix::Constant(1, 2, 0.4);
    dgp.beta = Vector::Constant(1, 1.0);
    dgp.theta = 1.0;
    dgp.seed = 17;
    const Dataset data = generate(dgp);
    const RoleMap roles = synthetic_roles(dgp);

    const BalanceTable raw = balance_table(data, roles);
    const auto [weights, n_trimmed] =
        ipw_balance_weights(data, roles, MediatorSet::m1, TrimmingPolicy{});
    const BalanceTable adjusted =
        balance_table(data, roles, &weights, TrimmingPolicy{});

    double max_raw = 0.0, max_adjusted = 0.0;
    for (std::size_t k = 0; k < raw.rows.size(); ++k) {
        max_raw = std::max(max_raw, std::abs(raw.rows[k].difference));
        max_adjusted = std::max(max_adjusted, std::abs(adjusted.rows[k].difference));
    }
    CHECK(max_adjusted <= max_raw / 3.0);
    CHECK(adjusted.weighted);
    CHECK(adjusted.trim_policy_used.has_value());
}

TEST_CASE("missing cells are counted per variable") {
    std::vector<Column> columns(4);
    columns[0].name = "g";
    columns[0].values = {1, 0, 1, 0};
    columns[1].name = "y";
    columns[1].values = {1, 2, 3, 4};
    columns[2].name = "w1";
    columns[2].values = {1, 2, 0, 4};
    columns[2].missing = {0, 0, 1, 0};
    columns[3].name = "x1";
    columns[3].values = {5, 6, 7, 8};
    const Dataset data = Dataset::from_columns(columns);
    const BalanceTable table = balance_table(data, demo_roles());
    CHECK(table.rows[0].n_missing == 1);
    CHECK(table.rows[1].n_missing == 0);
}

TEST_CASE("common support: constant scores land in a single bin per group") {
    PropensityPair scores;
    scores.p_w = Vector::Constant(10, 0.5);
    scores.p_xw = Vector::Constant(10, 0.5);
    Vector group(10);
    for (Index i = 0; i < 10; ++i) group[i] = i < 4 ? 1.0 : 0.0;
    const SupportHistogram histogram = common_support(scores, group, 20);
    int nonzero0 = 0, nonzero1 = 0;
    std::size_t total0 = 0, total1 = 0;
    for (std::size_t k = 0; k < 20; ++k) {
        nonzero0 += histogram.counts_group0[k] > 0 ? 1 : 0;
        nonzero1 += histogram.counts_group1[k] > 0 ? 1 : 0;
        total0 += histogram.counts_group0[k];
        total1 += histogram.counts_group1[k];
    }
    CHECK(nonzero0 == 1);
    CHECK(nonzero1 == 1);
    CHECK(total0 == 6);
    CHECK(total1 == 4);
}

TEST_CASE("common support: uniform scores are roughly flat") {
    Rng rng(4);
    const Index n = 8000;
    PropensityPair scores;
    scores.p_w.resize(n);
    scores.p_xw.resize(n);
    Vector group(n);
    for (Index i = 0; i < n; ++i) {
        scores.p_w[i] = rng.uniform();
        scores.p_xw[i] = rng.uniform();
        group[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    }
    const int bins = 10;
    const SupportHistogram histogram = common_support(scores, group, bins);
    std::size_t total0 = 0, total1 = 0;
    for (int k = 0; k < bins; ++k) {
        total0 += histogram.counts_group0[static_cast<std::size_t>(k)];
        total1 += histogram.counts_group1[static_cast<std::size_t>(k)];
    }
    // 3-sigma multinomial band around the expected count per bin.
    auto check_flat = [&](const std::vector<std::size_t>& counts, std::size_t total) {
        const double expected = static_cast<double>(total) / bins;
        const double sigma =
            std::sqrt(expected * (1.0 - 1.0 / static_cast<double>(bins)));
        for (const auto count : counts) {
            CHECK(std::abs(static_cast<double>(count) - expected) <= 3.0 * sigma);
        }
    };
    check_flat(histogram.counts_group0, total0);
    check_flat(histogram.counts_group1, total1);
}

TEST_CASE("disjoint supports have zero overlapping bins") {
    PropensityPair scores;
    scores.p_w.resize(8);
    scores.p_xw.resize(8);
    Vector group(8);
    for (Index i = 0; i < 8; ++i) {
        group[i] = i < 4 ? 1.0 : 0.0;
        scores.p_xw[i] = i < 4 ? 0.93 + 0.01 * static_cast<double>(i)
                               : 0.03 + 0.01 * static_cast<double>(i);
        scores.p_w[i] = scores.p_xw[i];
    }
    const SupportHistogram histogram = common_support(scores, group, 20);
    CHECK(overlapping_bins(histogram) == 0);
}

TEST_CASE("expectation gap arithmetic reproduces the reference survey cells") {
    // 6890.35 vs 6099.54: 12.965% against the survey table value 12.95.
    CHECK(std::abs(expectation_gap_pct(6890.35, 6099.54) - 12.95) <= 0.25);
    CHECK(expectation_gap_pct(5000.0, 5000.0) == 0.0);
    // 8430.80 vs 6099.54 evaluates to 38.22; the source table reports 38.02 and
    // its exact inputs are not recoverable, hence the loose band.
    const double three_year = expectation_gap_pct(8430.80, 6099.54);
    CHECK(three_year == doctest::Approx(38.2203).epsilon(1e-4));
    CHECK(std::abs(three_year - 38.02) <= 0.25);
    CHECK_THROWS_AS(expectation_gap_pct(5000.0, 0.0), DomainError);
}

TEST_CASE("gap antisymmetry identity g(a,b) = -g(b,a) * a / b") {
    // With g(a,b) = 100 (a-b)/b, exchanging the arguments rescales by a/b:
    // -g(b,a) * a/b = 100 (a-b)/b. Verified numerically on random pairs.
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = 0.5 + 10.0 * rng.uniform();
        const double b = 0.5 + 10.0 * rng.uniform();
        const double left = expectation_gap_pct(a, b);
        const double right = -expectation_gap_pct(b, a) * a / b;
        CHECK(left == doctest::Approx(right).epsilon(1e-10));
    }
}

TEST_CASE("wage categories convert at 500 CHF per class") {
    CHECK(categories_to_chf(0.6) == doctest::Approx(300.0).epsilon(1e-12));
    CHECK(categories_to_chf(0.0) == 0.0);
    CHECK(categories_to_chf(1.48) == doctest::Approx(740.0).epsilon(1e-12));
}

TEST_CASE("balance and support tables serialize with fixed column order") {
    const Dataset data = balanced_dataset();
    const BalanceTable table = balance_table(data, demo_roles());
    const std::string csv = to_csv(table);
    CHECK(csv.rfind("name,mean_group0,mean_group1,difference,pval,n_missing\n", 0) == 0);
    const Json json = to_json(table);
    CHECK(json["rows"].size() == table.rows.size());
    CHECK(json["weighted"] == false);

    PropensityPair scores;
    scores.p_w = Vector::Constant(4, 0.4);
    scores.p_xw = Vector::Constant(4, 0.6);
    Vector group(4);
    group << 1, 0, 1, 0;
    const SupportHistogram histogram = common_support(scores, group, 5);
    const std::string histogram_csv = to_csv(histogram);
    CHECK(histogram_csv.rfind("bin_lower,bin_upper,count_group0,count_group1\n", 0) == 0);
}
