#pragma once

// Balance tables before/after IPW reweighting, common-support histogram data,
// and the expectation-vs-realization gap arithmetic.

#include <optional>
#include <string>
#include <vector>

#include "medgap/dataset.hpp"
#include "medgap/ipw.hpp"

namespace medgap {

struct BalanceRow {
    std::string name;
    double mean_group0 = 0.0;
    double mean_group1 = 0.0;
    double difference = 0.0;  // group1 - group0
    double p_value = 1.0;
    std::size_t n_missing = 0;
};

struct BalanceTable {
    std::vector<BalanceRow> rows;  // controls first, then M1, then M2
    bool weighted = false;
    std::optional<TrimmingPolicy> trim_policy_used;
};

// Unweighted mode: Welch two-sample statistic with a large-sample normal
// p-value. Weighted mode: normalized-weight means per group and a z-test
// treating the weights as fixed (diagnostic use only). Weights align with
// dataset rows; zero-weight rows drop out of the weighted means.
BalanceTable balance_table(const Dataset& data, const RoleMap& roles,
                           const Vector* weights = nullptr,
                           std::optional<TrimmingPolicy> policy_used = std::nullopt);

struct SupportHistogram {
    Vector bin_edges;  // bins + 1 strictly increasing edges over [0, 1]
    std::vector<std::size_t> counts_group0;
    std::vector<std::size_t> counts_group1;
};

// Histogram of Pr(G=1|X,W) per group over shared equal-width bins.
SupportHistogram common_support(const PropensityPair& scores,
                                const Eigen::Ref<const Vector>& group,
                                int bins = 20);

// Number of bins where both groups have mass.
int overlapping_bins(const SupportHistogram& histogram);

// 100 * (expected - realized) / realized; realized must be positive.
double expectation_gap_pct(double expected_wage, double realized_wage);

// One outcome category spans 500 CHF of monthly gross wage.
double categories_to_chf(double categories);

}  // namespace medgap
