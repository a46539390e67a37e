#include "medgap/balance.hpp"

#include <cmath>

namespace medgap {

namespace {

struct GroupStats {
    double mean = 0.0;
    double mean_variance = 0.0;  // variance of the (possibly weighted) mean
    std::size_t n = 0;
};

GroupStats unweighted_stats(const std::vector<double>& values) {
    GroupStats stats;
    stats.n = values.size();
    if (values.empty()) return stats;
    double sum = 0.0;
    for (const double v : values) sum += v;
    stats.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (const double v : values) ss += (v - stats.mean) * (v - stats.mean);
        const double variance = ss / static_cast<double>(values.size() - 1);
        stats.mean_variance = variance / static_cast<double>(values.size());
    }
    return stats;
}

GroupStats weighted_stats(const std::vector<double>& values,
                          const std::vector<double>& weights) {
    GroupStats stats;
    stats.n = values.size();
    double sum_w = 0.0, sum_w2 = 0.0, sum_wv = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum_w += weights[i];
        sum_w2 += weights[i] * weights[i];
        sum_wv += weights[i] * values[i];
    }
    if (sum_w <= 0.0) {
        throw DomainError("balance_table: a group has zero total weight");
    }
    stats.mean = sum_wv / sum_w;
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weights[i] / sum_w;
        var += w * w * (values[i] - stats.mean) * (values[i] - stats.mean);
    }
    // Kish effective-n correction so equal weights reduce to the Welch formula.
    const double n_eff = sum_w * sum_w / sum_w2;
    stats.mean_variance = n_eff > 1.0 ? var * n_eff / (n_eff - 1.0) : 0.0;
    return stats;
}

}  // namespace

BalanceTable balance_table(const Dataset& data, const RoleMap& roles,
                           const Vector* weights,
                           std::optional<TrimmingPolicy> policy_used) {
    roles.validate(data);
    if (weights) {
        if (static_cast<std::size_t>(weights->size()) != data.n_rows()) {
            throw DimensionError("balance_table: weights length must equal n_rows");
        }
        for (Index i = 0; i < weights->size(); ++i) {
            if (!((*weights)[i] >= 0.0) || !std::isfinite((*weights)[i])) {
                throw DomainError("balance_table: weights must be finite and nonnegative");
            }
        }
    }

    const Column& group = data.column(roles.group);
    bool any0 = false, any1 = false;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        if (group.missing[i]) continue;
        (group.values[i] == 1.0 ? any1 : any0) = true;
    }
    if (!any0 || !any1) {
        throw EmptySampleError("balance_table: a group is empty");
    }

    std::vector<std::string> variables = roles.controls;
    variables.insert(variables.end(), roles.mediators_m1.begin(),
                     roles.mediators_m1.end());
    variables.insert(variables.end(), roles.mediators_m2.begin(),
                     roles.mediators_m2.end());

    BalanceTable table;
    table.weighted = weights != nullptr;
    table.trim_policy_used = policy_used;
    table.rows.reserve(variables.size());
    for (const auto& name : variables) {
        const Column& col = data.column(name);
        BalanceRow row;
        row.name = name;
        row.n_missing = data.n_missing(name);
        std::vector<double> v0, v1, w0, w1;
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            if (col.missing[i] || group.missing[i]) continue;
            if (weights) {
                const double w = (*weights)[static_cast<Index>(i)];
                if (w == 0.0) continue;
                (group.values[i] == 1.0 ? w1 : w0).push_back(w);
            }
            (group.values[i] == 1.0 ? v1 : v0).push_back(col.values[i]);
        }
        GroupStats s0, s1;
        if (weights) {
            s0 = weighted_stats(v0, w0);
            s1 = weighted_stats(v1, w1);
        } else {
            s0 = unweighted_stats(v0);
            s1 = unweighted_stats(v1);
        }
        row.mean_group0 = s0.mean;
        row.mean_group1 = s1.mean;
        row.difference = s1.mean - s0.mean;
        const double se = std::sqrt(s0.mean_variance + s1.mean_variance);
        row.p_value = normal_p_value_two_sided(row.difference, se);
        table.rows.push_back(std::move(row));
    }
    return table;
}

SupportHistogram common_support(const PropensityPair& scores,
                                const Eigen::Ref<const Vector>& group, int bins) {
    if (bins < 2) {
        throw DomainError("common_support: need at least 2 bins");
    }
    if (scores.p_xw.size() != group.size()) {
        throw DimensionError("common_support: score/group length mismatch");
    }
    SupportHistogram histogram;
    histogram.bin_edges.resize(bins + 1);
    for (int k = 0; k <= bins; ++k) {
        histogram.bin_edges[k] = static_cast<double>(k) / static_cast<double>(bins);
    }
    histogram.counts_group0.assign(static_cast<std::size_t>(bins), 0);
    histogram.counts_group1.assign(static_cast<std::size_t>(bins), 0);
    for (Index i = 0; i < scores.p_xw.size(); ++i) {
        const double p = scores.p_xw[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("common_support: score outside [0, 1]");
        }
        auto bin = static_cast<std::size_t>(
            std::min(static_cast<int>(p * bins), bins - 1));
        if (group[i] == 1.0) {
            ++histogram.counts_group1[bin];
        } else if (group[i] == 0.0) {
            ++histogram.counts_group0[bin];
        } else {
            throw DomainError("common_support: group must be exactly 0 or 1");
        }
    }
    return histogram;
}

int overlapping_bins(const SupportHistogram& histogram) {
    int count = 0;
    for (std::size_t k = 0; k < histogram.counts_group0.size(); ++k) {
        if (histogram.counts_group0[k] > 0 && histogram.counts_group1[k] > 0) {
            ++count;
        }
    }
    return count;
}

double expectation_gap_pct(double expected_wage, double realized_wage) {
    if (!(realized_wage > 0.0)) {
        throw DomainError("expectation_gap_pct: realized wage must be positive");
    }
    return 100.0 * (expected_wage - realized_wage) / realized_wage;
}

double categories_to_chf(double categories) { return categories * 500.0; }

}  // namespace medgap
