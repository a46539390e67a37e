#include "medgap/ipw.hpp"

#include "medgap/probit.hpp"

namespace medgap {

namespace {

void validate_policy(const TrimmingPolicy& policy) {
    if (!(policy.lower >= 0.0 && policy.lower < policy.upper && policy.upper <= 1.0)) {
        throw DomainError("trimming policy needs 0 <= lower < upper <= 1");
    }
}

// sum(w y) / sum(w) over rows where mask holds.
double normalized_weighted_mean(const Eigen::Ref<const Vector>& outcome,
                                const Eigen::Ref<const Vector>& weights,
                                const Eigen::Ref<const Vector>& group,
                                double group_value) {
    double numerator = 0.0, denominator = 0.0;
    for (Index i = 0; i < outcome.size(); ++i) {
        if (group[i] == group_value) {
            numerator += weights[i] * outcome[i];
            denominator += weights[i];
        }
    }
    if (denominator <= 0.0) {
        throw EmptySampleError("ipw: a treatment state has no weight");
    }
    return numerator / denominator;
}

}  // namespace

PropensityPair estimate_propensities(const Dataset& data, const RoleMap& roles,
                                     MediatorSet mediator_set,
                                     const std::vector<std::size_t>& rows) {
    const Vector g = column_vector(data, roles.group, rows);
    const Matrix design_w =
        design_matrix(data, roles.controls, rows, /*intercept=*/true);
    std::vector<std::string> xw_names = roles.mediators(mediator_set);
    xw_names.insert(xw_names.end(), roles.controls.begin(), roles.controls.end());
    const Matrix design_xw = design_matrix(data, xw_names, rows, /*intercept=*/true);

    PropensityPair scores;
    scores.p_w = fit_probit(design_w, g).fitted_probabilities;
    scores.p_xw = fit_probit(design_xw, g).fitted_probabilities;
    return scores;
}

std::pair<std::vector<Index>, std::size_t> trim(const PropensityPair& scores,
                                                const TrimmingPolicy& policy,
                                                TrimRule rule) {
    validate_policy(policy);
    if (scores.p_w.size() != scores.p_xw.size()) {
        throw DimensionError("trim: score vectors differ in length");
    }
    std::vector<Index> kept;
    kept.reserve(static_cast<std::size_t>(scores.p_xw.size()));
    for (Index i = 0; i < scores.p_xw.size(); ++i) {
        const bool xw_ok =
            scores.p_xw[i] >= policy.lower && scores.p_xw[i] <= policy.upper;
        const bool w_ok =
            scores.p_w[i] >= policy.lower && scores.p_w[i] <= policy.upper;
        const bool keep = rule == TrimRule::both_scores ? (xw_ok && w_ok) : xw_ok;
        if (keep) kept.push_back(i);
    }
    const std::size_t n_trimmed =
        static_cast<std::size_t>(scores.p_xw.size()) - kept.size();
    if (kept.empty()) {
        throw EmptySampleError("trim: every observation was trimmed");
    }
    return {std::move(kept), n_trimmed};
}

Vector ipw_components_from_scores(const Eigen::Ref<const Vector>& outcome,
                                  const Eigen::Ref<const Vector>& group,
                                  const Eigen::Ref<const Vector>& p_w,
                                  const Eigen::Ref<const Vector>& p_xw) {
    const Index n = outcome.size();
    if (group.size() != n || p_w.size() != n || p_xw.size() != n) {
        throw DimensionError("ipw_components_from_scores: length mismatch");
    }
    for (Index i = 0; i < n; ++i) {
        if (!(p_w[i] > 0.0 && p_w[i] < 1.0 && p_xw[i] > 0.0 && p_xw[i] < 1.0)) {
            throw DomainError("ipw: propensity scores must lie strictly in (0, 1)");
        }
        if (group[i] != 0.0 && group[i] != 1.0) {
            throw DomainError("ipw: group must be exactly 0 or 1");
        }
    }

    // Reference group 1 (male), components already in m-f orientation.
    Vector w1(n), w2(n), w3(n);
    for (Index i = 0; i < n; ++i) {
        w1[i] = 1.0 / p_w[i];
        w2[i] = (1.0 - p_xw[i]) / (p_xw[i] * (1.0 - p_w[i]));
        w3[i] = 1.0 / (1.0 - p_w[i]);
    }
    const double mean_w1_g1 = normalized_weighted_mean(outcome, w1, group, 1.0);
    const double mean_w2_g1 = normalized_weighted_mean(outcome, w2, group, 1.0);
    const double mean_w3_g0 = normalized_weighted_mean(outcome, w3, group, 0.0);
    const double indirect_m = mean_w1_g1 - mean_w2_g1;
    const double direct_m = mean_w2_g1 - mean_w3_g0;

    // Reference group 0: exchange groups and scores in the same formulas, then
    // flip the sign so the components keep the m-f orientation.
    Vector w2_swapped(n);
    for (Index i = 0; i < n; ++i) {
        w2_swapped[i] = p_xw[i] / ((1.0 - p_xw[i]) * p_w[i]);
    }
    const double mean_w2s_g0 = normalized_weighted_mean(outcome, w2_swapped, group, 0.0);
    const double indirect_f = -(mean_w3_g0 - mean_w2s_g0);
    const double direct_f = -(mean_w2s_g0 - mean_w1_g1);

    const double total = mean_w1_g1 - mean_w3_g0;
    Vector out(kNumComponents);
    out << total, indirect_f, direct_f, indirect_m, direct_m;
    return out;
}

DecompositionResult ipw_mediation(const Dataset& data, const RoleMap& roles,
                                  MediatorSet mediator_set,
                                  const TrimmingPolicy& policy, TrimRule rule) {
    roles.validate(data);
    validate_policy(policy);
    if (roles.mediators(mediator_set).empty()) {
        throw SchemaError("ipw: the selected mediator set is empty");
    }
    const auto used = roles.used_columns(mediator_set, /*with_controls=*/true);
    const AnalysisSample sample = complete_cases(data, used);

    const PropensityPair scores =
        estimate_propensities(data, roles, mediator_set, sample.kept_rows);
    const auto [kept_local, n_trimmed] = trim(scores, policy, rule);

    Vector y_all = column_vector(data, roles.outcome, sample.kept_rows);
    Vector g_all = column_vector(data, roles.group, sample.kept_rows);
    const Index m = static_cast<Index>(kept_local.size());
    Vector y(m), g(m), p_w(m), p_xw(m);
    for (Index i = 0; i < m; ++i) {
        const Index src = kept_local[static_cast<std::size_t>(i)];
        y[i] = y_all[src];
        g[i] = g_all[src];
        p_w[i] = scores.p_w[src];
        p_xw[i] = scores.p_xw[src];
    }
    if ((g.array() == 1.0).count() == 0 || (g.array() == 0.0).count() == 0) {
        throw EmptySampleError("ipw: a group is empty after trimming");
    }

    DecompositionResult result;
    result.set_components(ipw_components_from_scores(y, g, p_w, p_xw));
    result.n_dropped_missing = sample.n_dropped_missing;
    result.n_trimmed = n_trimmed;
    result.n_used = static_cast<std::size_t>(m);
    result.mediator_set = mediator_set;
    return result;
}

}  // namespace medgap
