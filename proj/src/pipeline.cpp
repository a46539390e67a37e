#include "medgap/pipeline.hpp"

namespace medgap {

namespace {

void attach_inference(DecompositionResult& result, const DatasetEstimator& estimator,
                      const Dataset& data, const RunOptions& options) {
    BootstrapOptions boot;
    boot.replications = options.bootstrap_b;
    boot.seed = options.seed;
    boot.workers = options.workers;
    const BootstrapResult inference = bootstrap(estimator, data, boot);
    result.standard_errors = inference.standard_errors;
    result.p_values = inference.p_values;
    result.n_failed_replicates = inference.n_failed_replicates;
}

}  // namespace

DecompositionResult run_oaxaca(const Dataset& data, const RoleMap& roles,
                               MediatorSet mediator_set, const RunOptions& options) {
    DecompositionResult result = oaxaca_decompose(data, roles, mediator_set);
    attach_inference(
        result,
        [&roles, mediator_set](const Dataset& d) {
            return oaxaca_decompose(d, roles, mediator_set).components();
        },
        data, options);
    return result;
}

DecompositionResult run_ipw(const Dataset& data, const RoleMap& roles,
                            MediatorSet mediator_set, const TrimmingPolicy& policy,
                            const RunOptions& options, TrimRule rule) {
    DecompositionResult result = ipw_mediation(data, roles, mediator_set, policy, rule);
    attach_inference(
        result,
        [&roles, mediator_set, policy, rule](const Dataset& d) {
            return ipw_mediation(d, roles, mediator_set, policy, rule).components();
        },
        data, options);
    return result;
}

AteExperimentResult run_ate_experiment(const Dataset& data, const RoleMap& roles,
                                       std::uint64_t seed) {
    roles.validate(data);
    std::vector<std::string> used{roles.group, roles.outcome};
    used.insert(used.end(), roles.controls.begin(), roles.controls.end());
    const AnalysisSample sample = complete_cases(data, used);

    const Vector y = column_vector(data, roles.outcome, sample.kept_rows);
    const Vector d = column_vector(data, roles.group, sample.kept_rows);
    const Matrix w =
        design_matrix(data, roles.controls, sample.kept_rows, /*intercept=*/false);

    AteExperimentResult result;
    result.n_dropped_missing = sample.n_dropped_missing;
    result.estimates[0] = ate_mean_difference(y, d);
    result.estimates[1] = ate_ols_controls(y, d, w);
    result.estimates[2] = ate_double_lasso(y, d, w, seed);

    double control_sum = 0.0;
    Index n_control = 0;
    for (Index i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) {
            control_sum += y[i];
            ++n_control;
        }
    }
    result.control_mean = n_control > 0 ? control_sum / static_cast<double>(n_control) : 0.0;
    return result;
}

std::pair<Vector, std::size_t> ipw_balance_weights(const Dataset& data,
                                                   const RoleMap& roles,
                                                   MediatorSet mediator_set,
                                                   const TrimmingPolicy& policy) {
    roles.validate(data);
    // The weights condition on G, X, and W only; the outcome plays no role.
    std::vector<std::string> used{roles.group};
    const auto meds = roles.mediators(mediator_set);
    used.insert(used.end(), meds.begin(), meds.end());
    used.insert(used.end(), roles.controls.begin(), roles.controls.end());
    const AnalysisSample sample = complete_cases(data, used);

    const PropensityPair scores =
        estimate_propensities(data, roles, mediator_set, sample.kept_rows);
    const auto [kept_local, n_trimmed] = trim(scores, policy);

    const Vector g = column_vector(data, roles.group, sample.kept_rows);
    Vector weights = Vector::Zero(static_cast<Index>(data.n_rows()));
    for (const Index local : kept_local) {
        const auto row = static_cast<Index>(sample.kept_rows[static_cast<std::size_t>(local)]);
        const double p = scores.p_xw[local];
        weights[row] = g[local] == 1.0 ? 1.0 / p : 1.0 / (1.0 - p);
    }
    return {std::move(weights), n_trimmed};
}

}  // namespace medgap
