#include "medgap/oaxaca.hpp"

#include "medgap/decomposition.hpp"

namespace medgap {

Vector DecompositionResult::components() const {
    Vector out(kNumComponents);
    out << total_gap, indirect_ref_female, direct_ref_female, indirect_ref_male,
        direct_ref_male;
    return out;
}

void DecompositionResult::set_components(const Eigen::Ref<const Vector>& values) {
    if (values.size() != static_cast<Index>(kNumComponents)) {
        throw DimensionError("DecompositionResult: expected 5 components");
    }
    total_gap = values[0];
    indirect_ref_female = values[1];
    direct_ref_female = values[2];
    indirect_ref_male = values[3];
    direct_ref_male = values[4];
}

namespace {

struct GroupFit {
    double intercept = 0.0;
    Vector slopes;      // mediator block only
    Vector mediator_means;
    double outcome_mean = 0.0;
    Index n = 0;
};

GroupFit fit_group(const Eigen::Ref<const Vector>& outcome,
                   const Eigen::Ref<const Matrix>& regressors, Index n_mediators,
                   const std::vector<std::string>* mediator_names,
                   const char* group_label) {
    GroupFit fit;
    fit.n = outcome.size();
    Matrix design(fit.n, regressors.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(regressors.cols()) = regressors;
    Vector coef;
    try {
        coef = solve_least_squares(design, outcome);
    } catch (const SingularityError& err) {
        std::string column = "intercept";
        if (err.column_index > 0) {
            const Index j = err.column_index - 1;
            if (mediator_names && j < static_cast<Index>(mediator_names->size())) {
                column = (*mediator_names)[static_cast<std::size_t>(j)];
            } else {
                column = "regressor " + std::to_string(j);
            }
        }
        throw SingularityError("oaxaca: column '" + column +
                                   "' is collinear within the " + group_label +
                                   " subsample",
                               err.column_index);
    }
    fit.intercept = coef[0];
    fit.slopes = coef.segment(1, n_mediators);
    fit.mediator_means = regressors.leftCols(n_mediators).colwise().mean();
    fit.outcome_mean = outcome.mean();
    return fit;
}

Vector components_from_fits(const GroupFit& g1, const GroupFit& g0,
                            bool direct_by_subtraction) {
    const double total = g1.outcome_mean - g0.outcome_mean;
    const Vector mean_gap = g1.mediator_means - g0.mediator_means;
    const double indirect_m = mean_gap.dot(g1.slopes);
    const double indirect_f = mean_gap.dot(g0.slopes);
    double direct_m, direct_f;
    if (direct_by_subtraction) {
        direct_m = total - indirect_m;
        direct_f = total - indirect_f;
    } else {
        direct_m = g1.intercept - g0.intercept +
                   g0.mediator_means.dot(g1.slopes - g0.slopes);
        direct_f = g1.intercept - g0.intercept +
                   g1.mediator_means.dot(g1.slopes - g0.slopes);
    }
    Vector out(kNumComponents);
    out << total, indirect_f, direct_f, indirect_m, direct_m;
    return out;
}

}  // namespace

Vector oaxaca_components(const Eigen::Ref<const Vector>& outcome,
                         const Eigen::Ref<const Vector>& group,
                         const Eigen::Ref<const Matrix>& mediators,
                         const std::vector<std::string>* mediator_names) {
    const Index n = outcome.size();
    if (group.size() != n || mediators.rows() != n) {
        throw DimensionError("oaxaca_components: length mismatch");
    }
    std::vector<Index> rows1, rows0;
    for (Index i = 0; i < n; ++i) {
        if (group[i] == 1.0) {
            rows1.push_back(i);
        } else if (group[i] == 0.0) {
            rows0.push_back(i);
        } else {
            throw DomainError("oaxaca_components: group must be exactly 0 or 1");
        }
    }
    if (rows1.empty() || rows0.empty()) {
        throw EmptySampleError("oaxaca_components: a group is empty");
    }
    auto subset = [&](const std::vector<Index>& rows, Vector& y_out, Matrix& x_out) {
        y_out.resize(static_cast<Index>(rows.size()));
        x_out.resize(static_cast<Index>(rows.size()), mediators.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            y_out[static_cast<Index>(i)] = outcome[rows[i]];
            x_out.row(static_cast<Index>(i)) = mediators.row(rows[i]);
        }
    };
    Vector y1, y0;
    Matrix x1, x0;
    subset(rows1, y1, x1);
    subset(rows0, y0, x0);
    const GroupFit g1 =
        fit_group(y1, x1, mediators.cols(), mediator_names, "group-1");
    const GroupFit g0 =
        fit_group(y0, x0, mediators.cols(), mediator_names, "group-0");
    return components_from_fits(g1, g0, /*direct_by_subtraction=*/false);
}

DecompositionResult oaxaca_decompose(const Dataset& data, const RoleMap& roles,
                                     MediatorSet mediator_set,
                                     bool include_controls) {
    roles.validate(data);
    const auto mediator_names = roles.mediators(mediator_set);
    if (mediator_names.empty()) {
        throw SchemaError("oaxaca: the selected mediator set is empty");
    }
    const auto used = roles.used_columns(mediator_set, include_controls);
    const AnalysisSample sample = complete_cases(data, used);

    const Vector y = column_vector(data, roles.outcome, sample.kept_rows);
    const Vector g = column_vector(data, roles.group, sample.kept_rows);
    std::vector<std::string> regressor_names = mediator_names;
    if (include_controls) {
        regressor_names.insert(regressor_names.end(), roles.controls.begin(),
                               roles.controls.end());
    }
    const Matrix regressors =
        design_matrix(data, regressor_names, sample.kept_rows, /*intercept=*/false);

    Vector comps;
    if (!include_controls) {
        comps = oaxaca_components(y, g, regressors, &regressor_names);
    } else {
        // Group fits over [mediators, controls]; the indirect component still
        // aggregates mediator mean gaps only.
        std::vector<Index> rows1, rows0;
        for (Index i = 0; i < g.size(); ++i) {
            (g[i] == 1.0 ? rows1 : rows0).push_back(i);
        }
        if (rows1.empty() || rows0.empty()) {
            throw EmptySampleError("oaxaca: a group is empty");
        }
        auto subset_fit = [&](const std::vector<Index>& rows, const char* label) {
            Vector y_g(static_cast<Index>(rows.size()));
            Matrix x_g(static_cast<Index>(rows.size()), regressors.cols());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                y_g[static_cast<Index>(i)] = y[rows[i]];
                x_g.row(static_cast<Index>(i)) = regressors.row(rows[i]);
            }
            return fit_group(y_g, x_g, static_cast<Index>(mediator_names.size()),
                             &regressor_names, label);
        };
        const GroupFit g1 = subset_fit(rows1, "group-1");
        const GroupFit g0 = subset_fit(rows0, "group-0");
        comps = components_from_fits(g1, g0, /*direct_by_subtraction=*/true);
    }

    DecompositionResult result;
    result.set_components(comps);
    result.n_dropped_missing = sample.n_dropped_missing;
    result.n_trimmed = 0;
    result.n_used = sample.kept_rows.size();
    result.mediator_set = mediator_set;
    return result;
}

}  // namespace medgap
