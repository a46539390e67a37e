#include "medgap/ols.hpp"

#include <cmath>

namespace medgap {

namespace {

void check_binary(const Eigen::Ref<const Vector>& treated) {
    for (Index i = 0; i < treated.size(); ++i) {
        if (treated[i] != 0.0 && treated[i] != 1.0) {
            throw DomainError("treatment indicator must be exactly 0 or 1 (row " +
                              std::to_string(i) + ")");
        }
    }
}

}  // namespace

OlsFit fit_ols(const Eigen::Ref<const Matrix>& design,
               const Eigen::Ref<const Vector>& response, HcVariant variant) {
    const Index n = design.rows();
    const Index k = design.cols();
    OlsFit fit;
    fit.coefficients = solve_least_squares(design, response);
    fit.residuals = response - design * fit.coefficients;

    // Bread from the QR factors of the design.
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    const Matrix r_inv = qr.matrixR()
                             .topLeftCorner(k, k)
                             .triangularView<Eigen::Upper>()
                             .solve(Matrix::Identity(k, k));
    const Matrix bread =
        qr.colsPermutation() * (r_inv * r_inv.transpose()) *
        qr.colsPermutation().transpose();

    Vector weights = fit.residuals.array().square();
    double scale = 1.0;
    switch (variant) {
        case HcVariant::hc0:
            break;
        case HcVariant::hc1:
            if (n <= k) throw DomainError("HC1 needs more rows than columns");
            scale = static_cast<double>(n) / static_cast<double>(n - k);
            break;
        case HcVariant::hc3: {
            const Vector leverage =
                ((design * bread).cwiseProduct(design)).rowwise().sum();
            for (Index i = 0; i < n; ++i) {
                const double h = std::min(leverage[i], 1.0 - 1e-12);
                weights[i] /= (1.0 - h) * (1.0 - h);
            }
            break;
        }
    }
    const Matrix meat = design.transpose() * weights.asDiagonal() * design;
    Matrix cov = scale * (bread * meat * bread);
    fit.robust_covariance = 0.5 * (cov + cov.transpose());
    return fit;
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::mean_difference: return "mean_difference";
        case EstimatorKind::ols_controls: return "ols_controls";
        case EstimatorKind::double_lasso: return "double_lasso";
        case EstimatorKind::ipw_total: return "ipw_total";
        case EstimatorKind::ob_component: return "ob_component";
        case EstimatorKind::ipw_component: return "ipw_component";
    }
    return "unknown";
}

EffectEstimate ate_mean_difference(const Eigen::Ref<const Vector>& outcome,
                                   const Eigen::Ref<const Vector>& treated) {
    if (outcome.size() != treated.size()) {
        throw DimensionError("ate_mean_difference: length mismatch");
    }
    check_binary(treated);
    double sum1 = 0.0, sum0 = 0.0;
    Index n1 = 0, n0 = 0;
    for (Index i = 0; i < outcome.size(); ++i) {
        if (treated[i] == 1.0) {
            sum1 += outcome[i];
            ++n1;
        } else {
            sum0 += outcome[i];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) {
        throw EmptySampleError("ate_mean_difference: a treatment group is empty");
    }
    if (n1 < 2 || n0 < 2) {
        throw DomainError(
            "ate_mean_difference: each group needs at least 2 observations for the "
            "Welch standard error");
    }
    const double mean1 = sum1 / static_cast<double>(n1);
    const double mean0 = sum0 / static_cast<double>(n0);
    double ss1 = 0.0, ss0 = 0.0;
    for (Index i = 0; i < outcome.size(); ++i) {
        if (treated[i] == 1.0) {
            ss1 += (outcome[i] - mean1) * (outcome[i] - mean1);
        } else {
            ss0 += (outcome[i] - mean0) * (outcome[i] - mean0);
        }
    }
    const double var1 = ss1 / static_cast<double>(n1 - 1);
    const double var0 = ss0 / static_cast<double>(n0 - 1);

    EffectEstimate effect;
    effect.estimate = mean1 - mean0;
    effect.standard_error = std::sqrt(var1 / static_cast<double>(n1) +
                                      var0 / static_cast<double>(n0));
    effect.p_value = normal_p_value_two_sided(effect.estimate, effect.standard_error);
    effect.kind = EstimatorKind::mean_difference;
    effect.n_used = static_cast<std::size_t>(outcome.size());
    return effect;
}

EffectEstimate ate_ols_controls(const Eigen::Ref<const Vector>& outcome,
                                const Eigen::Ref<const Vector>& treated,
                                const Eigen::Ref<const Matrix>& controls,
                                HcVariant variant) {
    const Index n = outcome.size();
    if (treated.size() != n || controls.rows() != n) {
        throw DimensionError("ate_ols_controls: length mismatch");
    }
    check_binary(treated);
    Matrix design(n, controls.cols() + 2);
    design.col(0).setOnes();
    design.col(1) = treated;
    design.rightCols(controls.cols()) = controls;
    const OlsFit fit = fit_ols(design, outcome, variant);

    EffectEstimate effect;
    effect.estimate = fit.coefficients[1];
    effect.standard_error = std::sqrt(std::max(fit.robust_covariance(1, 1), 0.0));
    effect.p_value = normal_p_value_two_sided(effect.estimate, effect.standard_error);
    effect.kind = EstimatorKind::ols_controls;
    effect.n_used = static_cast<std::size_t>(n);
    return effect;
}

}  // namespace medgap
