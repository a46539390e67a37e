#pragma once

// OLS with heteroscedasticity-robust covariance, plus the mean-difference and
// OLS-with-controls intervention-effect estimators.

#include <string>

#include "medgap/numkit.hpp"

namespace medgap {

enum class HcVariant { hc0, hc1, hc3 };

struct OlsFit {
    Vector coefficients;
    Vector residuals;
    Matrix robust_covariance;
};

OlsFit fit_ols(const Eigen::Ref<const Matrix>& design,
               const Eigen::Ref<const Vector>& response,
               HcVariant variant = HcVariant::hc1);

enum class EstimatorKind {
    mean_difference,
    ols_controls,
    double_lasso,
    ipw_total,
    ob_component,
    ipw_component,
};
std::string to_string(EstimatorKind kind);

struct EffectEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    double p_value = 1.0;
    EstimatorKind kind = EstimatorKind::mean_difference;
    std::size_t n_used = 0;
    std::string warning;  // empty when clean
};

// mean(Y | treated) - mean(Y | control), Welch standard error, normal p-value.
EffectEstimate ate_mean_difference(const Eigen::Ref<const Vector>& outcome,
                                   const Eigen::Ref<const Vector>& treated);

// Coefficient on the treatment dummy in Y ~ [1, D, W], sandwich SE.
EffectEstimate ate_ols_controls(const Eigen::Ref<const Vector>& outcome,
                                const Eigen::Ref<const Vector>& treated,
                                const Eigen::Ref<const Matrix>& controls,
                                HcVariant variant = HcVariant::hc1);

}  // namespace medgap
