#pragma once

// L1-penalized regression by cyclic coordinate descent, a penalized logistic
// companion for propensity scores, and the cross-fitted AIPW ("double lasso")
// treatment-effect estimator.

#include <vector>

#include "medgap/numkit.hpp"
#include "medgap/ols.hpp"

namespace medgap {

struct LassoFit {
    double intercept = 0.0;
    Vector coefficients;  // original scale
    double lambda = 0.0;
    std::vector<Index> active_set;
    int sweeps = 0;
    // Standardized-scale objective after every sweep (nonincreasing).
    std::vector<double> objective_trace;
};

// Minimizes (1/2n)||y - b0 - X b||^2 + lambda * ||b||_1 with columns
// standardized internally (mean 0, variance 1 with 1/n scaling) and an
// unpenalized intercept. Coefficients are reported on the original scale.
// Constant columns get coefficient exactly 0.
LassoFit fit_lasso(const Eigen::Ref<const Matrix>& design,
                   const Eigen::Ref<const Vector>& response, double lambda,
                   double tol = 1e-7, int max_sweeps = 100000);

// Max KKT residual of a fit on the standardized scale: |g_j| - lambda at
// inactive coordinates, |g_j - sign(b_j) * lambda| at active ones.
double lasso_kkt_violation(const LassoFit& fit,
                           const Eigen::Ref<const Matrix>& design,
                           const Eigen::Ref<const Vector>& response);

// Penalized binomial likelihood by iteratively reweighted coordinate descent,
// converged on the true (non-quadratic) KKT residual.
LassoFit fit_logistic_lasso(const Eigen::Ref<const Matrix>& design,
                            const Eigen::Ref<const Vector>& response,
                            double lambda, double tol = 1e-8,
                            int max_outer = 200);

double logistic_lasso_kkt_violation(const LassoFit& fit,
                                    const Eigen::Ref<const Matrix>& design,
                                    const Eigen::Ref<const Vector>& response);

// Fitted probabilities clamped to [1e-6, 1 - 1e-6].
Vector predict_logistic_proba(const LassoFit& fit,
                              const Eigen::Ref<const Matrix>& design);

// K-fold cross-validated penalty over a geometric grid from lambda_max down.
double cross_validated_lambda(const Eigen::Ref<const Matrix>& design,
                              const Eigen::Ref<const Vector>& response,
                              Index folds, Rng rng, bool logistic,
                              int n_lambda = 20);

struct DoubleLassoOptions {
    Index folds = 5;      // cross-fitting folds
    Index cv_folds = 5;   // penalty-selection folds
    int n_lambda = 20;
    double clamp = 1e-6;  // propensity clamp inside AIPW
};

// AIPW with lasso outcome models per arm and a logistic-lasso propensity,
// cross-fitted; SE from the influence terms. A warning is attached when the
// propensity clamp engages on more than 10% of rows.
EffectEstimate ate_double_lasso(const Eigen::Ref<const Vector>& outcome,
                                const Eigen::Ref<const Vector>& treated,
                                const Eigen::Ref<const Matrix>& controls,
                                std::uint64_t seed,
                                const DoubleLassoOptions& options = {});

}  // namespace medgap
