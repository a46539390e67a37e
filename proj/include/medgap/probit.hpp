#pragma once

// Maximum-likelihood probit, the propensity model behind Pr(G=1|W) and
// Pr(G=1|X,W). Fisher scoring with step-halving; separation is an error, not
// a silent clamp (downstream trimming handles extreme scores).

#include <vector>

#include "medgap/numkit.hpp"

namespace medgap {

struct ProbitFit {
    Vector coefficients;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    Vector fitted_probabilities;  // strictly inside (0, 1)
};

double probit_log_likelihood(const Eigen::Ref<const Matrix>& design,
                             const Eigen::Ref<const Vector>& response,
                             const Eigen::Ref<const Vector>& coefficients);

Vector probit_gradient(const Eigen::Ref<const Matrix>& design,
                       const Eigen::Ref<const Vector>& response,
                       const Eigen::Ref<const Vector>& coefficients);

// Newton/Fisher scoring until the gradient max-norm falls below tol. Throws
// SeparationError when a fitted probability reaches within 1e-12 of 0/1 while
// the gradient is still large, and ConvergenceError (carrying the last
// iterate) after max_iter. The optional trace records the log-likelihood of
// every accepted iterate.
ProbitFit fit_probit(const Eigen::Ref<const Matrix>& design,
                     const Eigen::Ref<const Vector>& response,
                     double tol = 1e-8, int max_iter = 100,
                     std::vector<double>* log_likelihood_trace = nullptr);

Vector predict_proba(const ProbitFit& fit, const Eigen::Ref<const Matrix>& design);

}  // namespace medgap
