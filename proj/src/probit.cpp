#include "medgap/probit.hpp"

#include <cmath>
#include <limits>

namespace medgap {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
constexpr double kProbFloor = 1e-300;
constexpr double kProbCeil = 1.0 - 1.1102230246251565e-16;
constexpr double kSeparationEdge = 1e-12;

double log_pdf(double x) { return -0.5 * x * x - kHalfLog2Pi; }

struct ObsTerms {
    double prob;    // Phi(eta)
    double ll;      // log-likelihood contribution
    double score;   // d ll / d eta
    double weight;  // Fisher information weight phi^2 / (Phi (1 - Phi))
};

// Single-erfc fast path away from the tails; stable log-space formulas
// otherwise.
ObsTerms obs_terms(double eta, double y) {
    ObsTerms terms;
    terms.prob = normal_cdf(eta);
    const double lp = log_pdf(eta);
    if (terms.prob > 1e-8 && terms.prob < 1.0 - 1e-8) {
        const double pdf = std::exp(lp);
        const double complement = 1.0 - terms.prob;
        terms.ll = y == 1.0 ? std::log(terms.prob) : std::log(complement);
        terms.score = y == 1.0 ? pdf / terms.prob : -pdf / complement;
        terms.weight = pdf * pdf / (terms.prob * complement);
    } else {
        const double log_cdf_pos = log_normal_cdf(eta);
        const double log_cdf_neg = log_normal_cdf(-eta);
        terms.ll = y == 1.0 ? log_cdf_pos : log_cdf_neg;
        terms.score = y == 1.0 ? std::exp(lp - log_cdf_pos)
                               : -std::exp(lp - log_cdf_neg);
        terms.weight = std::exp(2.0 * lp - log_cdf_pos - log_cdf_neg);
    }
    return terms;
}

void validate_inputs(const Eigen::Ref<const Matrix>& design,
                     const Eigen::Ref<const Vector>& response) {
    if (design.rows() != response.size()) {
        throw DimensionError("probit: design rows do not match response length");
    }
    for (Index i = 0; i < response.size(); ++i) {
        if (response[i] != 0.0 && response[i] != 1.0) {
            throw DomainError("probit: response must be exactly 0 or 1 (row " +
                              std::to_string(i) + ")");
        }
    }
}

Vector clamp_probabilities(Vector p) {
    for (Index i = 0; i < p.size(); ++i) {
        p[i] = std::min(std::max(p[i], kProbFloor), kProbCeil);
    }
    return p;
}

struct IterationState {
    Vector prob, score, weight;
    double ll = 0.0;
    bool extreme = false;
};

void evaluate(const Eigen::Ref<const Matrix>& design,
              const Eigen::Ref<const Vector>& response, const Vector& beta,
              IterationState& state) {
    const Vector eta = design * beta;
    const Index n = eta.size();
    state.prob.resize(n);
    state.score.resize(n);
    state.weight.resize(n);
    state.ll = 0.0;
    state.extreme = false;
    for (Index i = 0; i < n; ++i) {
        const ObsTerms terms = obs_terms(eta[i], response[i]);
        state.prob[i] = terms.prob;
        state.score[i] = terms.score;
        state.weight[i] = terms.weight;
        state.ll += terms.ll;
        if (terms.prob <= kSeparationEdge || terms.prob >= 1.0 - kSeparationEdge) {
            state.extreme = true;
        }
    }
}

}  // namespace

double probit_log_likelihood(const Eigen::Ref<const Matrix>& design,
                             const Eigen::Ref<const Vector>& response,
                             const Eigen::Ref<const Vector>& coefficients) {
    const Vector eta = design * coefficients;
    double ll = 0.0;
    for (Index i = 0; i < eta.size(); ++i) {
        ll += obs_terms(eta[i], response[i]).ll;
    }
    return ll;
}

Vector probit_gradient(const Eigen::Ref<const Matrix>& design,
                       const Eigen::Ref<const Vector>& response,
                       const Eigen::Ref<const Vector>& coefficients) {
    const Vector eta = design * coefficients;
    Vector score(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
        score[i] = obs_terms(eta[i], response[i]).score;
    }
    return design.transpose() * score;
}

ProbitFit fit_probit(const Eigen::Ref<const Matrix>& design,
                     const Eigen::Ref<const Vector>& response, double tol,
                     int max_iter, std::vector<double>* log_likelihood_trace) {
    validate_inputs(design, response);
    const Index n = design.rows();
    const Index p = design.cols();
    if (n < p) {
        throw DomainError("probit: fewer rows than coefficients");
    }

    Vector beta = Vector::Zero(p);
    IterationState state, candidate_state;
    evaluate(design, response, beta, state);
    if (log_likelihood_trace) {
        log_likelihood_trace->clear();
        log_likelihood_trace->push_back(state.ll);
    }

    int iterations = 0;
    for (int it = 0;; ++it) {
        const Vector gradient = design.transpose() * state.score;
        if (gradient.cwiseAbs().maxCoeff() <= tol) {
            ProbitFit fit;
            fit.coefficients = beta;
            fit.log_likelihood = state.ll;
            fit.iterations = iterations;
            fit.converged = true;
            fit.fitted_probabilities = clamp_probabilities(std::move(state.prob));
            return fit;
        }
        if (state.extreme) {
            throw SeparationError(
                "probit: fitted probability within 1e-12 of 0/1 while the gradient "
                "is not small; data look (quasi-)separated");
        }
        if (it >= max_iter) {
            throw ConvergenceError("probit: no convergence after " +
                                       std::to_string(max_iter) + " iterations",
                                   beta);
        }

        // Fisher scoring step as a weighted least-squares solve.
        const Vector sqrt_w = state.weight.cwiseSqrt();
        const Matrix weighted_design = sqrt_w.asDiagonal() * design;
        const Vector rhs =
            sqrt_w.cwiseProduct((state.score.array() / state.weight.array()).matrix());
        const Vector delta = solve_least_squares(weighted_design, rhs);

        // Accept any step that does not decrease the log-likelihood beyond
        // floating-point noise; near the optimum genuine improvements sink
        // below one ulp of ll. The accepted pass doubles as the next
        // iteration's evaluation.
        const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                                   (1.0 + std::abs(state.ll));
        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            const Vector candidate = beta + step * delta;
            evaluate(design, response, candidate, candidate_state);
            if (std::isfinite(candidate_state.ll) &&
                candidate_state.ll >= state.ll - noise_floor) {
                beta = candidate;
                std::swap(state, candidate_state);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            throw ConvergenceError(
                "probit: step-halving could not improve the log-likelihood", beta);
        }
        ++iterations;
        if (log_likelihood_trace) log_likelihood_trace->push_back(state.ll);
    }
}

Vector predict_proba(const ProbitFit& fit, const Eigen::Ref<const Matrix>& design) {
    if (design.cols() != fit.coefficients.size()) {
        throw DimensionError("predict_proba: design has " +
                             std::to_string(design.cols()) + " columns, fit has " +
                             std::to_string(fit.coefficients.size()) +
                             " coefficients");
    }
    const Vector eta = design * fit.coefficients;
    Vector p(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
        p[i] = normal_cdf(eta[i]);
    }
    return clamp_probabilities(std::move(p));
}

}  // namespace medgap
