#include "medgap/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace medgap {

namespace {

constexpr double kSdFloor = 1e-12;
constexpr double kIrlsWeightFloor = 1e-5;

struct StdData {
    Matrix xs;               // standardized columns; degenerate columns zeroed
    Vector mean;
    Vector sd;
    std::vector<char> ok;    // 0 for constant columns
    Index n = 0;
};

StdData standardize(const Eigen::Ref<const Matrix>& x) {
    StdData std_data;
    std_data.n = x.rows();
    const Index p = x.cols();
    std_data.mean = x.colwise().mean();
    std_data.sd.resize(p);
    std_data.ok.assign(static_cast<std::size_t>(p), 1);
    std_data.xs.resize(x.rows(), p);
    for (Index j = 0; j < p; ++j) {
        Vector centered = x.col(j).array() - std_data.mean[j];
        const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(std_data.n));
        std_data.sd[j] = sd;
        if (sd < kSdFloor) {
            std_data.ok[static_cast<std::size_t>(j)] = 0;
            std_data.xs.col(j).setZero();
        } else {
            std_data.xs.col(j) = centered / sd;
        }
    }
    return std_data;
}

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

double lasso_objective(const StdData& std_data, const Vector& residual,
                       const Vector& b, double lambda) {
    return residual.squaredNorm() / (2.0 * static_cast<double>(std_data.n)) +
           lambda * b.lpNorm<1>();
}

// Cyclic coordinate descent on standardized data; b is both the warm start
// and the result. Returns the number of sweeps.
int cd_solve(const StdData& std_data, const Vector& centered_response,
             double lambda, double tol, int max_sweeps, Vector& b,
             std::vector<double>* trace) {
    const Index p = std_data.xs.cols();
    const double n = static_cast<double>(std_data.n);
    Vector residual = centered_response - std_data.xs * b;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Index j = 0; j < p; ++j) {
            if (!std_data.ok[static_cast<std::size_t>(j)]) continue;
            const double z = b[j] + std_data.xs.col(j).dot(residual) / n;
            const double updated = soft_threshold(z, lambda);
            const double delta = updated - b[j];
            if (delta != 0.0) {
                residual -= delta * std_data.xs.col(j);
                b[j] = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (trace) trace->push_back(lasso_objective(std_data, residual, b, lambda));
        if (max_delta <= tol) {
            ++sweep;
            break;
        }
    }
    if (sweep >= max_sweeps) {
        throw ConvergenceError("fit_lasso: coordinate descent did not converge", b);
    }
    return sweep;
}

LassoFit pack_fit(const StdData& std_data, const Vector& b_std, double base_intercept,
                  double lambda, int sweeps, std::vector<double> trace) {
    LassoFit fit;
    fit.lambda = lambda;
    fit.sweeps = sweeps;
    fit.objective_trace = std::move(trace);
    fit.coefficients = Vector::Zero(b_std.size());
    double shift = 0.0;
    for (Index j = 0; j < b_std.size(); ++j) {
        if (std_data.ok[static_cast<std::size_t>(j)] && b_std[j] != 0.0) {
            fit.coefficients[j] = b_std[j] / std_data.sd[j];
            shift += fit.coefficients[j] * std_data.mean[j];
            fit.active_set.push_back(j);
        }
    }
    fit.intercept = base_intercept - shift;
    return fit;
}

void check_finite(const Eigen::Ref<const Matrix>& design,
                  const Eigen::Ref<const Vector>& response) {
    if (design.rows() != response.size()) {
        throw DimensionError("lasso: design rows do not match response length");
    }
    if (design.rows() == 0) {
        throw DomainError("lasso: empty sample");
    }
    if (!design.allFinite() || !response.allFinite()) {
        throw DomainError("lasso: non-finite input");
    }
}

void check_binary_response(const Eigen::Ref<const Vector>& response) {
    bool any0 = false, any1 = false;
    for (Index i = 0; i < response.size(); ++i) {
        if (response[i] == 0.0) {
            any0 = true;
        } else if (response[i] == 1.0) {
            any1 = true;
        } else {
            throw DomainError("logistic lasso: response must be exactly 0 or 1");
        }
    }
    if (!any0 || !any1) {
        throw DomainError("logistic lasso: degenerate response (all 0 or all 1)");
    }
}

double logistic_prob(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// True (non-quadratic) KKT residual of the penalized binomial objective.
double logistic_kkt(const StdData& std_data, const Vector& response,
                    const Vector& b_std, double b0_std, double lambda) {
    const double n = static_cast<double>(std_data.n);
    Vector eta = (std_data.xs * b_std).array() + b0_std;
    Vector diff(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
        diff[i] = logistic_prob(eta[i]) - response[i];
    }
    double viol = std::abs(diff.sum() / n);
    for (Index j = 0; j < b_std.size(); ++j) {
        if (!std_data.ok[static_cast<std::size_t>(j)]) continue;
        const double g = std_data.xs.col(j).dot(diff) / n;
        if (b_std[j] == 0.0) {
            viol = std::max(viol, std::abs(g) - lambda);
        } else {
            viol = std::max(viol, std::abs(g + lambda * (b_std[j] > 0 ? 1.0 : -1.0)));
        }
    }
    return viol;
}

// One IRLS solve on standardized data; returns outer iterations.
int irls_solve(const StdData& std_data, const Vector& response, double lambda,
               double tol, int max_outer, Vector& b_std, double& b0_std) {
    const Index p = std_data.xs.cols();
    const double n = static_cast<double>(std_data.n);
    int outer = 0;
    for (; outer < max_outer; ++outer) {
        if (logistic_kkt(std_data, response, b_std, b0_std, lambda) <= tol) {
            return outer;
        }
        Vector eta = (std_data.xs * b_std).array() + b0_std;
        Vector w(eta.size()), z(eta.size());
        for (Index i = 0; i < eta.size(); ++i) {
            const double prob = logistic_prob(eta[i]);
            w[i] = std::max(prob * (1.0 - prob), kIrlsWeightFloor);
            z[i] = eta[i] + (response[i] - prob) / w[i];
        }
        const double sum_w = w.sum();
        Vector curvature(p);
        for (Index j = 0; j < p; ++j) {
            curvature[j] = std_data.ok[static_cast<std::size_t>(j)]
                               ? w.dot(std_data.xs.col(j).cwiseAbs2()) / n
                               : 0.0;
        }
        Vector residual = z - (std_data.xs * b_std).array().matrix();
        residual.array() -= b0_std;
        // Weighted coordinate descent on the working response.
        for (int inner = 0; inner < 1000; ++inner) {
            double max_delta = 0.0;
            const double delta0 = w.dot(residual) / sum_w;
            if (delta0 != 0.0) {
                b0_std += delta0;
                residual.array() -= delta0;
                max_delta = std::abs(delta0);
            }
            for (Index j = 0; j < p; ++j) {
                if (!std_data.ok[static_cast<std::size_t>(j)]) continue;
                const double rho =
                    (std_data.xs.col(j).cwiseProduct(w)).dot(residual) / n +
                    curvature[j] * b_std[j];
                const double updated = soft_threshold(rho, lambda) / curvature[j];
                const double delta = updated - b_std[j];
                if (delta != 0.0) {
                    residual -= delta * std_data.xs.col(j);
                    b_std[j] = updated;
                    max_delta = std::max(max_delta, std::abs(delta));
                }
            }
            if (max_delta <= 1e-10) break;
        }
    }
    return outer;
}

std::vector<Index> shuffled_indices(Index n, Rng& rng) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(
            rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    return order;
}

Matrix pick_rows(const Eigen::Ref<const Matrix>& x, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)) = x.row(rows[i]);
    }
    return out;
}

Vector pick(const Eigen::Ref<const Vector>& v, const std::vector<Index>& rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[static_cast<Index>(i)] = v[rows[i]];
    }
    return out;
}

double lambda_max_linear(const StdData& std_data, const Vector& centered_response) {
    double lmax = 0.0;
    for (Index j = 0; j < std_data.xs.cols(); ++j) {
        if (!std_data.ok[static_cast<std::size_t>(j)]) continue;
        lmax = std::max(lmax, std::abs(std_data.xs.col(j).dot(centered_response)) /
                                  static_cast<double>(std_data.n));
    }
    return lmax;
}

}  // namespace

LassoFit fit_lasso(const Eigen::Ref<const Matrix>& design,
                   const Eigen::Ref<const Vector>& response, double lambda,
                   double tol, int max_sweeps) {
    check_finite(design, response);
    if (lambda < 0.0) {
        throw DomainError("fit_lasso: lambda must be nonnegative");
    }
    const StdData std_data = standardize(design);
    const double y_mean = response.mean();
    const Vector centered = response.array() - y_mean;
    Vector b = Vector::Zero(design.cols());
    std::vector<double> trace;
    const int sweeps = cd_solve(std_data, centered, lambda, tol, max_sweeps, b, &trace);
    return pack_fit(std_data, b, y_mean, lambda, sweeps, std::move(trace));
}

double lasso_kkt_violation(const LassoFit& fit,
                           const Eigen::Ref<const Matrix>& design,
                           const Eigen::Ref<const Vector>& response) {
    const StdData std_data = standardize(design);
    const double y_mean = response.mean();
    Vector b_std = Vector::Zero(design.cols());
    for (Index j = 0; j < design.cols(); ++j) {
        if (std_data.ok[static_cast<std::size_t>(j)]) {
            b_std[j] = fit.coefficients[j] * std_data.sd[j];
        }
    }
    const Vector residual =
        (response.array() - y_mean).matrix() - std_data.xs * b_std;
    double viol = 0.0;
    for (Index j = 0; j < design.cols(); ++j) {
        if (!std_data.ok[static_cast<std::size_t>(j)]) continue;
        const double c = std_data.xs.col(j).dot(residual) / static_cast<double>(std_data.n);
        if (b_std[j] == 0.0) {
            viol = std::max(viol, std::abs(c) - fit.lambda);
        } else {
            viol = std::max(viol,
                            std::abs(c - fit.lambda * (b_std[j] > 0 ? 1.0 : -1.0)));
        }
    }
    return viol;
}

LassoFit fit_logistic_lasso(const Eigen::Ref<const Matrix>& design,
                            const Eigen::Ref<const Vector>& response,
                            double lambda, double tol, int max_outer) {
    check_finite(design, response);
    check_binary_response(response);
    if (lambda < 0.0) {
        throw DomainError("fit_logistic_lasso: lambda must be nonnegative");
    }
    const StdData std_data = standardize(design);
    const double y_mean = response.mean();
    Vector b_std = Vector::Zero(design.cols());
    double b0_std = std::log(y_mean / (1.0 - y_mean));
    const int outer = irls_solve(std_data, response, lambda, tol, max_outer, b_std, b0_std);
    if (logistic_kkt(std_data, response, b_std, b0_std, lambda) > tol) {
        LassoFit partial = pack_fit(std_data, b_std, b0_std, lambda, outer, {});
        throw ConvergenceError("fit_logistic_lasso: no convergence after " +
                                   std::to_string(max_outer) + " outer iterations",
                               partial.coefficients);
    }
    return pack_fit(std_data, b_std, b0_std, lambda, outer, {});
}

double logistic_lasso_kkt_violation(const LassoFit& fit,
                                    const Eigen::Ref<const Matrix>& design,
                                    const Eigen::Ref<const Vector>& response) {
    const StdData std_data = standardize(design);
    Vector b_std = Vector::Zero(design.cols());
    double shift = 0.0;
    for (Index j = 0; j < design.cols(); ++j) {
        if (std_data.ok[static_cast<std::size_t>(j)]) {
            b_std[j] = fit.coefficients[j] * std_data.sd[j];
            shift += fit.coefficients[j] * std_data.mean[j];
        }
    }
    const double b0_std = fit.intercept + shift;
    return logistic_kkt(std_data, response, b_std, b0_std, fit.lambda);
}

Vector predict_logistic_proba(const LassoFit& fit,
                              const Eigen::Ref<const Matrix>& design) {
    if (design.cols() != fit.coefficients.size()) {
        throw DimensionError("predict_logistic_proba: column count mismatch");
    }
    Vector eta = (design * fit.coefficients).array() + fit.intercept;
    Vector p(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
        p[i] = std::min(std::max(logistic_prob(eta[i]), 1e-6), 1.0 - 1e-6);
    }
    return p;
}

double cross_validated_lambda(const Eigen::Ref<const Matrix>& design,
                              const Eigen::Ref<const Vector>& response,
                              Index folds, Rng rng, bool logistic, int n_lambda) {
    const Index n = design.rows();
    if (folds < 2 || folds > n) {
        throw DomainError("cross_validated_lambda: folds must be in [2, n]");
    }
    if (n_lambda < 2) {
        throw DomainError("cross_validated_lambda: need at least 2 grid points");
    }
    const StdData full = standardize(design);
    // Same null-model threshold for both families: max_j |Xs_j'(y - ybar)| / n.
    const Vector target = response.array() - response.mean();
    double lmax = lambda_max_linear(full, target);
    if (lmax <= 0.0) lmax = 1.0;
    Vector grid(n_lambda);
    const double ratio = std::pow(1e-3, 1.0 / static_cast<double>(n_lambda - 1));
    for (int k = 0; k < n_lambda; ++k) {
        grid[k] = lmax * std::pow(ratio, k);
    }

    const auto order = shuffled_indices(n, rng);
    std::vector<Index> fold_of(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
            i % folds;
    }

    Vector cv_error = Vector::Zero(n_lambda);
    for (Index k = 0; k < folds; ++k) {
        std::vector<Index> train_rows, valid_rows;
        for (Index i = 0; i < n; ++i) {
            (fold_of[static_cast<std::size_t>(i)] == k ? valid_rows : train_rows)
                .push_back(i);
        }
        const Matrix x_train = pick_rows(design, train_rows);
        const Vector y_train = pick(response, train_rows);
        const Matrix x_valid = pick_rows(design, valid_rows);
        const Vector y_valid = pick(response, valid_rows);
        const StdData std_train = standardize(x_train);

        // Warm-started path from the largest penalty down.
        Vector b = Vector::Zero(design.cols());
        double b0 = logistic ? std::log(std::max(y_train.mean(), 1e-12) /
                                        std::max(1.0 - y_train.mean(), 1e-12))
                             : 0.0;
        const double y_train_mean = y_train.mean();
        const Vector centered_train = y_train.array() - y_train_mean;
        for (int g = 0; g < n_lambda; ++g) {
            if (logistic) {
                irls_solve(std_train, y_train, grid[g], 1e-7, 100, b, b0);
            } else {
                cd_solve(std_train, centered_train, grid[g], 1e-7, 100000, b, nullptr);
            }
            // Map to the original scale for validation predictions.
            Vector coef = Vector::Zero(design.cols());
            double shift = 0.0;
            for (Index j = 0; j < design.cols(); ++j) {
                if (std_train.ok[static_cast<std::size_t>(j)] && b[j] != 0.0) {
                    coef[j] = b[j] / std_train.sd[j];
                    shift += coef[j] * std_train.mean[j];
                }
            }
            const double intercept = (logistic ? b0 : y_train_mean) - shift;
            Vector eta = (x_valid * coef).array() + intercept;
            if (logistic) {
                for (Index i = 0; i < eta.size(); ++i) {
                    const double prob =
                        std::min(std::max(logistic_prob(eta[i]), 1e-9), 1.0 - 1e-9);
                    cv_error[g] -= 2.0 * (y_valid[i] * std::log(prob) +
                                          (1.0 - y_valid[i]) * std::log(1.0 - prob));
                }
            } else {
                cv_error[g] += (y_valid - eta).squaredNorm();
            }
        }
    }

    Index best = 0;
    for (Index g = 1; g < n_lambda; ++g) {
        if (cv_error[g] < cv_error[best]) best = g;
    }
    return grid[best];
}

EffectEstimate ate_double_lasso(const Eigen::Ref<const Vector>& outcome,
                                const Eigen::Ref<const Vector>& treated,
                                const Eigen::Ref<const Matrix>& controls,
                                std::uint64_t seed,
                                const DoubleLassoOptions& options) {
    const Index n = outcome.size();
    if (treated.size() != n || controls.rows() != n) {
        throw DimensionError("ate_double_lasso: length mismatch");
    }
    check_finite(controls, outcome);
    check_binary_response(treated);
    if (options.folds < 2) {
        throw DomainError("ate_double_lasso: need at least 2 folds");
    }

    Rng root(seed, 0x0d1);
    std::vector<Index> treated_rows, control_rows;
    for (Index i = 0; i < n; ++i) {
        (treated[i] == 1.0 ? treated_rows : control_rows).push_back(i);
    }

    // Penalties by cross-validation on the full sample, reused in every fold.
    const double lambda_y1 = cross_validated_lambda(
        pick_rows(controls, treated_rows), pick(outcome, treated_rows),
        options.cv_folds, root.substream(1), false, options.n_lambda);
    const double lambda_y0 = cross_validated_lambda(
        pick_rows(controls, control_rows), pick(outcome, control_rows),
        options.cv_folds, root.substream(2), false, options.n_lambda);
    const double lambda_p = cross_validated_lambda(
        controls, treated, options.cv_folds, root.substream(3), true,
        options.n_lambda);

    Rng fold_rng = root.substream(0);
    const auto order = shuffled_indices(n, fold_rng);
    std::vector<Index> fold_of(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
            i % options.folds;
    }

    Vector influence(n);
    Index n_clamped = 0;
    for (Index k = 0; k < options.folds; ++k) {
        std::vector<Index> train1, train0, train, fold_rows;
        for (Index i = 0; i < n; ++i) {
            if (fold_of[static_cast<std::size_t>(i)] == k) {
                fold_rows.push_back(i);
            } else {
                train.push_back(i);
                (treated[i] == 1.0 ? train1 : train0).push_back(i);
            }
        }
        if (train1.size() < 2 || train0.size() < 2 || fold_rows.empty()) {
            throw Error("ate_double_lasso: degenerate fold " + std::to_string(k));
        }
        const LassoFit fit1 = fit_lasso(pick_rows(controls, train1),
                                        pick(outcome, train1), lambda_y1);
        const LassoFit fit0 = fit_lasso(pick_rows(controls, train0),
                                        pick(outcome, train0), lambda_y0);
        const LassoFit fit_p = fit_logistic_lasso(pick_rows(controls, train),
                                                  pick(treated, train), lambda_p);
        const Matrix x_fold = pick_rows(controls, fold_rows);
        const Vector m1 = (x_fold * fit1.coefficients).array() + fit1.intercept;
        const Vector m0 = (x_fold * fit0.coefficients).array() + fit0.intercept;
        Vector eta = (x_fold * fit_p.coefficients).array() + fit_p.intercept;
        for (std::size_t idx = 0; idx < fold_rows.size(); ++idx) {
            const Index i = fold_rows[idx];
            const auto ei = static_cast<Index>(idx);
            const double raw = logistic_prob(eta[ei]);
            double prob = raw;
            if (prob < options.clamp || prob > 1.0 - options.clamp) {
                prob = std::min(std::max(prob, options.clamp), 1.0 - options.clamp);
                ++n_clamped;
            }
            const double d = treated[i];
            influence[i] = m1[ei] - m0[ei] + d * (outcome[i] - m1[ei]) / prob -
                           (1.0 - d) * (outcome[i] - m0[ei]) / (1.0 - prob);
        }
    }

    EffectEstimate effect;
    effect.estimate = influence.mean();
    const double sd = std::sqrt(
        (influence.array() - effect.estimate).square().sum() /
        static_cast<double>(n - 1));
    effect.standard_error = sd / std::sqrt(static_cast<double>(n));
    effect.p_value = normal_p_value_two_sided(effect.estimate, effect.standard_error);
    effect.kind = EstimatorKind::double_lasso;
    effect.n_used = static_cast<std::size_t>(n);
    if (static_cast<double>(n_clamped) > 0.1 * static_cast<double>(n)) {
        effect.warning = "propensity clamp engaged on " + std::to_string(n_clamped) +
                         " of " + std::to_string(n) + " rows";
    }
    return effect;
}

}  // namespace medgap
