#pragma once

// Structural-equation synthetic data generator with closed-form direct and
// indirect effects (the verification oracle standing in for the unavailable
// survey), plus a Monte Carlo harness for bias/coverage of the estimators.
//
//   W ~ iid N(0, I),  G ~ Bernoulli(Phi(W gamma)),
//   X = alpha G + delta W + sd_x eps_x,
//   Y = theta G + X beta + G (X iota) + (X.^2) beta_sq + W kappa + sd_y eps_y.

#include <string>

#include "medgap/dataset.hpp"
#include "medgap/decomposition.hpp"
#include "medgap/ipw.hpp"
#include "medgap/numkit.hpp"

namespace medgap {

struct SyntheticDgp {
    std::size_t n = 1000;
    Index dim_w = 2;
    Vector gamma;        // dim_w, G-assignment coefficients
    Vector alpha;        // dim_x, G -> X effects
    Matrix delta;        // dim_x x dim_w, W -> X
    double theta = 0.0;  // direct G -> Y effect
    Vector beta;         // dim_x, X -> Y
    Vector beta_sq;      // dim_x, squared-mediator terms (empty = none)
    Vector interaction;  // dim_x, G*X terms (empty = none)
    Vector kappa;        // dim_w, W -> Y
    double noise_sd_x = 1.0;
    double noise_sd_y = 1.0;
    std::uint64_t seed = 0;

    Index dim_x() const { return alpha.size(); }
    void validate() const;
};

// Columns: g, y, w1..w{dim_w}, x1..x{dim_x}; no missing cells.
Dataset generate(const SyntheticDgp& dgp);

// Role map matching generate()'s column names, all mediators in M1.
RoleMap synthetic_roles(const SyntheticDgp& dgp);

struct TrueEffects {
    double total = 0.0;
    double indirect_ref_female = 0.0;
    double direct_ref_female = 0.0;
    double indirect_ref_male = 0.0;
    double direct_ref_male = 0.0;

    Vector components() const;  // same order as kComponentNames
};

// Closed forms: with no G*X interaction both references coincide at
// direct = theta and indirect = alpha'beta (+ alpha.^2 ' beta_sq for the
// squared-mediator variant).
TrueEffects true_effects(const SyntheticDgp& dgp);

enum class DecompEstimator { oaxaca, ipw };

struct McOptions {
    std::size_t bootstrap_b = 199;  // 0 skips SEs and coverage
    unsigned workers = 1;
    TrimmingPolicy trim{};
    MediatorSet mediator_set = MediatorSet::m1;
};

struct McReport {
    Vector mean_bias;     // per component, kComponentNames order
    Vector rmse;
    Vector ci_coverage;   // NaN when bootstrap_b == 0
    std::size_t replications = 0;
    std::size_t n_failed = 0;
};

// Repeatedly generates, estimates, and compares to true_effects; coverage is
// for estimate +- 1.96 * bootstrap SE. Requires replications >= 50.
McReport monte_carlo(const SyntheticDgp& dgp, DecompEstimator estimator,
                     std::size_t replications, const McOptions& options = {});

SyntheticDgp load_dgp_config(const std::string& path);

}  // namespace medgap
