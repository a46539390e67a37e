#pragma once

// End-to-end analysis runs shared by the CLI and the acceptance suite:
// decompositions with bootstrap inference attached, the three-estimator
// intervention-effect bundle, and IPW balance weights.

#include <array>
#include <utility>

#include "medgap/bootstrap.hpp"
#include "medgap/lasso.hpp"
#include "medgap/oaxaca.hpp"
#include "medgap/ipw.hpp"

namespace medgap {

struct RunOptions {
    std::size_t bootstrap_b = 499;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

// Point estimates from the full sample; SEs/p-values from resampled reruns of
// the whole pipeline (propensities are refit inside every replication).
DecompositionResult run_oaxaca(const Dataset& data, const RoleMap& roles,
                               MediatorSet mediator_set, const RunOptions& options);

DecompositionResult run_ipw(const Dataset& data, const RoleMap& roles,
                            MediatorSet mediator_set, const TrimmingPolicy& policy,
                            const RunOptions& options, TrimRule rule = TrimRule::both_scores);

// Mean difference, OLS with controls, and double lasso on the group column
// read as the treatment dummy (listwise deletion on {G, Y, W}).
struct AteExperimentResult {
    std::array<EffectEstimate, 3> estimates;
    std::size_t n_dropped_missing = 0;
    double control_mean = 0.0;
};
AteExperimentResult run_ate_experiment(const Dataset& data, const RoleMap& roles,
                                       std::uint64_t seed);

// Table-6-style reweighting weights: G/p(X,W) + (1-G)/(1-p(X,W)) on post-trim
// rows, zero elsewhere (missing or trimmed). Returns the full-length weight
// vector and the trimmed count.
std::pair<Vector, std::size_t> ipw_balance_weights(const Dataset& data,
                                                   const RoleMap& roles,
                                                   MediatorSet mediator_set,
                                                   const TrimmingPolicy& policy);

}  // namespace medgap
