#pragma once

// Nonparametric bootstrap standard errors and normal-approximation p-values
// for any estimator closure over a Dataset. Replicate b always draws from
// substream b, so results are bit-identical across worker counts.

#include <functional>
#include <optional>
#include <string>

#include "medgap/dataset.hpp"
#include "medgap/numkit.hpp"

namespace medgap {

struct BootstrapOptions {
    std::size_t replications = 499;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    // When set, rows are resampled within the levels of this column so that
    // per-level counts are preserved. Simple iid resampling is the default.
    std::optional<std::string> stratify_column;
};

struct BootstrapResult {
    Vector point_estimate;          // from the full sample
    Matrix replicate_estimates;     // successful replicates x components
    Vector standard_errors;
    Vector p_values;
    std::size_t n_failed_replicates = 0;
    bool failure_warning = false;   // set when failures reach B/10
};

using DatasetEstimator = std::function<Vector(const Dataset&)>;

// Estimation errors (medgap::Error) inside a replicate mark it failed and
// excluded; more than B/2 failures raise InferenceError.
BootstrapResult bootstrap(const DatasetEstimator& estimator, const Dataset& data,
                          const BootstrapOptions& options = {});

// One resample of size n with replacement (exposed for tests).
std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng);

}  // namespace medgap
