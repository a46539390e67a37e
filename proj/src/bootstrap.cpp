#include "medgap/bootstrap.hpp"

#include <cmath>
#include <map>
#include <vector>

namespace medgap {

namespace {

std::vector<std::vector<std::size_t>> stratum_rows(const Dataset& data,
                                                   const std::string& column) {
    const Column& col = data.column(column);
    std::map<double, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        if (col.missing[i]) {
            throw DomainError("bootstrap: stratification column '" + column +
                              "' has missing values");
        }
        strata[col.values[i]].push_back(i);
    }
    std::vector<std::vector<std::size_t>> out;
    out.reserve(strata.size());
    for (auto& [value, rows] : strata) out.push_back(std::move(rows));
    return out;
}

}  // namespace

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::size_t>(rng.uniform_index(n));
    }
    return rows;
}

BootstrapResult bootstrap(const DatasetEstimator& estimator, const Dataset& data,
                          const BootstrapOptions& options) {
    const std::size_t n = data.n_rows();
    const std::size_t b_total = options.replications;
    if (b_total < 2) {
        throw DomainError("bootstrap: need at least 2 replications");
    }
    if (n == 0) {
        throw EmptySampleError("bootstrap: empty dataset");
    }

    BootstrapResult result;
    result.point_estimate = estimator(data);
    const Index n_components = result.point_estimate.size();

    std::vector<std::vector<std::size_t>> strata;
    if (options.stratify_column) {
        strata = stratum_rows(data, *options.stratify_column);
    }

    const Rng root(options.seed);
    std::vector<char> ok(b_total, 0);
    Matrix replicates(static_cast<Index>(b_total), n_components);
    parallel_for(b_total, options.workers, [&](std::size_t b) {
        Rng rng = root.substream(b);
        std::vector<std::size_t> rows;
        if (strata.empty()) {
            rows = bootstrap_indices(n, rng);
        } else {
            rows.reserve(n);
            for (const auto& stratum : strata) {
                for (std::size_t i = 0; i < stratum.size(); ++i) {
                    rows.push_back(stratum[rng.uniform_index(stratum.size())]);
                }
            }
        }
        try {
            const Vector estimate = estimator(data.select_rows(rows));
            if (estimate.size() != n_components) {
                throw DimensionError("bootstrap: estimator returned a vector of "
                                     "unexpected length");
            }
            replicates.row(static_cast<Index>(b)) = estimate;
            ok[b] = 1;
        } catch (const Error&) {
            ok[b] = 0;  // failed replicate, excluded from inference
        }
    });

    std::size_t n_ok = 0;
    for (std::size_t b = 0; b < b_total; ++b) n_ok += ok[b] ? 1 : 0;
    result.n_failed_replicates = b_total - n_ok;
    result.failure_warning = 10 * result.n_failed_replicates >= b_total;
    if (2 * result.n_failed_replicates > b_total || n_ok < 2) {
        throw InferenceError("bootstrap: " + std::to_string(result.n_failed_replicates) +
                             " of " + std::to_string(b_total) +
                             " replicates failed");
    }

    result.replicate_estimates.resize(static_cast<Index>(n_ok), n_components);
    Index row = 0;
    for (std::size_t b = 0; b < b_total; ++b) {
        if (ok[b]) {
            result.replicate_estimates.row(row++) = replicates.row(static_cast<Index>(b));
        }
    }

    result.standard_errors.resize(n_components);
    result.p_values.resize(n_components);
    for (Index j = 0; j < n_components; ++j) {
        const double mean = result.replicate_estimates.col(j).mean();
        const double ss =
            (result.replicate_estimates.col(j).array() - mean).square().sum();
        result.standard_errors[j] = std::sqrt(ss / static_cast<double>(n_ok - 1));
        result.p_values[j] = normal_p_value_two_sided(result.point_estimate[j],
                                                      result.standard_errors[j]);
    }
    return result;
}

}  // namespace medgap
