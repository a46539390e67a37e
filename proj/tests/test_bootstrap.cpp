#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "medgap/bootstrap.hpp"
#include "oracle_utils.hpp"

using namespace medgap;

namespace {

Dataset normal_column(std::size_t n, std::uint64_t seed) {
    std::vector<Column> columns(1);
    columns[0].name = "y";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        columns[0].values.push_back(rng.normal());
    }
    return Dataset::from_columns(columns);
}

Vector sample_mean_estimator(const Dataset& data) {
    const Column& y = data.column("y");
    double sum = 0.0;
    for (const double v : y.values) sum += v;
    Vector out(1);
    out[0] = sum / static_cast<double>(y.values.size());
    return out;
}

}  // namespace

TEST_CASE("bootstrap SE of the mean tracks the analytic value") {
    const std::size_t n = 500;
    const Dataset data = normal_column(n, 2024);
    BootstrapOptions options;
    options.replications = 499;
    options.seed = 7;
    const BootstrapResult result = bootstrap(sample_mean_estimator, data, options);
    std::vector<double> values(data.column("y").values);
    const double analytic = oracle::sample_sd(values) / std::sqrt(static_cast<double>(n));
    CHECK(result.standard_errors[0] >= 0.85 * analytic);
    CHECK(result.standard_errors[0] <= 1.15 * analytic);
    CHECK(result.n_failed_replicates == 0);
}

TEST_CASE("constant outcome degenerates cleanly") {
    std::vector<Column> columns(1);
    columns[0].name = "y";
    columns[0].values.assign(50, 3.25);
    const Dataset data = Dataset::from_columns(columns);
    BootstrapOptions options;
    options.replications = 99;
    const BootstrapResult result = bootstrap(sample_mean_estimator, data, options);
    CHECK(result.standard_errors[0] == 0.0);
    CHECK(result.p_values[0] == 0.0);  // estimate nonzero, SE zero

    const BootstrapResult zero = bootstrap(
        [](const Dataset&) { return Vector::Zero(1); }, data, options);
    CHECK(zero.p_values[0] == 1.0);
}

TEST_CASE("same seed twice gives bit-identical results") {
    const Dataset data = normal_column(120, 5);
    BootstrapOptions options;
    options.replications = 199;
    options.seed = 42;
    const BootstrapResult a = bootstrap(sample_mean_estimator, data, options);
    const BootstrapResult b = bootstrap(sample_mean_estimator, data, options);
    CHECK(a.standard_errors[0] == b.standard_errors[0]);
    CHECK(a.p_values[0] == b.p_values[0]);
    CHECK((a.replicate_estimates - b.replicate_estimates).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("results are identical across worker counts") {
    const Dataset data = normal_column(150, 6);
    BootstrapOptions serial;
    serial.replications = 199;
    serial.seed = 11;
    serial.workers = 1;
    BootstrapOptions parallel = serial;
    parallel.workers = 4;
    const BootstrapResult a = bootstrap(sample_mean_estimator, data, serial);
    const BootstrapResult b = bootstrap(sample_mean_estimator, data, parallel);
    CHECK((a.replicate_estimates - b.replicate_estimates).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.standard_errors[0] == b.standard_errors[0]);
}

TEST_CASE("each resample has exactly n draws with replacement") {
    Rng rng(3);
    const std::size_t n = 37;
    const auto rows = bootstrap_indices(n, rng);
    CHECK(rows.size() == n);
    std::map<std::size_t, int> counts;
    for (const auto row : rows) {
        CHECK(row < n);
        counts[row] += 1;
    }
    int total = 0;
    for (const auto& [row, count] : counts) total += count;
    CHECK(total == static_cast<int>(n));
}

TEST_CASE("stratified resampling preserves stratum sizes") {
    std::vector<Column> columns(2);
    columns[0].name = "y";
    columns[1].name = "g";
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        columns[0].values.push_back(rng.normal());
        columns[1].values.push_back(i < 30 ? 1.0 : 0.0);
    }
    const Dataset data = Dataset::from_columns(columns);
    BootstrapOptions options;
    options.replications = 50;
    options.stratify_column = "g";
    const BootstrapResult result = bootstrap(
        [](const Dataset& d) {
            const Column& g = d.column("g");
            double count = 0.0;
            for (const double v : g.values) count += v;
            Vector out(1);
            out[0] = count;
            return out;
        },
        data, options);
    // Every replicate keeps exactly 30 rows with g == 1.
    for (Index b = 0; b < result.replicate_estimates.rows(); ++b) {
        CHECK(result.replicate_estimates(b, 0) == 30.0);
    }
}

TEST_CASE("failed replicates are excluded and counted") {
    const Dataset data = normal_column(60, 12);
    BootstrapOptions options;
    options.replications = 99;
    options.seed = 3;
    // An estimator that succeeds on the full sample but errors on essentially
    // every resample must raise InferenceError.
    double full_sum = 0.0;
    for (const double v : data.column("y").values) full_sum += v;
    CHECK_THROWS_AS(bootstrap(
                        [full_sum](const Dataset& d) -> Vector {
                            double sum = 0.0;
                            for (const double v : d.column("y").values) sum += v;
                            if (sum != full_sum) {
                                throw EmptySampleError("not the original sample");
                            }
                            return Vector::Zero(1);
                        },
                        data, options),
                    InferenceError);

    // A mild failure rate is tolerated but counted.
    const BootstrapResult result = bootstrap(
        [](const Dataset& d) -> Vector {
            const Column& y = d.column("y");
            double sum = 0.0;
            for (const double v : y.values) sum += v;
            const double mean = sum / static_cast<double>(y.values.size());
            // Deterministic in the data: fail for unusually high means.
            if (mean > 0.2) {
                throw EmptySampleError("resample looked degenerate");
            }
            Vector out(1);
            out[0] = mean;
            return out;
        },
        data, options);
    CHECK(result.n_failed_replicates < 50);
    CHECK(result.replicate_estimates.rows() ==
          static_cast<Index>(99 - result.n_failed_replicates));
    CHECK(result.failure_warning == (10 * result.n_failed_replicates >= 99));
}

TEST_CASE("B below 2 is rejected") {
    const Dataset data = normal_column(10, 1);
    BootstrapOptions options;
    options.replications = 1;
    CHECK_THROWS_AS(bootstrap(sample_mean_estimator, data, options), DomainError);
}
