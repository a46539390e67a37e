#pragma once

// Deterministic numerical kernels shared by all estimators: dense least
// squares, Gaussian distribution functions, and a counter-based PRNG whose
// substreams are independent by construction.

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "medgap/errors.hpp"

namespace medgap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Least squares via column-pivoted Householder QR. A rank-deficient design
// raises SingularityError naming the first column that is linearly dependent
// on the columns before it.
Vector solve_least_squares(const Eigen::Ref<const Matrix>& design,
                           const Eigen::Ref<const Vector>& response);

double normal_pdf(double x);
double normal_cdf(double x);
// Stable log Phi, usable deep in the left tail (Mills-ratio expansion).
double log_normal_cdf(double x);
// Inverse Phi (Wichura's AS 241 rational approximation plus one Newton
// polish). Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

// Two-sided p-value under a normal reference. A zero standard error
// degenerates to 0 (nonzero estimate) or 1 (zero estimate).
double normal_p_value_two_sided(double estimate, double standard_error);

// Pure hash for hierarchical seeding (replication r of a run seeded s uses
// derive_seed(s, r), independent of execution order).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;
};

// Counter-based generator: draw i of stream s under seed k is a pure function
// of (k, s, i). Substream derivation touches no shared state, so replicate b
// can always use substream b regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0);
    explicit Rng(const RngState& state);

    double uniform();                   // [0, 1)
    double normal();                    // N(0, 1) by inverse transform
    std::uint64_t uniform_index(std::uint64_t n);  // unbiased draw from {0,...,n-1}

    Rng substream(std::uint64_t index) const;
    const RngState& state() const { return state_; }

private:
    std::uint64_t next_raw();

    RngState state_;
    std::uint64_t key_;
};

// Runs body(0), ..., body(count-1) on up to `workers` threads. Bodies must
// write only to per-index slots; the first exception is rethrown after join.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace medgap
