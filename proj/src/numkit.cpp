#include "medgap/numkit.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

namespace medgap {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;

}  // namespace

Vector solve_least_squares(const Eigen::Ref<const Matrix>& design,
                           const Eigen::Ref<const Vector>& response) {
    if (design.rows() != response.size()) {
        throw DimensionError("solve_least_squares: design has " +
                             std::to_string(design.rows()) + " rows but response has " +
                             std::to_string(response.size()));
    }
    if (design.rows() < design.cols()) {
        throw DomainError("solve_least_squares: fewer rows than columns");
    }
    if (design.cols() == 0) {
        throw DomainError("solve_least_squares: empty design");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < design.cols()) {
        // Name the first column dependent on its predecessors.
        for (Index j = 1; j <= design.cols(); ++j) {
            Eigen::ColPivHouseholderQR<Matrix> sub(design.leftCols(j));
            if (sub.rank() < j) {
                throw SingularityError(
                    "solve_least_squares: design is rank deficient, column " +
                        std::to_string(j - 1) + " is collinear with earlier columns",
                    j - 1);
            }
        }
        throw SingularityError("solve_least_squares: design is rank deficient",
                               design.cols() - 1);
    }
    return qr.solve(response);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_normal_cdf(double x) {
    if (x > 8.0) {
        return std::log1p(-normal_cdf(-x));
    }
    if (x >= -37.0) {
        return std::log(normal_cdf(x));
    }
    // Phi(x) ~ phi(x)/(-x) * [1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8], x -> -inf
    const double inv_x2 = 1.0 / (x * x);
    const double series =
        inv_x2 * (-1.0 + inv_x2 * (3.0 + inv_x2 * (-15.0 + inv_x2 * 105.0)));
    return -0.5 * x * x - kHalfLog2Pi - std::log(-x) + std::log1p(series);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: p must lie strictly in (0, 1)");
    }
    // Wichura (1988), algorithm AS 241, PPND16.
    const double q = p - 0.5;
    double x;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        x = q *
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                  6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
    } else {
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        if (r <= 5.0) {
            r -= 1.6;
            x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
        } else {
            r -= 5.0;
            x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
        }
        if (q < 0.0) x = -x;
    }
    // One Newton step in the smaller tail.
    const double pdf = normal_pdf(x);
    if (pdf > 0.0) {
        if (p <= 0.5) {
            x += (p - normal_cdf(x)) / pdf;
        } else {
            x -= ((1.0 - p) - normal_cdf(-x)) / pdf;
        }
    }
    return x;
}

double normal_p_value_two_sided(double estimate, double standard_error) {
    if (!(standard_error >= 0.0)) {
        throw DomainError("normal_p_value_two_sided: standard error must be >= 0");
    }
    if (standard_error == 0.0) {
        return estimate == 0.0 ? 1.0 : 0.0;
    }
    return 2.0 * normal_cdf(-std::abs(estimate / standard_error));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed + kGolden) ^ (mix64(index + kStreamSalt) + kGolden));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id)
    : state_{seed, stream_id, 0},
      key_(mix64(seed + kGolden) ^ mix64(stream_id ^ kStreamSalt)) {}

Rng::Rng(const RngState& state) : Rng(state.seed, state.stream_id) {
    state_.counter = state.counter;
}

std::uint64_t Rng::next_raw() {
    return mix64(key_ + (++state_.counter) * kGolden);
}

double Rng::uniform() {
    return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Offset keeps the argument strictly inside (0, 1).
    const double u = (static_cast<double>(next_raw() >> 11) + 0.5) * 0x1.0p-53;
    return normal_quantile(u);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) {
        throw DomainError("uniform_index: n must be positive");
    }
    // Lemire multiply-shift with rejection.
    std::uint64_t x = next_raw();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = next_raw();
            m = static_cast<unsigned __int128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

Rng Rng::substream(std::uint64_t index) const {
    return Rng(state_.seed, mix64(state_.stream_id + kGolden * (index + 1)));
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t n_threads =
        std::min<std::size_t>(std::max(1u, workers), count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        while (!abort.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (auto& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace medgap
