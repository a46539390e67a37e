#include "medgap/synthetic.hpp"

#include <cmath>

#include "medgap/bootstrap.hpp"
#include "medgap/config.hpp"
#include "medgap/oaxaca.hpp"

namespace medgap {

namespace {

enum : std::uint64_t {
    kStreamW = 0,
    kStreamG = 1,
    kStreamX = 2,
    kStreamY = 3,
};

Vector parse_number_list(const std::string& text, const std::string& key) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string cell = text.substr(pos, next - pos);
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ParseError("dgp config: cannot parse '" + cell + "' in key '" +
                             key + "'");
        }
        pos = next + 1;
    }
    Vector out(static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[static_cast<Index>(i)] = values[i];
    }
    return out;
}

}  // namespace

void SyntheticDgp::validate() const {
    if (n < 2) throw DomainError("dgp: n must be at least 2");
    if (dim_w < 1) throw DomainError("dgp: dim_w must be at least 1");
    if (gamma.size() != dim_w) throw DimensionError("dgp: gamma must have dim_w entries");
    if (kappa.size() != dim_w) throw DimensionError("dgp: kappa must have dim_w entries");
    const Index dx = dim_x();
    if (dx < 1) throw DomainError("dgp: need at least one mediator (alpha empty)");
    if (beta.size() != dx) throw DimensionError("dgp: beta must match alpha's length");
    if (delta.rows() != dx || delta.cols() != dim_w) {
        throw DimensionError("dgp: delta must be dim_x x dim_w");
    }
    if (beta_sq.size() != 0 && beta_sq.size() != dx) {
        throw DimensionError("dgp: beta_sq must be empty or match alpha's length");
    }
    if (interaction.size() != 0 && interaction.size() != dx) {
        throw DimensionError("dgp: interaction must be empty or match alpha's length");
    }
    if (!(noise_sd_x > 0.0) || !(noise_sd_y > 0.0)) {
        throw DomainError("dgp: noise standard deviations must be positive");
    }
}

Dataset generate(const SyntheticDgp& dgp) {
    dgp.validate();
    const auto n = static_cast<Index>(dgp.n);
    const Index dw = dgp.dim_w;
    const Index dx = dgp.dim_x();

    Rng rng_w = Rng(dgp.seed).substream(kStreamW);
    Rng rng_g = Rng(dgp.seed).substream(kStreamG);
    Rng rng_x = Rng(dgp.seed).substream(kStreamX);
    Rng rng_y = Rng(dgp.seed).substream(kStreamY);

    Matrix w(n, dw);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < dw; ++j) w(i, j) = rng_w.normal();
    }
    Vector g(n);
    for (Index i = 0; i < n; ++i) {
        g[i] = rng_g.uniform() < normal_cdf(w.row(i).dot(dgp.gamma)) ? 1.0 : 0.0;
    }
    Matrix x(n, dx);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < dx; ++j) {
            x(i, j) = dgp.alpha[j] * g[i] + dgp.delta.row(j).dot(w.row(i)) +
                      dgp.noise_sd_x * rng_x.normal();
        }
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        double value = dgp.theta * g[i] + x.row(i).dot(dgp.beta) +
                       w.row(i).dot(dgp.kappa) + dgp.noise_sd_y * rng_y.normal();
        if (dgp.beta_sq.size() > 0) {
            value += x.row(i).cwiseAbs2().dot(dgp.beta_sq);
        }
        if (dgp.interaction.size() > 0) {
            value += g[i] * x.row(i).dot(dgp.interaction);
        }
        y[i] = value;
    }

    std::vector<Column> columns;
    columns.reserve(static_cast<std::size_t>(2 + dw + dx));
    auto push = [&](const std::string& name, const Vector& values) {
        Column column;
        column.name = name;
        column.values.assign(values.data(), values.data() + values.size());
        columns.push_back(std::move(column));
    };
    push("g", g);
    push("y", y);
    for (Index j = 0; j < dw; ++j) push("w" + std::to_string(j + 1), w.col(j));
    for (Index j = 0; j < dx; ++j) push("x" + std::to_string(j + 1), x.col(j));
    return Dataset::from_columns(std::move(columns));
}

RoleMap synthetic_roles(const SyntheticDgp& dgp) {
    RoleMap roles;
    roles.group = "g";
    roles.outcome = "y";
    for (Index j = 0; j < dgp.dim_w; ++j) {
        roles.controls.push_back("w" + std::to_string(j + 1));
    }
    for (Index j = 0; j < dgp.dim_x(); ++j) {
        roles.mediators_m1.push_back("x" + std::to_string(j + 1));
    }
    return roles;
}

Vector TrueEffects::components() const {
    Vector out(kNumComponents);
    out << total, indirect_ref_female, direct_ref_female, indirect_ref_male,
        direct_ref_male;
    return out;
}

TrueEffects true_effects(const SyntheticDgp& dgp) {
    dgp.validate();
    // E[X(g)] = alpha * g and E[X(g)_j^2] = alpha_j^2 * g + Var(X_j), so the
    // squared term contributes alpha_j^2 * beta_sq_j to every indirect effect.
    double base_indirect = dgp.alpha.dot(dgp.beta);
    if (dgp.beta_sq.size() > 0) {
        base_indirect += dgp.alpha.cwiseAbs2().dot(dgp.beta_sq);
    }
    TrueEffects effects;
    if (dgp.interaction.size() > 0) {
        // Reference male keeps G=1 while shifting X(0)->X(1): the interaction
        // loads on the mediator shift. Reference female's direct effect picks
        // up the interaction evaluated at E[X(1)] = alpha.
        effects.indirect_ref_male = base_indirect + dgp.alpha.dot(dgp.interaction);
        effects.direct_ref_male = dgp.theta;
        effects.indirect_ref_female = base_indirect;
        effects.direct_ref_female = dgp.theta + dgp.alpha.dot(dgp.interaction);
    } else {
        effects.indirect_ref_male = base_indirect;
        effects.indirect_ref_female = base_indirect;
        effects.direct_ref_male = dgp.theta;
        effects.direct_ref_female = dgp.theta;
    }
    effects.total = effects.indirect_ref_male + effects.direct_ref_male;
    return effects;
}

McReport monte_carlo(const SyntheticDgp& dgp, DecompEstimator estimator,
                     std::size_t replications, const McOptions& options) {
    if (replications < 50) {
        throw DomainError("monte_carlo: need at least 50 replications");
    }
    dgp.validate();
    const Vector truth = true_effects(dgp).components();
    const auto n_components = static_cast<Index>(kNumComponents);

    Matrix estimates(static_cast<Index>(replications), n_components);
    Matrix ses(static_cast<Index>(replications), n_components);
    std::vector<char> ok(replications, 0);

    parallel_for(replications, options.workers, [&](std::size_t r) {
        SyntheticDgp rep_dgp = dgp;
        rep_dgp.seed = derive_seed(dgp.seed, r);
        try {
            const Dataset data = generate(rep_dgp);
            const RoleMap roles = synthetic_roles(rep_dgp);
            auto run = [&](const Dataset& d) -> Vector {
                if (estimator == DecompEstimator::oaxaca) {
                    return oaxaca_decompose(d, roles, options.mediator_set).components();
                }
                return ipw_mediation(d, roles, options.mediator_set, options.trim)
                    .components();
            };
            if (options.bootstrap_b == 0) {
                estimates.row(static_cast<Index>(r)) = run(data);
                ses.row(static_cast<Index>(r)).setZero();
            } else {
                BootstrapOptions boot;
                boot.replications = options.bootstrap_b;
                boot.seed = derive_seed(rep_dgp.seed, 0xB001);
                boot.workers = 1;  // replication-level parallelism only
                const BootstrapResult result = bootstrap(run, data, boot);
                estimates.row(static_cast<Index>(r)) = result.point_estimate;
                ses.row(static_cast<Index>(r)) = result.standard_errors;
            }
            ok[r] = 1;
        } catch (const Error&) {
            ok[r] = 0;
        }
    });

    McReport report;
    report.replications = replications;
    Index n_ok = 0;
    for (std::size_t r = 0; r < replications; ++r) n_ok += ok[r] ? 1 : 0;
    report.n_failed = replications - static_cast<std::size_t>(n_ok);
    if (n_ok < 2) {
        throw InferenceError("monte_carlo: nearly all replications failed");
    }
    report.mean_bias = Vector::Zero(n_components);
    report.rmse = Vector::Zero(n_components);
    report.ci_coverage = Vector::Zero(n_components);
    for (std::size_t r = 0; r < replications; ++r) {
        if (!ok[r]) continue;
        const auto row = static_cast<Index>(r);
        for (Index j = 0; j < n_components; ++j) {
            const double error = estimates(row, j) - truth[j];
            report.mean_bias[j] += error;
            report.rmse[j] += error * error;
            if (options.bootstrap_b > 0) {
                report.ci_coverage[j] +=
                    std::abs(error) <= 1.96 * ses(row, j) ? 1.0 : 0.0;
            }
        }
    }
    const double denom = static_cast<double>(n_ok);
    report.mean_bias /= denom;
    report.rmse = (report.rmse / denom).cwiseSqrt();
    if (options.bootstrap_b > 0) {
        report.ci_coverage /= denom;
    } else {
        report.ci_coverage.setConstant(std::nan(""));
    }
    return report;
}

SyntheticDgp load_dgp_config(const std::string& path) {
    const Config config = parse_config_file(path);
    const auto it = config.find("dgp");
    if (it == config.end()) {
        throw SchemaError("dgp config '" + path + "': missing [dgp] section");
    }
    const ConfigSection& section = it->second;
    SyntheticDgp dgp;
    auto require = [&](const char* key) -> std::string {
        if (!section.has(key)) {
            throw SchemaError("dgp config '" + path + "': missing key '" +
                              std::string(key) + "'");
        }
        return section.value(key);
    };
    dgp.n = static_cast<std::size_t>(std::stoull(require("n")));
    dgp.gamma = parse_number_list(require("gamma"), "gamma");
    dgp.dim_w = dgp.gamma.size();
    dgp.alpha = parse_number_list(require("alpha"), "alpha");
    dgp.beta = parse_number_list(require("beta"), "beta");
    dgp.kappa = parse_number_list(require("kappa"), "kappa");
    dgp.theta = std::stod(require("theta"));
    if (section.has("beta_sq")) {
        dgp.beta_sq = parse_number_list(section.value("beta_sq"), "beta_sq");
    }
    if (section.has("interaction")) {
        dgp.interaction = parse_number_list(section.value("interaction"), "interaction");
    }
    if (section.has("noise_sd_x")) dgp.noise_sd_x = std::stod(section.value("noise_sd_x"));
    if (section.has("noise_sd_y")) dgp.noise_sd_y = std::stod(section.value("noise_sd_y"));
    if (section.has("seed")) {
        dgp.seed = std::stoull(section.value("seed"));
    }
    // delta rows are semicolon-separated lists, one per mediator.
    dgp.delta = Matrix::Zero(dgp.dim_x(), dgp.dim_w);
    if (section.has("delta")) {
        const std::string text = section.value("delta");
        std::size_t pos = 0;
        Index row = 0;
        while (pos <= text.size() && row < dgp.dim_x()) {
            std::size_t next = text.find(';', pos);
            if (next == std::string::npos) next = text.size();
            const Vector values =
                parse_number_list(text.substr(pos, next - pos), "delta");
            if (values.size() != dgp.dim_w) {
                throw SchemaError("dgp config '" + path +
                                  "': delta rows must have dim_w entries");
            }
            dgp.delta.row(row++) = values;
            pos = next + 1;
        }
        if (row != dgp.dim_x()) {
            throw SchemaError("dgp config '" + path +
                              "': delta needs one row per mediator");
        }
    }
    dgp.validate();
    return dgp;
}

}  // namespace medgap
