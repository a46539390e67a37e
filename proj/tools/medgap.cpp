// Command-line frontend: ingests a CSV plus a role map (or a DGP config),
// runs the selected analysis, and emits a text/csv/json report with the full
// dropped/trimmed accounting.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "medgap/balance.hpp"
#include "medgap/config.hpp"
#include "medgap/pipeline.hpp"
#include "medgap/serialize.hpp"
#include "medgap/synthetic.hpp"

namespace {

using medgap::Json;

struct RunConfig {
    std::string data_path;
    std::string roles_path;
    std::string analysis = "oaxaca";
    std::string mediator_set = "all";
    std::string reference_group = "both";
    double trim = 0.02;
    std::size_t bootstrap_b = 499;
    std::uint64_t seed = 0;
    std::string output_format = "json";
    std::string out_path;  // empty = stdout
    std::string missing_token;
};

unsigned worker_count() {
    if (const char* env = std::getenv("MEDGAP_WORKERS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<unsigned>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

Json config_echo(const RunConfig& config) {
    Json echo;
    echo["data"] = config.data_path;
    echo["roles"] = config.roles_path;
    echo["analysis"] = config.analysis;
    echo["mediators"] = config.mediator_set;
    echo["reference"] = config.reference_group;
    echo["trim"] = config.trim;
    echo["bootstrap"] = config.bootstrap_b;
    echo["seed"] = config.seed;
    echo["format"] = config.output_format;
    return echo;
}

std::vector<std::size_t> component_filter(const std::string& reference) {
    if (reference == "female") return {0, 1, 2};
    if (reference == "male") return {0, 3, 4};
    return {0, 1, 2, 3, 4};
}

Json filter_components(Json result, const std::string& reference) {
    if (!result.contains("components")) return result;
    const auto keep = component_filter(reference);
    Json filtered = Json::array();
    for (const auto index : keep) {
        filtered.push_back(result["components"][index]);
    }
    result["components"] = std::move(filtered);
    return result;
}

std::string decomposition_text(const medgap::DecompositionResult& result,
                               const std::string& analysis,
                               const std::string& reference) {
    const auto keep = component_filter(reference);
    const medgap::Vector components = result.components();
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << "decomposition (" << analysis
        << ", mediators=" << medgap::to_string(result.mediator_set) << ")\n";
    const char* labels[] = {"total m-f", "indir.f", "dir.f", "indir.m", "dir.m"};
    out << "          ";
    for (const auto k : keep) out << "  " << labels[k];
    out << "\n  est     ";
    for (const auto k : keep) out << "  " << components[static_cast<medgap::Index>(k)];
    if (result.standard_errors.size() == 5) {
        out << "\n  se      ";
        for (const auto k : keep) {
            out << "  " << result.standard_errors[static_cast<medgap::Index>(k)];
        }
        out << "\n  pval    ";
        for (const auto k : keep) {
            out << "  " << result.p_values[static_cast<medgap::Index>(k)];
        }
    }
    out << "\n  missings / trimmed: " << result.n_dropped_missing << " / "
        << result.n_trimmed << "\n  n used: " << result.n_used << "\n";
    return out.str();
}

void emit(const RunConfig& config, const Json& report, const std::string& text_body,
          const std::string& csv_body) {
    std::string payload;
    if (config.output_format == "json") {
        payload = report.dump(2);
        payload.push_back('\n');
    } else if (config.output_format == "csv") {
        std::ostringstream out;
        out << "# schema_version=1\n";
        for (const auto& [key, value] : report["config"].items()) {
            out << "# " << key << "=" << (value.is_string() ? value.get<std::string>()
                                                            : value.dump())
                << "\n";
        }
        out << csv_body;
        payload = out.str();
    } else {
        payload = text_body;
    }

    if (config.out_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream out(config.out_path, std::ios::binary);
        if (!out) {
            throw medgap::ParseError("cannot open '" + config.out_path +
                                     "' for writing");
        }
        out << payload;
    }
}

int run(const RunConfig& config) {
    if (!(config.trim >= 0.0 && config.trim < 0.5)) {
        throw medgap::DomainError("--trim must lie in [0, 0.5)");
    }
    if (config.bootstrap_b < 2) {
        throw medgap::DomainError("--bootstrap must be at least 2");
    }

    Json report;
    report["schema_version"] = 1;
    report["generator"] = "medgap";
    report["config"] = config_echo(config);

    const medgap::TrimmingPolicy policy{config.trim, 1.0 - config.trim};
    medgap::RunOptions options;
    options.bootstrap_b = config.bootstrap_b;
    options.seed = config.seed;
    options.workers = worker_count();

    std::string text_body, csv_body;

    if (config.analysis == "synth_mc") {
        medgap::SyntheticDgp dgp = medgap::load_dgp_config(config.data_path);
        dgp.seed = config.seed;
        const medgap::Config file = medgap::parse_config_file(config.data_path);
        std::size_t replications = 200;
        std::size_t inner_b = 199;
        std::string estimators = "both";
        if (const auto it = file.find("mc"); it != file.end()) {
            if (it->second.has("replications")) {
                replications = std::stoull(it->second.value("replications"));
            }
            if (it->second.has("bootstrap")) {
                inner_b = std::stoull(it->second.value("bootstrap"));
            }
            if (it->second.has("estimator")) estimators = it->second.value("estimator");
        }
        medgap::McOptions mc;
        mc.bootstrap_b = inner_b;
        mc.workers = options.workers;
        mc.trim = policy;
        Json result;
        if (const auto it = file.find("mc");
            it != file.end() && it->second.has("emit_data")) {
            const std::string emit_path = it->second.value("emit_data");
            medgap::write_csv(medgap::generate(dgp), emit_path);
            result["emitted_data"] = emit_path;
        }
        result["true_effects"] = Json::array();
        const medgap::Vector truth = medgap::true_effects(dgp).components();
        for (std::size_t k = 0; k < medgap::kNumComponents; ++k) {
            Json row;
            row["name"] = medgap::kComponentNames[k];
            row["value"] = truth[static_cast<medgap::Index>(k)];
            result["true_effects"].push_back(std::move(row));
        }
        std::ostringstream text;
        text << "monte carlo (" << replications << " replications)\n";
        if (estimators == "both" || estimators == "oaxaca") {
            const auto mc_report =
                medgap::monte_carlo(dgp, medgap::DecompEstimator::oaxaca, replications, mc);
            result["oaxaca"] = medgap::to_json(mc_report);
            text << "  oaxaca: max |bias| "
                 << mc_report.mean_bias.cwiseAbs().maxCoeff() << "\n";
        }
        if (estimators == "both" || estimators == "ipw") {
            const auto mc_report =
                medgap::monte_carlo(dgp, medgap::DecompEstimator::ipw, replications, mc);
            result["ipw"] = medgap::to_json(mc_report);
            text << "  ipw: max |bias| " << mc_report.mean_bias.cwiseAbs().maxCoeff()
                 << "\n";
        }
        report["result"] = std::move(result);
        text_body = text.str();
        csv_body = "see json output for synth_mc\n";
        emit(config, report, text_body, csv_body);
        return 0;
    }

    const medgap::RoleMap roles = medgap::load_roles(config.roles_path);
    const medgap::CsvOptions csv_options{config.missing_token};
    const medgap::Dataset data = medgap::load_csv(config.data_path, roles, csv_options);
    const medgap::MediatorSet mediator_set =
        medgap::mediator_set_from_string(config.mediator_set);

    if (config.analysis == "oaxaca" || config.analysis == "ipw") {
        const medgap::DecompositionResult result =
            config.analysis == "oaxaca"
                ? medgap::run_oaxaca(data, roles, mediator_set, options)
                : medgap::run_ipw(data, roles, mediator_set, policy, options);
        report["result"] =
            filter_components(medgap::to_json(result), config.reference_group);
        report["result"]["n_rows"] = data.n_rows();
        text_body = decomposition_text(result, config.analysis, config.reference_group);
        csv_body = medgap::to_csv(result);
    } else if (config.analysis == "ate_experiment") {
        const medgap::AteExperimentResult result =
            medgap::run_ate_experiment(data, roles, config.seed);
        Json estimates = Json::array();
        for (const auto& estimate : result.estimates) {
            estimates.push_back(medgap::to_json(estimate));
        }
        report["result"]["estimates"] = std::move(estimates);
        report["result"]["n_dropped_missing"] = result.n_dropped_missing;
        report["result"]["control_mean"] = result.control_mean;
        std::ostringstream text, csv;
        text.setf(std::ios::fixed);
        text.precision(4);
        text << "intervention effects\n";
        csv << "estimator,est,se,pval,n_used\n";
        for (const auto& estimate : result.estimates) {
            text << "  " << medgap::to_string(estimate.kind) << ": est "
                 << estimate.estimate << "  se " << estimate.standard_error
                 << "  pval " << estimate.p_value << "\n";
            csv << medgap::to_string(estimate.kind) << "," << estimate.estimate << ","
                << estimate.standard_error << "," << estimate.p_value << ","
                << estimate.n_used << "\n";
        }
        text << "  mean among controls: " << result.control_mean << "\n";
        text_body = text.str();
        csv_body = csv.str();
    } else if (config.analysis == "balance") {
        const medgap::BalanceTable unweighted = medgap::balance_table(data, roles);
        const auto [weights, n_trimmed] =
            medgap::ipw_balance_weights(data, roles, mediator_set, policy);
        const medgap::BalanceTable reweighted =
            medgap::balance_table(data, roles, &weights, policy);
        report["result"]["unweighted"] = medgap::to_json(unweighted);
        report["result"]["reweighted"] = medgap::to_json(reweighted);
        report["result"]["n_trimmed"] = n_trimmed;
        std::ostringstream text;
        text.setf(std::ios::fixed);
        text.precision(3);
        text << "balance (original | after re-weighting, trimmed " << n_trimmed
             << ")\n";
        for (std::size_t k = 0; k < unweighted.rows.size(); ++k) {
            const auto& raw = unweighted.rows[k];
            const auto& adjusted = reweighted.rows[k];
            text << "  " << raw.name << ": dif " << raw.difference << " (p "
                 << raw.p_value << ") | dif " << adjusted.difference << " (p "
                 << adjusted.p_value << ")\n";
        }
        text_body = text.str();
        csv_body = "# unweighted\n" + medgap::to_csv(unweighted) + "# reweighted\n" +
                   medgap::to_csv(reweighted);
    } else if (config.analysis == "support") {
        const auto used = roles.used_columns(mediator_set, /*with_controls=*/true);
        const medgap::AnalysisSample sample = medgap::complete_cases(data, used);
        const medgap::PropensityPair scores =
            medgap::estimate_propensities(data, roles, mediator_set, sample.kept_rows);
        const auto [kept, n_trimmed] = medgap::trim(scores, policy);
        medgap::PropensityPair kept_scores;
        kept_scores.p_w.resize(static_cast<medgap::Index>(kept.size()));
        kept_scores.p_xw.resize(static_cast<medgap::Index>(kept.size()));
        medgap::Vector group(static_cast<medgap::Index>(kept.size()));
        const medgap::Vector g_all =
            medgap::column_vector(data, roles.group, sample.kept_rows);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const auto local = kept[i];
            kept_scores.p_w[static_cast<medgap::Index>(i)] = scores.p_w[local];
            kept_scores.p_xw[static_cast<medgap::Index>(i)] = scores.p_xw[local];
            group[static_cast<medgap::Index>(i)] = g_all[local];
        }
        const medgap::SupportHistogram histogram =
            medgap::common_support(kept_scores, group);
        report["result"] = medgap::to_json(histogram);
        report["result"]["n_dropped_missing"] = sample.n_dropped_missing;
        report["result"]["n_trimmed"] = n_trimmed;
        std::ostringstream text;
        text << "common support (" << histogram.counts_group0.size() << " bins, "
             << "missings " << sample.n_dropped_missing << ", trimmed " << n_trimmed
             << ", overlap " << medgap::overlapping_bins(histogram) << " bins)\n";
        text_body = text.str();
        csv_body = medgap::to_csv(histogram);
    } else {
        throw medgap::DomainError("unknown analysis '" + config.analysis + "'");
    }

    emit(config, report, text_body, csv_body);
    return 0;
}

const char* error_kind(const std::exception& error) {
    if (dynamic_cast<const medgap::SchemaError*>(&error)) return "schema";
    if (dynamic_cast<const medgap::ParseError*>(&error)) return "parse";
    if (dynamic_cast<const medgap::SingularityError*>(&error)) return "singularity";
    if (dynamic_cast<const medgap::SeparationError*>(&error)) return "separation";
    if (dynamic_cast<const medgap::ConvergenceError*>(&error)) return "convergence";
    if (dynamic_cast<const medgap::EmptySampleError*>(&error)) return "empty_sample";
    if (dynamic_cast<const medgap::InferenceError*>(&error)) return "inference";
    if (dynamic_cast<const medgap::DimensionError*>(&error)) return "dimension";
    if (dynamic_cast<const medgap::DomainError*>(&error)) return "domain";
    if (dynamic_cast<const medgap::Error*>(&error)) return "estimation";
    return "internal";
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig config;
    CLI::App app{"Group-gap decompositions: Oaxaca-Blinder and IPW mediation, "
                 "experiment ATEs, balance diagnostics, and a synthetic-DGP "
                 "Monte Carlo harness"};
    app.add_option("--data", config.data_path,
                   "input CSV (or DGP config for --analysis synth_mc)")
        ->required();
    app.add_option("--roles", config.roles_path,
                   "role-map config (not used by synth_mc)");
    app.add_option("--analysis", config.analysis,
                   "oaxaca | ipw | ate_experiment | balance | support | synth_mc")
        ->check(CLI::IsMember(
            {"oaxaca", "ipw", "ate_experiment", "balance", "support", "synth_mc"}));
    app.add_option("--mediators", config.mediator_set, "m1 | all")
        ->check(CLI::IsMember({"m1", "all"}));
    app.add_option("--reference", config.reference_group, "female | male | both")
        ->check(CLI::IsMember({"female", "male", "both"}));
    app.add_option("--trim", config.trim, "propensity trimming threshold (default 0.02)");
    app.add_option("--bootstrap", config.bootstrap_b,
                   "bootstrap replications (default 499)");
    app.add_option("--seed", config.seed, "PRNG seed (default 0)");
    app.add_option("--format", config.output_format, "text | csv | json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--out", config.out_path, "output file (default stdout)");
    app.add_option("--missing-token", config.missing_token,
                   "cell content marking a missing value (default: empty)");
    CLI11_PARSE(app, argc, argv);

    try {
        if (config.analysis != "synth_mc" && config.roles_path.empty()) {
            throw medgap::DomainError("--roles is required for this analysis");
        }
        return run(config);
    } catch (const std::exception& error) {
        Json record;
        record["error"]["type"] = error_kind(error);
        record["error"]["message"] = error.what();
        std::cerr << record.dump(2) << std::endl;
        return 1;
    }
}
