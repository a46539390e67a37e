#include "medgap/serialize.hpp"

#include <cmath>
#include <sstream>

namespace medgap {

namespace {

Json number_or_null(double value) {
    if (std::isnan(value)) return nullptr;
    return value;
}

std::string csv_number(double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    return out.str();
}

}  // namespace

Json to_json(const EffectEstimate& estimate) {
    Json json;
    json["kind"] = to_string(estimate.kind);
    json["est"] = estimate.estimate;
    json["se"] = estimate.standard_error;
    json["pval"] = estimate.p_value;
    json["n_used"] = estimate.n_used;
    if (!estimate.warning.empty()) json["warning"] = estimate.warning;
    return json;
}

Json to_json(const DecompositionResult& result) {
    Json json;
    json["mediator_set"] = to_string(result.mediator_set);
    json["n_dropped_missing"] = result.n_dropped_missing;
    json["n_trimmed"] = result.n_trimmed;
    json["n_used"] = result.n_used;
    json["n_failed_replicates"] = result.n_failed_replicates;
    const Vector components = result.components();
    Json rows = Json::array();
    for (std::size_t k = 0; k < kNumComponents; ++k) {
        Json row;
        row["name"] = kComponentNames[k];
        row["est"] = components[static_cast<Index>(k)];
        if (result.standard_errors.size() == static_cast<Index>(kNumComponents)) {
            row["se"] = result.standard_errors[static_cast<Index>(k)];
            row["pval"] = result.p_values[static_cast<Index>(k)];
        }
        rows.push_back(std::move(row));
    }
    json["components"] = std::move(rows);
    return json;
}

Json to_json(const BalanceTable& table) {
    Json json;
    json["weighted"] = table.weighted;
    if (table.trim_policy_used) {
        json["trim_lower"] = table.trim_policy_used->lower;
        json["trim_upper"] = table.trim_policy_used->upper;
    }
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        Json entry;
        entry["name"] = row.name;
        entry["mean_group0"] = number_or_null(row.mean_group0);
        entry["mean_group1"] = number_or_null(row.mean_group1);
        entry["difference"] = number_or_null(row.difference);
        entry["pval"] = number_or_null(row.p_value);
        entry["n_missing"] = row.n_missing;
        rows.push_back(std::move(entry));
    }
    json["rows"] = std::move(rows);
    return json;
}

Json to_json(const SupportHistogram& histogram) {
    Json json;
    json["bin_edges"] = Json::array();
    for (Index k = 0; k < histogram.bin_edges.size(); ++k) {
        json["bin_edges"].push_back(histogram.bin_edges[k]);
    }
    json["counts_group0"] = histogram.counts_group0;
    json["counts_group1"] = histogram.counts_group1;
    json["overlapping_bins"] = overlapping_bins(histogram);
    return json;
}

Json to_json(const McReport& report) {
    Json json;
    json["replications"] = report.replications;
    json["n_failed"] = report.n_failed;
    Json rows = Json::array();
    for (std::size_t k = 0; k < kNumComponents; ++k) {
        Json row;
        row["name"] = kComponentNames[k];
        row["mean_bias"] = report.mean_bias[static_cast<Index>(k)];
        row["rmse"] = report.rmse[static_cast<Index>(k)];
        row["ci_coverage"] = number_or_null(report.ci_coverage[static_cast<Index>(k)]);
        rows.push_back(std::move(row));
    }
    json["components"] = std::move(rows);
    return json;
}

std::string to_csv(const DecompositionResult& result) {
    std::ostringstream out;
    const bool with_inference =
        result.standard_errors.size() == static_cast<Index>(kNumComponents);
    out << "component,est" << (with_inference ? ",se,pval" : "") << "\n";
    const Vector components = result.components();
    for (std::size_t k = 0; k < kNumComponents; ++k) {
        out << kComponentNames[k] << "," << csv_number(components[static_cast<Index>(k)]);
        if (with_inference) {
            out << "," << csv_number(result.standard_errors[static_cast<Index>(k)])
                << "," << csv_number(result.p_values[static_cast<Index>(k)]);
        }
        out << "\n";
    }
    return out.str();
}

std::string to_csv(const BalanceTable& table) {
    std::ostringstream out;
    out << "name,mean_group0,mean_group1,difference,pval,n_missing\n";
    for (const auto& row : table.rows) {
        out << row.name << "," << csv_number(row.mean_group0) << ","
            << csv_number(row.mean_group1) << "," << csv_number(row.difference)
            << "," << csv_number(row.p_value) << "," << row.n_missing << "\n";
    }
    return out.str();
}

std::string to_csv(const SupportHistogram& histogram) {
    std::ostringstream out;
    out << "bin_lower,bin_upper,count_group0,count_group1\n";
    for (std::size_t k = 0; k < histogram.counts_group0.size(); ++k) {
        out << csv_number(histogram.bin_edges[static_cast<Index>(k)]) << ","
            << csv_number(histogram.bin_edges[static_cast<Index>(k) + 1]) << ","
            << histogram.counts_group0[k] << "," << histogram.counts_group1[k]
            << "\n";
    }
    return out.str();
}

}  // namespace medgap
