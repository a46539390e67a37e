#pragma once

// Dataset container with explicit per-cell missingness, variable-role mapping
// (group G, outcome Y, controls W, mediator sets M1/M1+M2), and the
// listwise-deletion bookkeeping every analysis reports.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "medgap/numkit.hpp"

namespace medgap {

struct Column {
    std::string name;
    std::vector<double> values;          // meaningful only where missing == 0
    std::vector<std::uint8_t> missing;
};

class Dataset {
public:
    Dataset() = default;
    // All columns must have equal length; values under a set missing flag are
    // normalized to 0 so stored data never carries NaN.
    static Dataset from_columns(std::vector<Column> columns);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return columns_.size(); }

    bool has_column(const std::string& name) const;
    std::size_t column_index(const std::string& name) const;  // SchemaError if absent
    const Column& column(const std::string& name) const;
    const Column& column_at(std::size_t index) const { return columns_[index]; }
    std::vector<std::string> column_names() const;
    std::size_t n_missing(const std::string& name) const;

    // Row subset / bootstrap resample (indices may repeat).
    Dataset select_rows(const std::vector<std::size_t>& rows) const;

private:
    std::vector<Column> columns_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t n_rows_ = 0;
};

enum class MediatorSet { m1, all };
std::string to_string(MediatorSet set);
MediatorSet mediator_set_from_string(const std::string& text);

struct RoleMap {
    std::string group;
    std::string outcome;
    std::vector<std::string> controls;
    std::vector<std::string> mediators_m1;
    std::vector<std::string> mediators_m2;

    std::vector<std::string> mediators(MediatorSet set) const;
    // Columns an analysis consumes, in a fixed order: group, outcome,
    // mediators, then controls when requested.
    std::vector<std::string> used_columns(MediatorSet set, bool with_controls) const;
    // Presence, pairwise-disjoint roles, and a strictly binary group column.
    void validate(const Dataset& data) const;
};

struct AnalysisSample {
    std::vector<std::size_t> kept_rows;
    std::size_t n_dropped_missing = 0;
};

// Rows with no missing cell in any used column, original order preserved.
// Throws EmptySampleError when nothing survives.
AnalysisSample complete_cases(const Dataset& data,
                              const std::vector<std::string>& used_columns);

struct CsvOptions {
    std::string missing_token;  // default: empty cell
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});
// Also validates the role map against the loaded data.
Dataset load_csv(const std::string& path, const RoleMap& roles,
                 const CsvOptions& options = {});
void write_csv(const Dataset& data, const std::string& path,
               const CsvOptions& options = {});

RoleMap load_roles(const std::string& path);

// Eigen views over selected rows. Missing cells are not allowed here; call
// complete_cases first.
Vector column_vector(const Dataset& data, const std::string& name,
                     const std::vector<std::size_t>& rows);
Matrix design_matrix(const Dataset& data, const std::vector<std::string>& names,
                     const std::vector<std::size_t>& rows, bool intercept);

}  // namespace medgap
