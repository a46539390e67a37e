#include "medgap/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "medgap/config.hpp"

namespace medgap {

namespace {

std::string trim_cell(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) {
        cells.push_back(trim_cell(cell));
    }
    if (cells.empty() || (!line.empty() && line.back() == ',')) cells.emplace_back();
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("row " + std::to_string(row) + ", column '" + column +
                         "': cannot parse '" + cell + "' as a number");
    }
    if (!std::isfinite(value)) {
        throw ParseError("row " + std::to_string(row) + ", column '" + column +
                         "': non-finite value");
    }
    return value;
}

std::string format_number(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

}  // namespace

Dataset Dataset::from_columns(std::vector<Column> columns) {
    Dataset data;
    if (columns.empty()) {
        throw SchemaError("dataset needs at least one column");
    }
    data.n_rows_ = columns.front().values.size();
    for (auto& column : columns) {
        if (column.missing.empty()) {
            column.missing.assign(column.values.size(), 0);
        }
        if (column.values.size() != data.n_rows_ ||
            column.missing.size() != data.n_rows_) {
            throw SchemaError("column '" + column.name + "' has inconsistent length");
        }
        for (std::size_t i = 0; i < data.n_rows_; ++i) {
            if (column.missing[i]) {
                column.values[i] = 0.0;
            } else if (!std::isfinite(column.values[i])) {
                throw SchemaError("column '" + column.name +
                                  "' stores a non-finite value without a missing flag");
            }
        }
        if (data.index_.count(column.name)) {
            throw SchemaError("duplicate column name '" + column.name + "'");
        }
        data.index_[column.name] = data.columns_.size();
        data.columns_.push_back(std::move(column));
    }
    return data;
}

bool Dataset::has_column(const std::string& name) const {
    return index_.count(name) > 0;
}

std::size_t Dataset::column_index(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) {
        throw SchemaError("unknown column '" + name + "'");
    }
    return it->second;
}

const Column& Dataset::column(const std::string& name) const {
    return columns_[column_index(name)];
}

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& column : columns_) names.push_back(column.name);
    return names;
}

std::size_t Dataset::n_missing(const std::string& name) const {
    const Column& col = column(name);
    std::size_t count = 0;
    for (const auto flag : col.missing) count += flag ? 1 : 0;
    return count;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.n_rows_ = rows.size();
    out.index_ = index_;
    out.columns_.reserve(columns_.size());
    for (const auto& column : columns_) {
        Column picked;
        picked.name = column.name;
        picked.values.reserve(rows.size());
        picked.missing.reserve(rows.size());
        for (const auto row : rows) {
            if (row >= n_rows_) {
                throw DomainError("select_rows: row index out of range");
            }
            picked.values.push_back(column.values[row]);
            picked.missing.push_back(column.missing[row]);
        }
        out.columns_.push_back(std::move(picked));
    }
    return out;
}

std::string to_string(MediatorSet set) {
    return set == MediatorSet::m1 ? "m1" : "all";
}

MediatorSet mediator_set_from_string(const std::string& text) {
    if (text == "m1") return MediatorSet::m1;
    if (text == "all" || text == "m1+m2") return MediatorSet::all;
    throw DomainError("unknown mediator set '" + text + "' (expected m1 or all)");
}

std::vector<std::string> RoleMap::mediators(MediatorSet set) const {
    std::vector<std::string> out = mediators_m1;
    if (set == MediatorSet::all) {
        out.insert(out.end(), mediators_m2.begin(), mediators_m2.end());
    }
    return out;
}

std::vector<std::string> RoleMap::used_columns(MediatorSet set,
                                               bool with_controls) const {
    std::vector<std::string> out{group, outcome};
    const auto meds = mediators(set);
    out.insert(out.end(), meds.begin(), meds.end());
    if (with_controls) {
        out.insert(out.end(), controls.begin(), controls.end());
    }
    return out;
}

void RoleMap::validate(const Dataset& data) const {
    if (group.empty()) throw SchemaError("role map: group column not set");
    if (outcome.empty()) throw SchemaError("role map: outcome column not set");
    std::set<std::string> seen;
    auto check = [&](const std::string& name, const char* role) {
        if (!data.has_column(name)) {
            throw SchemaError(std::string("role map: ") + role + " column '" + name +
                              "' not found in dataset");
        }
        if (!seen.insert(name).second) {
            throw SchemaError("role map: column '" + name +
                              "' is assigned to more than one role");
        }
    };
    check(group, "group");
    check(outcome, "outcome");
    for (const auto& name : controls) check(name, "control");
    for (const auto& name : mediators_m1) check(name, "mediator (M1)");
    for (const auto& name : mediators_m2) check(name, "mediator (M2)");

    const Column& g = data.column(group);
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        if (g.missing[i]) continue;
        if (g.values[i] != 0.0 && g.values[i] != 1.0) {
            throw SchemaError("group column '" + group + "' has non-binary value " +
                              std::to_string(g.values[i]) + " at row " +
                              std::to_string(i));
        }
    }
}

AnalysisSample complete_cases(const Dataset& data,
                              const std::vector<std::string>& used_columns) {
    std::vector<const Column*> cols;
    cols.reserve(used_columns.size());
    for (const auto& name : used_columns) cols.push_back(&data.column(name));
    AnalysisSample sample;
    sample.kept_rows.reserve(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        bool keep = true;
        for (const auto* col : cols) {
            if (col->missing[i]) {
                keep = false;
                break;
            }
        }
        if (keep) {
            sample.kept_rows.push_back(i);
        } else {
            ++sample.n_dropped_missing;
        }
    }
    if (sample.kept_rows.empty()) {
        throw EmptySampleError("complete_cases: no rows remain after listwise deletion");
    }
    return sample;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open CSV file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("CSV file '" + path + "' is empty");
    }
    const auto header = split_line(line);
    if (header.empty()) {
        throw ParseError("CSV file '" + path + "' has an empty header");
    }
    std::vector<Column> columns(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j].empty()) {
            throw ParseError("CSV file '" + path + "': empty header field " +
                             std::to_string(j));
        }
        columns[j].name = header[j];
    }
    std::size_t row = 0;
    while (std::getline(in, line)) {
        // Blank lines are only separators in multi-column files; in a
        // one-column file an empty line is a (possibly missing) cell.
        if (header.size() > 1 && trim_cell(line).empty()) continue;
        ++row;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (cells[j] == options.missing_token) {
                columns[j].values.push_back(0.0);
                columns[j].missing.push_back(1);
            } else {
                columns[j].values.push_back(parse_number(cells[j], row, columns[j].name));
                columns[j].missing.push_back(0);
            }
        }
    }
    return Dataset::from_columns(std::move(columns));
}

Dataset load_csv(const std::string& path, const RoleMap& roles,
                 const CsvOptions& options) {
    Dataset data = load_csv(path, options);
    roles.validate(data);
    return data;
}

void write_csv(const Dataset& data, const std::string& path,
               const CsvOptions& options) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    const auto names = data.column_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << (j ? "," : "") << names[j];
    }
    out << "\n";
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_cols(); ++j) {
            const Column& col = data.column_at(j);
            if (j) out << ",";
            if (col.missing[i]) {
                out << options.missing_token;
            } else {
                out << format_number(col.values[i]);
            }
        }
        out << "\n";
    }
}

RoleMap load_roles(const std::string& path) {
    const Config config = parse_config_file(path);
    RoleMap roles;
    auto section_tokens = [&](const std::string& name) -> std::vector<std::string> {
        const auto it = config.find(name);
        if (it == config.end()) return {};
        std::vector<std::string> out;
        for (const auto& [key, value] : it->second.entries) {
            if (!value.empty()) {
                throw ParseError("roles file '" + path + "': section [" + name +
                                 "] expects bare column names, got '" + key + "=" +
                                 value + "'");
            }
            out.push_back(key);
        }
        return out;
    };
    const auto group = section_tokens("group");
    if (group.size() != 1) {
        throw SchemaError("roles file '" + path + "': [group] must list exactly one column");
    }
    roles.group = group.front();
    const auto outcome = section_tokens("outcome");
    if (outcome.size() != 1) {
        throw SchemaError("roles file '" + path +
                          "': [outcome] must list exactly one column");
    }
    roles.outcome = outcome.front();
    roles.controls = section_tokens("controls");
    roles.mediators_m1 = section_tokens("mediators_m1");
    roles.mediators_m2 = section_tokens("mediators_m2");
    if (roles.mediators_m1.empty()) {
        throw SchemaError("roles file '" + path + "': [mediators_m1] must not be empty");
    }
    return roles;
}

Vector column_vector(const Dataset& data, const std::string& name,
                     const std::vector<std::size_t>& rows) {
    const Column& col = data.column(name);
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (col.missing[rows[i]]) {
            throw DomainError("column_vector: column '" + name +
                              "' is missing at selected row " + std::to_string(rows[i]));
        }
        out[static_cast<Index>(i)] = col.values[rows[i]];
    }
    return out;
}

Matrix design_matrix(const Dataset& data, const std::vector<std::string>& names,
                     const std::vector<std::size_t>& rows, bool intercept) {
    const Index n = static_cast<Index>(rows.size());
    const Index p = static_cast<Index>(names.size()) + (intercept ? 1 : 0);
    Matrix out(n, p);
    Index j = 0;
    if (intercept) {
        out.col(0).setOnes();
        j = 1;
    }
    for (const auto& name : names) {
        out.col(j++) = column_vector(data, name, rows);
    }
    return out;
}

}  // namespace medgap
