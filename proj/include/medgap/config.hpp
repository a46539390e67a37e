#pragma once

// Plain-text section config shared by role maps and DGP specs:
//   [section]
//   bare_token          # one entry per line
//   key = value         # or key/value pairs
// '#' starts a comment.

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace medgap {

struct ConfigSection {
    // (key, value); bare tokens carry an empty value.
    std::vector<std::pair<std::string, std::string>> entries;

    std::vector<std::string> tokens() const;
    // Last value for key, or empty when absent.
    std::string value(const std::string& key) const;
    bool has(const std::string& key) const;
};

using Config = std::map<std::string, ConfigSection>;

Config parse_config_file(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& origin);

}  // namespace medgap
