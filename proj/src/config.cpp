#include "medgap/config.hpp"

#include <fstream>
#include <sstream>

#include "medgap/errors.hpp"

namespace medgap {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> ConfigSection::tokens() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& [key, value] : entries) {
        out.push_back(value.empty() ? key : key + "=" + value);
    }
    return out;
}

std::string ConfigSection::value(const std::string& key) const {
    std::string out;
    for (const auto& [entry_key, entry_value] : entries) {
        if (entry_key == key) out = entry_value;
    }
    return out;
}

bool ConfigSection::has(const std::string& key) const {
    for (const auto& [entry_key, entry_value] : entries) {
        if (entry_key == key) return true;
    }
    return false;
}

Config parse_config_text(const std::string& text, const std::string& origin) {
    Config config;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            config[section];  // register empty sections too
            continue;
        }
        if (section.empty()) {
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": entry before any [section] header");
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            config[section].entries.emplace_back(trim(line), "");
        } else {
            config[section].entries.emplace_back(trim(line.substr(0, eq)),
                                                 trim(line.substr(eq + 1)));
        }
    }
    return config;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

}  // namespace medgap
