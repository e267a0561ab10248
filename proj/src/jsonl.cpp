#include "lyrictk/jsonl.hpp"

#include <fstream>

#include "lyrictk/errors.hpp"

namespace lyrictk {

namespace {

std::vector<JsonlLine> read_impl(const std::string& path, std::vector<std::string>* warnings,
                                 bool strict) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<JsonlLine> out;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back({line_number, nlohmann::ordered_json::parse(line)});
        } catch (const nlohmann::json::parse_error& e) {
            if (strict) {
                throw ConfigError(path + " line " + std::to_string(line_number) +
                                  ": invalid JSON: " + e.what());
            }
            if (warnings) {
                warnings->push_back(path + " line " + std::to_string(line_number) +
                                    ": invalid JSON, skipped");
            }
        }
    }
    return out;
}

}  // namespace

std::vector<JsonlLine> read_jsonl(const std::string& path, std::vector<std::string>* warnings) {
    return read_impl(path, warnings, false);
}

std::vector<JsonlLine> read_jsonl_strict(const std::string& path) {
    return read_impl(path, nullptr, true);
}

nlohmann::ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
}

}  // namespace lyrictk
