#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace lyrictk {

struct JsonlLine {
    std::size_t line_number = 0;
    nlohmann::ordered_json value;
};

// Reads a JSON-lines file, skipping blank lines. Unparseable lines are
// skipped with a note in `warnings`; a missing file throws ConfigError.
std::vector<JsonlLine> read_jsonl(const std::string& path, std::vector<std::string>* warnings);

// Same, but any unparseable line throws ConfigError naming the line: used
// for files this code itself writes, where damage must stop the run.
std::vector<JsonlLine> read_jsonl_strict(const std::string& path);

// Whole-file JSON document. Missing file or parse failure throws ConfigError.
nlohmann::ordered_json read_json_file(const std::string& path);

}  // namespace lyrictk
