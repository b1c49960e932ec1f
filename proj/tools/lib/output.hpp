#ifndef OPTOKERR_APP_OUTPUT_HPP
#define OPTOKERR_APP_OUTPUT_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace okerr::app {

inline constexpr const char* tool_version = "0.1.0";

struct OutputFile {
    std::string name;
    std::string content;
};

/// Files produced by one workflow run, in emission order.
struct OutputSet {
    std::vector<OutputFile> files;
    std::string summary;  // printed on stdout

    void add(std::string name, std::string content);
};

std::string sha256_hex(const std::string& data);

/// Manifest: version, workflow, config hash and one checksum per file.
nlohmann::json make_manifest(const std::string& workflow, const std::string& config_text,
                             const OutputSet& out);

/// Writes every file plus manifest.json into dir (created if missing).
void write_outputs(const std::string& dir, const std::string& workflow,
                   const std::string& config_text, const OutputSet& out);

/// Writes diagnostic.json for a failed run.
void write_diagnostic(const std::string& dir, const std::string& workflow,
                      const std::string& message);

/// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace okerr::app

#endif
