#include "output.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "optokerr/error.hpp"

namespace okerr::app {

namespace fs = std::filesystem;

void OutputSet::add(std::string name, std::string content) {
    files.push_back({std::move(name), std::move(content)});
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json make_manifest(const std::string& workflow, const std::string& config_text,
                             const OutputSet& out) {
    nlohmann::json m;
    m["version"] = tool_version;
    m["workflow"] = workflow;
    m["config_sha256"] = sha256_hex(config_text);
    m["files"] = nlohmann::json::array();
    for (const auto& f : out.files) {
        m["files"].push_back({{"name", f.name}, {"bytes", f.content.size()},
                              {"sha256", sha256_hex(f.content)}});
    }
    return m;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << content;
    if (!os) {
        throw InputError("cannot write " + path.string());
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create output directory " + dir + ": " + ec.message());
    }
}

}  // namespace

void write_outputs(const std::string& dir, const std::string& workflow,
                   const std::string& config_text, const OutputSet& out) {
    ensure_dir(dir);
    for (const auto& f : out.files) {
        write_file(fs::path(dir) / f.name, f.content);
    }
    write_file(fs::path(dir) / "manifest.json", dump(make_manifest(workflow, config_text, out)));
}

void write_diagnostic(const std::string& dir, const std::string& workflow,
                      const std::string& message) {
    ensure_dir(dir);
    nlohmann::json d;
    d["status"] = "numerical_failure";
    d["workflow"] = workflow;
    d["message"] = message;
    d["version"] = tool_version;
    write_file(fs::path(dir) / "diagnostic.json", dump(d));
}

}  // namespace okerr::app
