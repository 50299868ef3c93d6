#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sogppa/golden.hpp"

namespace sogppa {

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ManifestEntry {
    std::string design_path; // relative to the manifest's directory
    std::string name;
    double clock_period_ns = 1.0;
    uint64_t seed = 0;
    std::string split; // "train" or "test"
    std::optional<GoldenLabels> labels;
};

struct Manifest {
    int version = 1;
    std::string library_path;
    std::vector<ManifestEntry> entries;
    std::string base_dir; // set on load; not serialized
};

std::string manifest_to_string(const Manifest& m); // byte-stable serialization
Manifest manifest_from_string(const std::string& text);

void save_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

// resolves an entry's design path against the manifest directory and parses it
WordDesign load_design(const Manifest& m, const ManifestEntry& entry);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace sogppa
