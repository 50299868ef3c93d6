#include "sogppa/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sogppa {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kManifestVersion = 1;

ordered_json labels_to_json(const GoldenLabels& l) {
    ordered_json j;
    j["wns_ns"] = l.wns_ns;
    j["tns_ns"] = l.tns_ns;
    j["power_uW"] = l.power_uW;
    j["area_comb"] = l.area_comb;
    j["area_seq"] = l.area_seq;
    j["nodes_before"] = l.nodes_before;
    j["nodes_after"] = l.nodes_after;
    ordered_json paths = ordered_json::array();
    for (const auto& [key, delay] : l.path_delay_ns) {
        ordered_json p;
        p["source"] = key.first;
        p["sink"] = key.second;
        p["delay_ns"] = delay;
        paths.push_back(std::move(p));
    }
    j["paths"] = std::move(paths);
    return j;
}

GoldenLabels labels_from_json(const ordered_json& j) {
    GoldenLabels l;
    l.wns_ns = j.at("wns_ns").get<double>();
    l.tns_ns = j.at("tns_ns").get<double>();
    l.power_uW = j.at("power_uW").get<double>();
    l.area_comb = j.at("area_comb").get<double>();
    l.area_seq = j.at("area_seq").get<double>();
    l.nodes_before = j.at("nodes_before").get<int64_t>();
    l.nodes_after = j.at("nodes_after").get<int64_t>();
    for (const auto& p : j.at("paths"))
        l.path_delay_ns[{p.at("source").get<std::string>(),
                         p.at("sink").get<std::string>()}] =
            p.at("delay_ns").get<double>();
    return l;
}

} // namespace

std::string manifest_to_string(const Manifest& m) {
    ordered_json j;
    j["version"] = kManifestVersion;
    j["library"] = m.library_path;
    ordered_json entries = ordered_json::array();
    for (const auto& e : m.entries) {
        ordered_json je;
        je["design"] = e.design_path;
        je["name"] = e.name;
        je["clock_period_ns"] = e.clock_period_ns;
        je["seed"] = e.seed;
        je["split"] = e.split;
        if (e.labels) je["labels"] = labels_to_json(*e.labels);
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

Manifest manifest_from_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ManifestError(std::string("manifest parse error: ") + e.what());
    }
    try {
        Manifest m;
        m.version = j.at("version").get<int>();
        if (m.version != kManifestVersion)
            throw ManifestError("unsupported manifest version " + std::to_string(m.version));
        m.library_path = j.at("library").get<std::string>();
        for (const auto& je : j.at("entries")) {
            ManifestEntry e;
            e.design_path = je.at("design").get<std::string>();
            e.name = je.at("name").get<std::string>();
            e.clock_period_ns = je.at("clock_period_ns").get<double>();
            e.seed = je.at("seed").get<uint64_t>();
            e.split = je.at("split").get<std::string>();
            if (je.contains("labels")) e.labels = labels_from_json(je.at("labels"));
            m.entries.push_back(std::move(e));
        }
        return m;
    } catch (const ordered_json::exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifestError("cannot write " + path);
    out << contents;
}

void save_manifest(const Manifest& m, const std::string& path) {
    write_file(path, manifest_to_string(m));
}

Manifest load_manifest(const std::string& path) {
    Manifest m = manifest_from_string(read_file(path));
    m.base_dir = std::filesystem::path(path).parent_path().string();
    return m;
}

WordDesign load_design(const Manifest& m, const ManifestEntry& entry) {
    std::filesystem::path p(entry.design_path);
    if (p.is_relative() && !m.base_dir.empty())
        p = std::filesystem::path(m.base_dir) / p;
    WordDesign d = parse_netlist(read_file(p.string()));
    d.clock_period_ns = entry.clock_period_ns;
    return d;
}

} // namespace sogppa
