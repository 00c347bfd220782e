#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgema/error.hpp"
#include "edgema/image.hpp"
#include "edgema/texture.hpp"

namespace edgema {

struct ManifestRecord {
    std::string path;  // as written; resolve against Manifest::base_dir
    int label = 0;
    double timestamp = 0;
    std::optional<std::string> domain;
};

/// JSON-Lines frame list. Relative paths resolve against the manifest's directory.
struct Manifest {
    std::filesystem::path base_dir;
    std::vector<ManifestRecord> records;

    std::filesystem::path resolve(const ManifestRecord& r) const {
        std::filesystem::path p(r.path);
        return p.is_absolute() ? p : base_dir / p;
    }
    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
};

inline ManifestRecord parse_manifest_line(const std::string& line, std::size_t line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("manifest: invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("manifest: record is not an object", line_no);
    ManifestRecord r;
    if (!j.contains("path") || !j["path"].is_string() || j["path"].get<std::string>().empty())
        throw ParseError("manifest: missing string field 'path'", line_no);
    r.path = j["path"].get<std::string>();
    if (!j.contains("label") || !j["label"].is_number_integer())
        throw ParseError("manifest: missing integer field 'label'", line_no);
    r.label = j["label"].get<int>();
    if (r.label < 0) throw ParseError("manifest: negative label", line_no);
    if (!j.contains("timestamp") || !j["timestamp"].is_number())
        throw ParseError("manifest: missing numeric field 'timestamp'", line_no);
    r.timestamp = j["timestamp"].get<double>();
    if (j.contains("domain") && !j["domain"].is_null()) {
        if (!j["domain"].is_string()) throw ParseError("manifest: 'domain' must be a string", line_no);
        r.domain = j["domain"].get<std::string>();
    }
    return r;
}

inline Manifest parse_manifest(std::istream& in, std::filesystem::path base_dir = {}) {
    Manifest m;
    m.base_dir = std::move(base_dir);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        m.records.push_back(parse_manifest_line(line, line_no));
    }
    return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    return parse_manifest(in, path.parent_path());
}

/// Rejects labels outside [0, k).
inline void check_manifest_labels(const Manifest& m, int k) {
    for (std::size_t i = 0; i < m.records.size(); ++i)
        if (m.records[i].label >= k)
            throw InvalidArgument("manifest record " + std::to_string(i + 1) + ": label " +
                                  std::to_string(m.records[i].label) + " outside [0," + std::to_string(k) + ")");
}

inline nlohmann::json to_json(const ManifestRecord& r) {
    nlohmann::json j = {{"path", r.path}, {"label", r.label}, {"timestamp", r.timestamp}};
    if (r.domain) j["domain"] = *r.domain;
    return j;
}

inline void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    for (const auto& r : records) out << to_json(r).dump() << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

/// Loads a PGM (P5) or PPM (P6) file, chosen by its magic number.
inline Frame load_frame(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2] = {};
    in.read(magic, 2);
    in.close();
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
    if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
    throw IoError("not a binary PGM/PPM image: " + path.string());
}

/// Extracted texture features of a manifest, as stored by `features extract`.
struct FeatureTable {
    TextureConfig texture;
    std::vector<FeatureDescriptor> descriptors;
    std::vector<ManifestRecord> records;
    std::vector<std::vector<double>> rows;
};

inline FeatureTable extract_manifest_features(const Manifest& m, const TextureConfig& texture) {
    FeatureTable t;
    t.texture = texture;
    t.descriptors = describe_grid(texture.grid());
    const auto grid = texture.grid();
    t.records = m.records;
    t.rows.reserve(m.size());
    for (const auto& r : m.records) t.rows.push_back(extract_features(load_frame(m.resolve(r)), grid, texture.levels).values);
    return t;
}

inline nlohmann::json to_json(const FeatureTable& t) {
    nlohmann::json desc = nlohmann::json::array();
    for (const auto& d : t.descriptors)
        desc.push_back({{"angle", int(d.angle)}, {"distance", d.distance}, {"property", property_name(d.property)}});
    nlohmann::json recs = nlohmann::json::array();
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        auto j = to_json(t.records[i]);
        j["values"] = t.rows[i];
        recs.push_back(std::move(j));
    }
    return {{"version", 1},
            {"texture", {{"levels", t.texture.levels}, {"grid", t.texture.grid_name}}},
            {"descriptors", desc},
            {"records", recs}};
}

inline FeatureTable feature_table_from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw InvalidArgument("features: unsupported version");
    FeatureTable t;
    t.texture.levels = j.at("texture").at("levels").get<int>();
    t.texture.grid_name = j.at("texture").at("grid").get<std::string>();
    for (const auto& d : j.at("descriptors"))
        t.descriptors.push_back({angle_from_degrees(d.at("angle").get<int>()), d.at("distance").get<int>(),
                                 property_from_name(d.at("property").get<std::string>())});
    std::size_t line = 0;
    for (const auto& r : j.at("records")) {
        ++line;
        auto rec = parse_manifest_line(r.dump(), line);
        auto values = r.at("values").get<std::vector<double>>();
        if (values.size() != t.descriptors.size()) throw InvalidArgument("features: record width != descriptor count");
        t.records.push_back(std::move(rec));
        t.rows.push_back(std::move(values));
    }
    return t;
}

}  // namespace edgema
