#include "vecseg/dataset/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "vecseg/error.hpp"
#include "vecseg/svg/document.hpp"
#include "vecseg/svg/ingest.hpp"

namespace vecseg {

namespace fs = std::filesystem;

LabelSource parse_label_source(std::string_view text) {
    if (text == "layer") return LabelSource::Layer;
    if (text == "semantic-id") return LabelSource::SemanticId;
    throw Error(ErrorKind::InvalidArgument, fmt::format("label source must be 'layer' or 'semantic-id', got '{}'", text));
}

std::string_view to_string(LabelSource source) { return source == LabelSource::Layer ? "layer" : "semantic-id"; }

std::vector<NormalizedPath> load_flat_paths(const std::string& file, Diagnostics* diag) {
    return flatten_transforms(load_svg_file(file), diag);
}

std::vector<NormalizedPath> flat_paths_from_text(std::string_view svg, std::string source_id, Diagnostics* diag) {
    return flatten_transforms(parse_svg(svg, std::move(source_id)), diag);
}

std::vector<std::optional<LabelTriple>> label_paths(const std::vector<NormalizedPath>& paths, const LabelMap& map,
                                                    LabelSource source, const std::map<std::string, std::string>& aliases) {
    std::vector<std::optional<LabelTriple>> out;
    out.reserve(paths.size());
    const int l3 = map.level_sizes()[2];
    for (const NormalizedPath& p : paths) {
        if (source == LabelSource::Layer) {
            std::string name = p.source_layer.value_or(map.catch_all());
            if (auto it = aliases.find(name); it != aliases.end()) name = it->second;
            out.emplace_back(map.map_leaf(name));
            continue;
        }
        if (!p.semantic_id) {
            out.emplace_back(map.leaf_for_l3(l3 - 1).triple());
            continue;
        }
        const int k = *p.semantic_id;
        if (k < 1 || k > l3 - 1) {
            throw Error(ErrorKind::BadFormat, fmt::format("path {}: semantic-id {} outside 1..{} (expected FloorplanCAD class ids)",
                                                          p.path_id, k, l3 - 1));
        }
        out.emplace_back(map.map_leaf(k - 1));
    }
    return out;
}

DrawingGraph graph_from_svg(std::string_view svg, const std::string& id, const GraphConfig& cfg, const LabelMap* map,
                            LabelSource source, Diagnostics* diag) {
    const auto paths = flat_paths_from_text(svg, id, diag);
    if (!map) return build_graph(paths, cfg, id, nullptr, diag);
    const auto labels = label_paths(paths, *map, source);
    return build_graph(paths, cfg, id, &labels, diag);
}

std::string manifest_to_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["format"] = "vecseg-dataset";
    j["version"] = 1;
    j["label_provenance"] = m.label_provenance;
    j["label_file"] = m.label_file;
    j["level_sizes"] = m.level_sizes;
    j["feature_dimension"] = m.feature_dimension;
    j["drawings"] = nlohmann::ordered_json::array();
    for (const ManifestEntry& e : m.drawings) {
        j["drawings"].push_back({{"id", e.id},
                                 {"graph", e.graph},
                                 {"source", e.source},
                                 {"nodes", e.nodes},
                                 {"edges", e.edges},
                                 {"labeled", e.labeled}});
    }
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.value("format", "") != "vecseg-dataset") throw Error(ErrorKind::BadFormat, "not a dataset manifest");
        DatasetManifest m;
        m.label_provenance = j.value("label_provenance", "");
        m.label_file = j.value("label_file", "");
        m.level_sizes = j.at("level_sizes").get<std::array<int, 3>>();
        m.feature_dimension = j.value("feature_dimension", 0);
        for (const auto& d : j.at("drawings")) {
            ManifestEntry e;
            e.id = d.at("id").get<std::string>();
            e.graph = d.at("graph").get<std::string>();
            e.source = d.value("source", "");
            e.nodes = d.value("nodes", 0);
            e.edges = d.value("edges", 0);
            e.labeled = d.value("labeled", false);
            m.drawings.push_back(std::move(e));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFormat, fmt::format("manifest: {}", e.what()));
    }
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", path));
    out << manifest_to_json(manifest);
    if (!out) throw Error(ErrorKind::Io, fmt::format("write failed: {}", path));
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read {}", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return manifest_from_json(ss.str());
}

std::vector<LabeledGraph> load_dataset(const std::string& dir, bool require_labels, DatasetManifest* manifest) {
    const fs::path root(dir);
    DatasetManifest m = load_manifest((root / "manifest.json").string());
    std::vector<LabeledGraph> out;
    out.reserve(m.drawings.size());
    for (const ManifestEntry& e : m.drawings) {
        const DrawingGraph g = load_graph((root / e.graph).string());
        out.push_back({e.id, to_tensors(g, require_labels)});
    }
    if (manifest) *manifest = std::move(m);
    return out;
}

}  // namespace vecseg
