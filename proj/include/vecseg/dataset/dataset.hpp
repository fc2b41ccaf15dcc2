#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vecseg/gat/train.hpp"
#include "vecseg/graph/graph.hpp"
#include "vecseg/labels/label_map.hpp"
#include "vecseg/svg/path.hpp"

namespace vecseg {

enum class LabelSource { Layer, SemanticId };

LabelSource parse_label_source(std::string_view text);
std::string_view to_string(LabelSource source);

/// Parse + flatten an SVG file or string.
std::vector<NormalizedPath> load_flat_paths(const std::string& file, Diagnostics* diag = nullptr);
std::vector<NormalizedPath> flat_paths_from_text(std::string_view svg, std::string source_id = {},
                                                 Diagnostics* diag = nullptr);

/// Layer source: the path's layer name, after `aliases` (e.g. from
/// aggregate_rare), looked up in the map; paths without a layer take the
/// catch-all leaf. Unknown names throw UnknownLeaf.
///
/// Semantic-id source (FloorplanCAD import): semantic-id k in 1..L3-1 maps
/// to leaf id k-1, a missing id is background (the last leaf), anything
/// else throws BadFormat.
std::vector<std::optional<LabelTriple>> label_paths(const std::vector<NormalizedPath>& paths, const LabelMap& map,
                                                    LabelSource source,
                                                    const std::map<std::string, std::string>& aliases = {});

/// SVG text to graph; labels are attached when `map` is given.
DrawingGraph graph_from_svg(std::string_view svg, const std::string& id, const GraphConfig& cfg, const LabelMap* map = nullptr,
                            LabelSource source = LabelSource::Layer, Diagnostics* diag = nullptr);

struct ManifestEntry {
    std::string id;
    std::string graph;  // path relative to the manifest directory
    std::string source;  // original svg
    int nodes = 0;
    int edges = 0;
    bool labeled = false;
};

/// Dataset directory index: graph files in id order plus the label-map
/// provenance and level sizes they were built with.
struct DatasetManifest {
    std::string label_provenance;
    std::string label_file;  // copy of the label map, relative to the manifest; empty when unlabeled
    std::array<int, 3> level_sizes{0, 0, 0};
    int feature_dimension = 0;
    std::vector<ManifestEntry> drawings;
};

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view text);
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

/// Loads every graph listed in `dir/manifest.json`, in manifest order.
/// With require_labels, unlabeled graphs throw UnlabeledNode.
std::vector<LabeledGraph> load_dataset(const std::string& dir, bool require_labels, DatasetManifest* manifest = nullptr);

}  // namespace vecseg
