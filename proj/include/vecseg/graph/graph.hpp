#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vecseg/graph/features.hpp"

namespace vecseg {

using LabelTriple = std::array<int, 3>;
using DirectedPair = std::pair<int, int>;  // (from, to)
using UndirectedPair = std::pair<int, int>;  // (min, max)

struct GraphNode {
    int id = 0;
    std::vector<double> features;
    std::optional<LabelTriple> label;
};

struct GraphEdge {
    int src = 0;  // src < dst
    int dst = 0;
    EdgeFeatureVector features;
};

struct GraphMeta {
    int k_neighbors = 0;
    int random_edges = 0;
    int n_max = 0;
    std::uint64_t seed = 0;
    std::array<double, 4> bbox{};  // min-x, min-y, width, height (original units)
};

struct DrawingGraph {
    std::string drawing_id;
    std::vector<GraphNode> nodes;  // sorted by id, ids dense 0..n-1
    std::vector<GraphEdge> edges;  // sorted by (src, dst)
    GraphMeta meta;

    int feature_dimension() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().features.size()); }
};

struct GraphConfig {
    int k_neighbors = 6;
    double random_fraction = 0.05;
    std::uint64_t seed = 0;
    FeatureConfig features;
};

/// K nearest other nodes per node by Euclidean distance, ties to the lower id.
/// K is clamped to n-1.
std::vector<DirectedPair> knn_edges(const std::vector<Vec2>& points, int k);

/// `count` uniformly drawn unordered pairs (i<j) not in `existing`, no self
/// pairs, deterministic for a seed. Returns fewer when the graph fills up.
std::vector<UndirectedPair> random_edges(int node_count, int count, std::uint64_t seed,
                                         const std::set<UndirectedPair>& existing);

/// Unordered pairs as (min, max), unique, sorted; self pairs dropped.
std::vector<UndirectedPair> dedup_undirected(const std::vector<DirectedPair>& pairs);

/// Full drawing graph: node features, KNN + random edges, edge features.
/// `labels`, when given, must have one entry per path. Throws EmptyDrawing.
DrawingGraph build_graph(const std::vector<NormalizedPath>& paths, const GraphConfig& cfg,
                         std::string drawing_id = {},
                         const std::vector<std::optional<LabelTriple>>* labels = nullptr,
                         Diagnostics* diag = nullptr);

DrawingGraph filter_edges(const DrawingGraph& graph, const std::function<bool(const EdgeFeatureVector&)>& keep);

/// Canonical JSON (9 significant digits, sorted nodes/edges): identical
/// graphs serialize to identical bytes.
std::string graph_to_json(const DrawingGraph& graph);
DrawingGraph graph_from_json(std::string_view text);

void save_graph(const DrawingGraph& graph, const std::string& path);
DrawingGraph load_graph(const std::string& path);

}  // namespace vecseg
