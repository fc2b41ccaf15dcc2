#include "vecseg/graph/graph.hpp"
#include "vecseg/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace vecseg {

std::vector<DirectedPair> knn_edges(const std::vector<Vec2>& points, int k) {
    const int n = static_cast<int>(points.size());
    std::vector<DirectedPair> out;
    if (n < 2 || k < 1) return out;
    const int kk = std::min(k, n - 1);
    std::vector<std::pair<double, int>> cand;
    cand.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        cand.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec2 d = points[i] - points[j];
            cand.emplace_back(d.x * d.x + d.y * d.y, j);
        }
        std::partial_sort(cand.begin(), cand.begin() + kk, cand.end());
        for (int r = 0; r < kk; ++r) out.emplace_back(i, cand[r].second);
    }
    return out;
}

std::vector<UndirectedPair> random_edges(int node_count, int count, std::uint64_t seed,
                                         const std::set<UndirectedPair>& existing) {
    std::vector<UndirectedPair> out;
    if (count <= 0 || node_count < 2) return out;
    const long long total = static_cast<long long>(node_count) * (node_count - 1) / 2;
    long long in_existing = 0;
    for (const auto& [a, b] : existing)
        if (a != b && a >= 0 && b < node_count) ++in_existing;
    const long long remaining = total - in_existing;
    if (remaining <= 0) return out;

    std::mt19937_64 rng(seed);
    if (4LL * count >= remaining) {
        // Dense request: enumerate the free pairs and take a shuffled prefix.
        std::vector<UndirectedPair> free_pairs;
        free_pairs.reserve(static_cast<std::size_t>(remaining));
        for (int i = 0; i < node_count; ++i)
            for (int j = i + 1; j < node_count; ++j)
                if (!existing.count({i, j})) free_pairs.emplace_back(i, j);
        const std::size_t take = std::min<std::size_t>(free_pairs.size(), static_cast<std::size_t>(count));
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + bounded(rng, free_pairs.size() - i);
            std::swap(free_pairs[i], free_pairs[j]);
        }
        out.assign(free_pairs.begin(), free_pairs.begin() + static_cast<std::ptrdiff_t>(take));
    } else {
        std::set<UndirectedPair> chosen;
        while (static_cast<int>(chosen.size()) < count) {
            int a = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(node_count)));
            int b = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(node_count)));
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            if (existing.count({a, b})) continue;
            chosen.insert({a, b});
        }
        out.assign(chosen.begin(), chosen.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<UndirectedPair> dedup_undirected(const std::vector<DirectedPair>& pairs) {
    std::vector<UndirectedPair> out;
    out.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        if (a == b) continue;
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

DrawingGraph build_graph(const std::vector<NormalizedPath>& paths, const GraphConfig& cfg, std::string drawing_id,
                         const std::vector<std::optional<LabelTriple>>* labels, Diagnostics* diag) {
    if (paths.empty()) throw Error(ErrorKind::EmptyDrawing, drawing_id.empty() ? "no paths" : drawing_id);
    if (labels && labels->size() != paths.size()) {
        throw Error(ErrorKind::LengthMismatch, "label count differs from path count");
    }
    const int n = static_cast<int>(paths.size());
    const DrawingBounds bounds = drawing_bounds(paths);

    DrawingGraph g;
    g.drawing_id = std::move(drawing_id);
    g.meta.k_neighbors = cfg.k_neighbors;
    g.meta.n_max = cfg.features.n_max;
    g.meta.seed = cfg.seed;
    g.meta.bbox = {bounds.min_x, bounds.min_y, bounds.width, bounds.height};

    std::vector<PreparedPath> prepared;
    prepared.reserve(paths.size());
    std::vector<Vec2> medians;
    for (int i = 0; i < n; ++i) {
        GraphNode node;
        node.id = i;
        node.features = node_features(paths[i], bounds, cfg.features).flatten();
        if (labels) node.label = (*labels)[static_cast<std::size_t>(i)];
        g.nodes.push_back(std::move(node));
        prepared.push_back(prepare_path(paths[i], bounds, cfg.features));
        medians.push_back(prepared.back().median);
    }

    const std::vector<UndirectedPair> knn = dedup_undirected(knn_edges(medians, cfg.k_neighbors));
    const std::set<UndirectedPair> knn_set(knn.begin(), knn.end());
    const int random_count = static_cast<int>(std::ceil(cfg.random_fraction * static_cast<double>(knn.size())));
    const std::vector<UndirectedPair> extra = random_edges(n, random_count, cfg.seed, knn_set);
    g.meta.random_edges = static_cast<int>(extra.size());

    std::vector<std::pair<UndirectedPair, bool>> all;
    for (const auto& p : knn) all.emplace_back(p, true);
    for (const auto& p : extra) all.emplace_back(p, false);
    std::sort(all.begin(), all.end());

    const double diagonal = std::hypot(bounds.width, bounds.height) / bounds.scale();
    const double tol = cfg.features.contiguity_tol * diagonal;
    g.edges.reserve(all.size());
    for (const auto& [pair, from_knn] : all) {
        g.edges.push_back({pair.first, pair.second,
                           edge_features(prepared[pair.first], prepared[pair.second], from_knn, tol, diag)});
    }
    return g;
}

DrawingGraph filter_edges(const DrawingGraph& graph, const std::function<bool(const EdgeFeatureVector&)>& keep) {
    DrawingGraph out;
    out.drawing_id = graph.drawing_id;
    out.nodes = graph.nodes;
    out.meta = graph.meta;
    for (const GraphEdge& e : graph.edges)
        if (keep(e.features)) out.edges.push_back(e);
    return out;
}

namespace {

void append_real(std::string& out, double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteInput, "non-finite value in graph serialization");
    if (v == 0.0) v = 0.0;
    fmt::format_to(std::back_inserter(out), "{:.9g}", v);
}

template <typename Range>
void append_reals(std::string& out, const Range& values) {
    out += '[';
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        first = false;
        append_real(out, v);
    }
    out += ']';
}

}  // namespace

std::string graph_to_json(const DrawingGraph& g) {
    std::string out;
    out += "{\"drawing_id\":";
    out += nlohmann::json(g.drawing_id).dump();
    out += fmt::format(",\"meta\":{{\"k\":{},\"random_edges\":{},\"n_max\":{},\"seed\":{},\"bbox\":", g.meta.k_neighbors,
                       g.meta.random_edges, g.meta.n_max, g.meta.seed);
    append_reals(out, g.meta.bbox);
    out += "},\n\"nodes\":[";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const GraphNode& node = g.nodes[i];
        out += i ? ",\n" : "\n";
        out += fmt::format("{{\"id\":{},\"x\":", node.id);
        append_reals(out, node.features);
        if (node.label) {
            out += fmt::format(",\"y\":[{},{},{}]}}", (*node.label)[0], (*node.label)[1], (*node.label)[2]);
        } else {
            out += ",\"y\":null}";
        }
    }
    out += "],\n\"edges\":[";
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const GraphEdge& e = g.edges[i];
        out += i ? ",\n" : "\n";
        out += fmt::format("{{\"s\":{},\"d\":{},\"f\":", e.src, e.dst);
        append_reals(out, e.features.values);
        out += '}';
    }
    out += "]}\n";
    return out;
}

DrawingGraph graph_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorKind::BadFormat, std::string("graph JSON: ") + ex.what());
    }
    try {
        DrawingGraph g;
        g.drawing_id = j.at("drawing_id").get<std::string>();
        const auto& m = j.at("meta");
        g.meta.k_neighbors = m.at("k").get<int>();
        g.meta.random_edges = m.at("random_edges").get<int>();
        g.meta.n_max = m.at("n_max").get<int>();
        g.meta.seed = m.at("seed").get<std::uint64_t>();
        g.meta.bbox = m.at("bbox").get<std::array<double, 4>>();
        for (const auto& jn : j.at("nodes")) {
            GraphNode node;
            node.id = jn.at("id").get<int>();
            node.features = jn.at("x").get<std::vector<double>>();
            if (!jn.at("y").is_null()) node.label = jn.at("y").get<LabelTriple>();
            if (node.id != static_cast<int>(g.nodes.size())) {
                throw Error(ErrorKind::BadFormat, "node ids must be dense and sorted");
            }
            g.nodes.push_back(std::move(node));
        }
        for (const auto& je : j.at("edges")) {
            GraphEdge e;
            e.src = je.at("s").get<int>();
            e.dst = je.at("d").get<int>();
            e.features.values = je.at("f").get<std::array<double, kEdgeFeatureCount>>();
            if (!(e.src < e.dst) || e.dst >= static_cast<int>(g.nodes.size()) || e.src < 0) {
                throw Error(ErrorKind::BadFormat, fmt::format("invalid edge ({}, {})", e.src, e.dst));
            }
            g.edges.push_back(e);
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorKind::BadFormat, std::string("graph JSON schema: ") + ex.what());
    }
}

void save_graph(const DrawingGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << graph_to_json(graph);
}

DrawingGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return graph_from_json(ss.str());
}

}  // namespace vecseg
