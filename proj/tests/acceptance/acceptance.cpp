// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "vecseg/cli/commands.hpp"
#include "vecseg/dataset/dataset.hpp"
#include "vecseg/error.hpp"
#include "vecseg/eval/metrics.hpp"
#include "vecseg/gat/train.hpp"
#include "vecseg/geometry/measures.hpp"
#include "vecseg/graph/graph.hpp"
#include "vecseg/svg/path_data.hpp"
#include "vecseg/synth/corpus.hpp"

using namespace vecseg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int hw_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

NormalizedPath path_of(std::string_view d) {
    NormalizedPath p;
    p.commands = canonicalize_commands(d);
    return p;
}

// ---- geometry ------------------------------------------------------------

// Closed-segment test by orientation signs, independent of the library.
int orient(Vec2 a, Vec2 b, Vec2 c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
}
bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}
bool exact_intersect(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
    const int o1 = orient(p1, q1, p2), o2 = orient(p1, q1, q2), o3 = orient(p2, q2, p1), o4 = orient(p2, q2, q1);
    if (o1 != o2 && o3 != o4) return true;
    return (o1 == 0 && on_segment(p1, q1, p2)) || (o2 == 0 && on_segment(p1, q1, q2)) || (o3 == 0 && on_segment(p2, q2, p1)) ||
           (o4 == 0 && on_segment(p2, q2, q1));
}
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

Outcome geometry_oracles() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int agree = 0, unexplained = 0;
    const int pairs = 10000;
    for (int i = 0; i < pairs; ++i) {
        const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
        const auto sa = sample_equal_arclength(path_of(fmt::format("M {} {} L {} {}", a.x, a.y, b.x, b.y)), 64);
        const auto sb = sample_equal_arclength(path_of(fmt::format("M {} {} L {} {}", c.x, c.y, d.x, d.y)), 64);
        const int sampled = count_intersections(sa, sb);
        const int exact = exact_intersect(a, b, c, d) ? 1 : 0;
        if (sampled == exact) {
            ++agree;
            continue;
        }
        // allowed only when an endpoint is within one sampling pitch of the other segment
        const double pitch = std::max(sa.spacing, sb.spacing);
        const double near = std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                                      point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
        if (near > pitch) ++unexplained;
    }
    const double agreement = static_cast<double>(agree) / pairs;

    const NormalizedPath circle = path_of("M 1 0 A 1 1 0 1 1 -1 0 A 1 1 0 1 1 1 0 Z");
    const double len_err = std::abs(path_length(circle) - 2 * std::numbers::pi);
    const double area_err = std::abs(path_area(circle).value_or(0.0) - std::numbers::pi);

    bool straight_zero = true;
    for (int i = 0; i < 200; ++i) {
        const std::string d = fmt::format("M {} {} L {} {}", u(rng) * 100, u(rng) * 100, u(rng) * 100, u(rng) * 100);
        for (int n : {1, 4, 16, 64})
            for (double k : curvature_profile(path_of(d), n).samples) straight_zero = straight_zero && k == 0.0;
    }
    const double kappa = three_point_curvature({0, 0}, {1, 1}, {2, 0});
    const double kappa_err = std::abs(kappa - std::numbers::sqrt2);
    const double mirror_err = std::abs(three_point_curvature({0, 0}, {1, -1}, {2, 0}) + std::numbers::sqrt2);

    const bool pass = agreement >= 0.995 && unexplained == 0 && len_err <= 1e-4 && area_err <= 1e-3 && straight_zero &&
                      kappa_err <= 1e-9 && mirror_err <= 1e-9;
    return {pass, fmt::format("intersection agreement {:.4f} ({} unexplained), |L-2pi| {:.2e}, |A-pi| {:.2e}, "
                              "straight lines exactly 0: {}, |kappa-sqrt2| {:.1e}",
                              agreement, unexplained, len_err, area_err, straight_zero ? "yes" : "no", kappa_err)};
}

// ---- graph invariants ----------------------------------------------------

double circular_gap(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

Outcome graph_invariants() {
    std::mt19937_64 rng(77);
    GraphConfig cfg;
    int degree_bad = 0, order_bad = 0, nondeterministic = 0;
    double worst = 0.0, worst_abs = 0.0;
    std::string worst_at = "-";
    auto note = [&](double dev, std::string_view what, int drawing, std::size_t move) {
        if (dev > worst) {
            worst = dev;
            worst_at = fmt::format("{} (drawing {}, transform {})", what, drawing, move);
        }
    };
    std::size_t total_nodes = 0;
    struct Move {
        AffineTransform2D t;
        double turns;
        bool rotates;
    };
    const std::vector<Move> moves = {
        {AffineTransform2D::translate(-321.5, 88.25), 0.0, false},
        {AffineTransform2D::scale(2.5, 2.5), 0.0, false},
        {AffineTransform2D::translate(40, -7) * AffineTransform2D::rotate_degrees(90), 0.25, true},
        {AffineTransform2D::rotate_degrees(180) * AffineTransform2D::scale(0.4, 0.4), 0.5, true},
        {AffineTransform2D::rotate_degrees(270), 0.75, true},
    };
    for (int d = 0; d < 100; ++d) {
        const int count = 5 + static_cast<int>(rng() % 196);
        const auto paths = random_paths(count, 1000 + static_cast<std::uint64_t>(d), 10.0 + static_cast<double>(rng() % 500));
        cfg.seed = static_cast<std::uint64_t>(d);
        const DrawingGraph g = build_graph(paths, cfg, "d");
        total_nodes += g.nodes.size();
        if (graph_to_json(g) != graph_to_json(build_graph(paths, cfg, "d"))) ++nondeterministic;

        std::vector<int> deg(g.nodes.size(), 0);
        for (std::size_t k = 0; k < g.edges.size(); ++k) {
            const GraphEdge& e = g.edges[k];
            ++deg[static_cast<std::size_t>(e.src)];
            ++deg[static_cast<std::size_t>(e.dst)];
            if (e.src >= e.dst) ++order_bad;
            if (k > 0 && std::pair(g.edges[k - 1].src, g.edges[k - 1].dst) >= std::pair(e.src, e.dst)) ++order_bad;
        }
        const int need = std::min(cfg.k_neighbors, static_cast<int>(g.nodes.size()) - 1);
        for (int v : deg) degree_bad += v < need;

        const std::size_t median_x = kNodeScalarFeatures - 2;
        const auto names = node_feature_names(cfg.features.n_max);
        for (std::size_t mi = 0; mi < moves.size(); ++mi) {
            const Move& m = moves[mi];
            auto moved_paths = paths;
            for (NormalizedPath& p : moved_paths) p.commands = transform_commands(p.commands, m.t);
            const DrawingGraph h = build_graph(moved_paths, cfg, "d");
            if (h.edges.size() != g.edges.size()) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            for (std::size_t v = 0; v < g.nodes.size(); ++v) {
                const auto& a = g.nodes[v].features;
                const auto& b = h.nodes[v].features;
                const std::size_t stop = m.rotates ? median_x : a.size();
                for (std::size_t i = 0; i < stop; ++i) {
                    // curvature is unbounded (sharp corners reach 1e6), so it is held to 1e-6 relative like kappa itself
                    const bool curvature = names[i].starts_with("curvature_");
                    const double dev = std::abs(a[i] - b[i]);
                    worst_abs = std::max(worst_abs, dev);
                    note(curvature ? dev / std::max(1.0, std::abs(a[i])) : dev, fmt::format("{}={:.6g}", names[i], a[i]), d, mi);
                }
            }
            for (std::size_t k = 0; k < g.edges.size(); ++k) {
                if (std::pair(g.edges[k].src, g.edges[k].dst) != std::pair(h.edges[k].src, h.edges[k].dst)) {
                    worst = std::numeric_limits<double>::infinity();
                    break;
                }
                for (int i = 0; i < kEdgeFeatureCount; ++i) {
                    const double x = g.edges[k].features.values[static_cast<std::size_t>(i)];
                    const double y = h.edges[k].features.values[static_cast<std::size_t>(i)];
                    if (i == static_cast<int>(EdgeFeature::ThetaNorm)) {
                        double expect = x + m.turns;
                        expect -= std::floor(expect);
                        note(circular_gap(expect, y), kEdgeFeatureNames[static_cast<std::size_t>(i)], d, mi);
                    } else {
                        note(std::abs(x - y), kEdgeFeatureNames[static_cast<std::size_t>(i)], d, mi);
                    }
                }
            }
        }
    }
    const bool pass = degree_bad == 0 && order_bad == 0 && nondeterministic == 0 && worst <= 1e-6;
    return {pass, fmt::format("100 drawings, {} nodes: degree violations {}, edge order violations {}, nondeterministic {}, "
                              "max invariance deviation {:.2e} at {} (raw absolute max {:.2e})",
                              total_nodes, degree_bad, order_bad, nondeterministic, worst, worst_at, worst_abs)};
}

// ---- GAT -----------------------------------------------------------------

LabeledGraph labeled_random_graph(int nodes, std::uint64_t seed, std::array<int, 3> sizes, int n_max) {
    GraphConfig cfg;
    cfg.k_neighbors = 3;
    cfg.random_fraction = 0.3;
    cfg.seed = seed;
    cfg.features.n_max = n_max;
    std::mt19937_64 rng(seed);
    std::vector<std::optional<LabelTriple>> labels;
    for (int i = 0; i < nodes; ++i) {
        labels.push_back(LabelTriple{static_cast<int>(rng() % static_cast<std::uint64_t>(sizes[0])),
                                     static_cast<int>(rng() % static_cast<std::uint64_t>(sizes[1])),
                                     static_cast<int>(rng() % static_cast<std::uint64_t>(sizes[2]))});
    }
    const std::string id = fmt::format("r{}", seed);
    return {id, to_tensors(build_graph(random_paths(nodes, seed), cfg, id, &labels), true)};
}

double worst_attention_row(const LayerTrace& tr, const GraphTensors& g) {
    double worst = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
        double s = 0.0;
        for (int a = g.offsets[static_cast<std::size_t>(i)]; a < g.offsets[static_cast<std::size_t>(i) + 1]; ++a) s += tr.alpha[a];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

Outcome gat_correctness() {
    const std::array<int, 3> sizes{3, 7, 11};
    // attention rows on synthetic and random drawings
    double row_err = 0.0;
    int graphs = 0;
    const LabelMap map = synthetic_label_map();
    for (int s = 0; s < 10; ++s) {
        GraphConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(s);
        std::vector<LabeledGraph> set;
        set.push_back({"f", to_tensors(graph_from_svg(synth_floorplan_svg(500 + static_cast<std::uint64_t>(s)), "f", cfg, &map), true)});
        set.push_back(labeled_random_graph(5 + 20 * s, 900 + static_cast<std::uint64_t>(s), sizes, 32));
        GatModel m = init_model(static_cast<int>(set[0].tensors.x.cols()), 32, sizes, static_cast<std::uint64_t>(s));
        fit_input_scaling(m, set);
        for (const LabeledGraph& g : set) {
            const ForwardTrace tr = model_forward(m, g.tensors);
            row_err = std::max({row_err, worst_attention_row(tr.layer1, tr.input), worst_attention_row(tr.layer2, tr.input)});
            ++graphs;
        }
    }

    // central differences on three small instances
    double worst_rel = 0.0;
    int instances = 0;
    const std::array<double, 3> w{1.0, 0.7, 1.3};
    for (std::uint64_t seed : {11, 22, 33}) {
        const int nodes = 5 + static_cast<int>(seed % 6);
        const LabeledGraph g = labeled_random_graph(nodes, seed, sizes, 1);
        GatModel m = init_model(static_cast<int>(g.tensors.x.cols()), 8, sizes, seed);
        fit_input_scaling(m, {g});
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        for (auto& b : m.head_b)
            for (double& v : b) v = u(rng);
        const LossResult r = loss_and_gradients(m, g.tensors, w);
        const auto analytic = param_blocks(std::as_const(r.grad));
        auto blocks = param_blocks(m);
        const double h = 1e-5;
        // below this a central difference is roundoff, so compare absolutely
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, r.loss) / (2 * h) / 1e-4;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (std::size_t k = 0; k < blocks[b].values.size(); ++k) {
                double& v = blocks[b].values[k];
                const double keep = v;
                v = keep + h;
                const double up = loss_only(m, g.tensors, w);
                v = keep - h;
                const double down = loss_only(m, g.tensors, w);
                v = keep;
                const double fd = (up - down) / (2 * h);
                const double an = analytic[b][k];
                worst_rel = std::max(worst_rel, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), floor}));
            }
        }
        ++instances;
    }

    // permutation equivariance, bitwise
    int exact = 0, tried = 0;
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        GraphConfig cfg;
        cfg.seed = seed;
        cfg.features.n_max = 4;
        const DrawingGraph dg = build_graph(random_paths(30, seed), cfg, "p");
        const GraphTensors a = to_tensors(dg);
        const int n = a.node_count();
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(seed);
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix x(n, a.x.cols());
        for (int i = 0; i < n; ++i) x.row(perm[static_cast<std::size_t>(i)]) = a.x.row(i);
        std::vector<std::size_t> order(dg.edges.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::pair<int, int>> edges;
        Matrix e(static_cast<Eigen::Index>(order.size()), kEdgeFeatureCount);
        for (std::size_t k = 0; k < order.size(); ++k) {
            const GraphEdge& ge = dg.edges[order[k]];
            const int s = perm[static_cast<std::size_t>(ge.src)], t = perm[static_cast<std::size_t>(ge.dst)];
            edges.emplace_back(std::min(s, t), std::max(s, t));
            for (int c = 0; c < kEdgeFeatureCount; ++c) e(static_cast<Eigen::Index>(k), c) = ge.features.values[static_cast<std::size_t>(c)];
        }
        const GraphTensors b = make_tensors(x, edges, e);
        GatModel m = init_model(static_cast<int>(a.x.cols()), 16, sizes, seed);
        fit_input_scaling(m, {LabeledGraph{"p", a}});
        const ForwardTrace fa = model_forward(m, a), fb = model_forward(m, b);
        bool same = true;
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < n; ++i) same = same && fa.probs[k].row(i) == fb.probs[k].row(perm[static_cast<std::size_t>(i)]);
        exact += same;
        ++tried;
    }

    const bool pass = row_err <= 1e-9 && instances >= 3 && worst_rel < 1e-4 && exact == tried;
    return {pass, fmt::format("attention row sums within {:.1e} on {} graphs; gradient check max rel error {:.2e} on {} instances; "
                              "permutation equivariance exact on {}/{}",
                              row_err, graphs, worst_rel, instances, exact, tried)};
}

// ---- training ------------------------------------------------------------

std::vector<LabeledGraph> synthetic_corpus(int count, std::uint64_t first_seed, const GraphConfig& base, const SynthConfig& sc = {}) {
    const LabelMap map = synthetic_label_map();
    std::vector<LabeledGraph> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        GraphConfig cfg = base;
        cfg.seed = first_seed + static_cast<std::uint64_t>(i);
        const std::string id = fmt::format("s{:05d}", i);
        out[static_cast<std::size_t>(i)] = {id, to_tensors(graph_from_svg(synth_floorplan_svg(cfg.seed, sc), id, cfg, &map), true)};
    }
    return out;
}

Outcome overfit_sanity() {
    const auto t0 = Clock::now();
    const PipelineConfig pc;  // default graph and model sizes
    const auto data = synthetic_corpus(50, 1, pc.graph);
    std::size_t nodes = 0;
    for (const auto& g : data) nodes += static_cast<std::size_t>(g.tensors.node_count());
    GatModel m = init_model(static_cast<int>(data[0].tensors.x.cols()), pc.hidden, synthetic_label_map().level_sizes(), 1);
    fit_input_scaling(m, data);
    TrainConfig tc = pc.train;
    tc.epochs = 300;
    tc.seed = 1;
    tc.jobs = hw_jobs();
    double acc = 0.0;
    int epochs = 0;
    train_loop(m, data, {}, tc, [&](const EpochMetrics& e, const GatModel& model) {
        epochs = e.epoch;
        acc = evaluate(model, data, 3, {}, tc.jobs).accuracy;
        return acc < 0.95 && seconds_since(t0) < 300.0;
    });
    const double secs = seconds_since(t0);
    const bool pass = acc >= 0.95 && epochs <= 300 && secs < 300.0;
    return {pass, fmt::format("50 drawings ({} nodes), d_in {}, hidden {}: level-3 train accuracy {:.4f} after {} epochs, {:.1f} s",
                              nodes, m.d_in, m.d_h, acc, epochs, secs)};
}

Outcome hierarchy_benefit() {
    int wins = 0;
    std::string detail;
    SynthConfig sc;
    sc.imbalance = 20.0;
    GraphConfig gc;
    gc.features.n_max = 8;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto all = synthetic_corpus(32, 5000 * seed, gc, sc);
        const DatasetSplit split = split_dataset(all.size(), {0.75, 0.0, 0.25}, seed);
        std::vector<LabeledGraph> train, test;
        for (auto i : split.train) train.push_back(all[i]);
        for (auto i : split.test) test.push_back(all[i]);
        auto run = [&](std::array<double, 3> heads) {
            GatModel m = init_model(static_cast<int>(train[0].tensors.x.cols()), 64, synthetic_label_map().level_sizes(), seed);
            fit_input_scaling(m, train);
            TrainConfig tc;
            tc.epochs = 30;
            tc.lr = 3e-3;
            tc.seed = seed;
            tc.head_weights = heads;
            tc.jobs = hw_jobs();
            train_loop(m, train, {}, tc);
            return macro_f1(evaluate(m, test, 3, {}, tc.jobs));
        };
        const double three = run({1, 1, 1});
        const double single = run({0, 0, 1});
        wins += three >= single;
        detail += fmt::format("{}seed {}: {:.4f} vs {:.4f}", detail.empty() ? "" : "; ", seed, three, single);
    }
    return {wins >= 2, fmt::format("level-3 macro-F1, three heads vs level-3 head only, 20:1 imbalance: {} ({} of 3 seeds)", detail, wins)};
}

// ---- metrics / capacity ----------------------------------------------------

Outcome metrics_exactness() {
    const ClassificationReport r = classification_report(std::vector<int>{0, 0, 1}, std::vector<int>{0, 1, 1}, 3,
                                                         {"a", "b", "Roof Construction"});
    const double third2 = 2.0 / 3.0;
    const auto& c0 = r.rows[0];
    const auto& c1 = r.rows[1];
    const auto& z = r.rows[2];
    const bool hand = c0.precision == 1.0 && c0.recall == 0.5 && c0.f1 == third2 && c0.support == 2 && c1.precision == 0.5 &&
                      c1.recall == 1.0 && c1.f1 == third2 && c1.support == 1 && r.accuracy == third2;
    // two categories for the averages, as in the hand computation
    const ClassificationReport r2 = classification_report(std::vector<int>{0, 0, 1}, std::vector<int>{0, 1, 1}, 2);
    const bool averages = r2.macro.f1 == third2 && r2.weighted.f1 == third2 && weighted_f1(r2) == third2 &&
                          r2.macro.precision == 0.75 && r2.macro.recall == 0.75;
    const bool zero_row = z.precision == 0.0 && z.recall == 0.0 && z.f1 == 0.0 && z.support == 0 &&
                          format_report(r).find("Roof Construction       0.00       0.00       0.00          0") != std::string::npos;
    return {hand && averages && zero_row, fmt::format("hand case exact: {}, averages exact: {}, zero-support row 0.00/0.00/0.00: {}",
                                                      hand, averages, zero_row)};
}

Outcome model_capacity() {
    const PipelineConfig pc;
    const LabelMap tum = load_label_map(std::string(VECSEG_SOURCE_DIR) + "/" + pc.label_map);
    const int d_in = NodeFeatureVector::dimension(pc.graph.features.n_max);
    const std::int64_t count = parameter_count(d_in, pc.hidden, tum.level_sizes());

    // and the number cmd_train prints first
    const fs::path dir = fs::temp_directory_path() / "vecseg_acceptance_capacity";
    fs::remove_all(dir);
    std::ostringstream sink, out;
    cmd_synth({(dir / "svg").string(), 2, 1, 0.0, false}, sink, sink);
    GraphOptions g;
    g.inputs = {(dir / "svg").string()};
    g.out_dir = (dir / "ds").string();
    g.config.label_map = (dir / "svg/labels.tsv").string();
    g.with_labels = true;
    cmd_graph(g, sink, sink);
    TrainOptions t;
    t.dataset = g.out_dir;
    t.out_dir = (dir / "run").string();
    t.config = g.config;
    t.config.train.epochs = 0;
    t.config.split = {1.0, 0.0, 0.0};
    t.quiet = true;
    cmd_train(t, out, sink);
    const std::int64_t printed_expect = parameter_count(d_in, pc.hidden, synthetic_label_map().level_sizes());
    const bool printed = out.str().starts_with(fmt::format("parameter_count: {}\n", printed_expect));
    fs::remove_all(dir);
    const bool in_range = count >= 1'000'000 && count <= 1'600'000 && printed_expect >= 1'000'000 && printed_expect <= 1'600'000;
    return {in_range && printed, fmt::format("default (d_in {}, hidden {}, TUM levels {}/{}/{}) has {} weights; train prints "
                                             "'parameter_count: {}' at startup: {}",
                                             d_in, pc.hidden, tum.level_sizes()[0], tum.level_sizes()[1], tum.level_sizes()[2],
                                             count, printed_expect, printed)};
}

// ---- FloorplanCAD script ---------------------------------------------------

Outcome floorplancad_script() {
    const fs::path work = fs::temp_directory_path() / "vecseg_acceptance_floorplancad";
    fs::remove_all(work);
    fs::create_directories(work);
    std::string source;
    if (const char* env = std::getenv("FLOORPLANCAD_DIR"); env && *env) {
        source = env;
    } else {
        std::ostringstream sink;
        cmd_synth({(work / "mock").string(), 100, 7, 0.0, true}, sink, sink);
        source = (work / "mock").string();
    }
    const std::string cmd = fmt::format(
        "FLOORPLANCAD_DIR='{}' LIMIT=100 EPOCHS=2 JOBS={} VECSEG='{}' '{}/scripts/floorplancad_train.sh' '{}' > '{}' 2>&1", source,
        hw_jobs(), VECSEG_CLI_PATH, VECSEG_SOURCE_DIR, (work / "w").string(), (work / "log.txt").string());
    const int status = std::system(cmd.c_str());
    if (status != 0) {
        std::ifstream log(work / "log.txt");
        std::string tail, line;
        while (std::getline(log, line)) tail = line;
        return {false, fmt::format("script exited with status {}: {}", status, tail)};
    }
    auto read_json = [](const fs::path& p) {
        std::ifstream in(p);
        return nlohmann::json::parse(in);
    };
    const double base = read_json(work / "w/baseline.json").at("wf1").get<double>();
    const double final = read_json(work / "w/final.json").at("wf1").get<double>();
    std::vector<double> losses;
    std::ifstream metrics(work / "w/run/metrics.jsonl");
    for (std::string line; std::getline(metrics, line);) losses.push_back(nlohmann::json::parse(line).at("train_loss").get<double>());
    bool decreasing = losses.size() == 3;
    for (std::size_t i = 1; i < losses.size(); ++i) decreasing = decreasing && losses[i] < losses[i - 1];
    fs::remove_all(work);
    const bool pass = final > base && decreasing;
    std::string loss_text;
    for (double l : losses) loss_text += fmt::format("{}{:.4f}", loss_text.empty() ? "" : " > ", l);
    return {pass, fmt::format("{} data, 2 epochs on 100 drawings: test wF1 {:.4f} -> {:.4f} (random init -> trained), train loss {}",
                              std::getenv("FLOORPLANCAD_DIR") ? "FloorplanCAD" : "mock FloorplanCAD-style", base, final, loss_text)};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        std::string name;
        double budget_s;  // 0 = no runtime limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {"geometry_oracles", 30, geometry_oracles},
        {"graph_invariants", 120, graph_invariants},
        {"gat_correctness", 60, gat_correctness},
        {"overfit_sanity", 300, overfit_sanity},
        {"hierarchy_benefit", 0, hierarchy_benefit},
        {"metrics_exactness", 0, metrics_exactness},
        {"model_capacity", 0, model_capacity},
        {"floorplancad_script", 0, floorplancad_script},
    };
    const std::string only = argc > 1 ? argv[1] : "";
    int failed = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && c.name != only) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = seconds_since(t0);
        std::string timing = fmt::format("{:.1f} s", secs);
        if (c.budget_s > 0) {
            timing += fmt::format(" (limit {:.0f} s)", c.budget_s);
            if (secs >= c.budget_s) o.pass = false;
        }
        std::cout << fmt::format("{} {}: {} [{}]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail, timing) << std::flush;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
