#include "vecseg/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "vecseg/error.hpp"
#include "vecseg/eval/metrics.hpp"
#include "vecseg/graph/filter_expr.hpp"
#include "vecseg/parallel.hpp"
#include "vecseg/svg/ingest.hpp"
#include "vecseg/synth/corpus.hpp"

namespace vecseg {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read {}", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", p.string()));
    out << text;
    if (!out) throw Error(ErrorKind::Io, fmt::format("write failed: {}", p.string()));
}

void make_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, fmt::format("cannot create {}: {}", dir, ec.message()));
}

// FNV-1a of the id, mixed into the run seed, so each drawing gets its own
// random edges independent of input order.
std::uint64_t drawing_seed(std::uint64_t seed, std::string_view id) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : id) h = (h ^ c) * 1099511628211ull;
    return h ^ (seed * 0x9e3779b97f4a7c15ull);
}

std::vector<std::string> drawing_ids(const std::vector<std::string>& files) {
    std::vector<std::string> ids;
    std::set<std::string> seen;
    for (const std::string& f : files) {
        std::string id = fs::path(f).stem().string();
        if (!seen.insert(id).second) throw Error(ErrorKind::InvalidArgument, fmt::format("duplicate drawing id '{}' ({})", id, f));
        ids.push_back(std::move(id));
    }
    return ids;
}

std::vector<std::array<double, 3>> load_palette(const std::string& path) {
    std::string text;
    if (path.empty()) {
        // same colors as data/palette.tsv
        text = "0\t#7f7f7f\n1\t#1f77b4\n2\t#d62728\n3\t#2ca02c\n4\t#ff7f0e\n5\t#9467bd\n6\t#8c564b\n7\t#e377c2\n"
               "8\t#17becf\n9\t#bcbd22\n10\t#aec7e8\n11\t#ffbb78\n12\t#98df8a\n13\t#ff9896\n14\t#c5b0d5\n"
               "15\t#c49c94\n16\t#f7b6d2\n17\t#9edae5\n18\t#dbdb8d\n19\t#393b79\n";
    } else {
        text = read_text(path);
    }
    std::vector<std::array<double, 3>> colors;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error(ErrorKind::BadFormat, fmt::format("palette line '{}'", line));
        const auto c = parse_color(line.substr(tab + 1));
        if (!c) throw Error(ErrorKind::BadFormat, fmt::format("palette color '{}'", line.substr(tab + 1)));
        colors.push_back(*c);
    }
    if (colors.empty()) throw Error(ErrorKind::BadFormat, "empty palette");
    return colors;
}

std::optional<LabelMap> embedded_label_map(const std::map<std::string, std::string>& meta) {
    const auto it = meta.find("label_map");
    if (it == meta.end() || it->second.empty()) return std::nullopt;
    return parse_label_map(it->second, "checkpoint");
}

std::vector<std::string> class_names(const std::optional<LabelMap>& map, int level, int count) {
    if (map && map->level_sizes()[static_cast<std::size_t>(level - 1)] == count) return map->level_names(level - 1);
    std::vector<std::string> names;
    for (int i = 0; i < count; ++i) names.push_back(std::to_string(i));
    return names;
}

void check_features(const GatModel& model, const std::vector<LabeledGraph>& graphs) {
    for (const LabeledGraph& g : graphs) {
        if (g.tensors.x.cols() != model.d_in) {
            throw Error(ErrorKind::InvalidArgument,
                        fmt::format("drawing '{}' has {} node features but the model expects {} (graph built with another n_max?)",
                                    g.id, g.tensors.x.cols(), model.d_in));
        }
    }
}

nlohmann::ordered_json id_list(const std::vector<LabeledGraph>& all, const std::vector<std::size_t>& idx) {
    auto out = nlohmann::ordered_json::array();
    for (std::size_t i : idx) out.push_back(all[i].id);
    return out;
}

}  // namespace

int report_failure(std::ostream& err, const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* ve = dynamic_cast<const Error*>(&e)) {
        switch (ve->kind()) {
            case ErrorKind::DimensionMismatch:
            case ErrorKind::LengthMismatch: return kExitInternal;
            default: return kExitInput;
        }
    }
    return kExitInternal;
}

std::vector<std::string> collect_svgs(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const std::string& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                std::string ext = entry.path().extension().string();
                std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
                if (entry.is_regular_file() && ext == ".svg") found.push_back(entry.path().string());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(in);
        } else {
            throw Error(ErrorKind::Io, fmt::format("no such file or directory: {}", in));
        }
    }
    return out;
}

int cmd_normalize(const NormalizeOptions& opt, std::ostream& out, std::ostream& err) {
    const auto files = collect_svgs(opt.inputs);
    const auto ids = drawing_ids(files);
    make_dir(opt.out_dir);
    struct Result {
        std::optional<std::string> error;
        std::size_t paths = 0;
        std::vector<std::string> warnings;
    };
    std::vector<Result> results(files.size());
    parallel_for(files.size(), opt.jobs, [&](std::size_t i) {
        Diagnostics diag;
        try {
            const auto paths = load_flat_paths(files[i], &diag);
            write_text(fs::path(opt.out_dir) / (ids[i] + ".svg"), write_flat_svg(paths));
            results[i].paths = paths.size();
        } catch (const Error& e) {
            results[i].error = e.what();
        }
        results[i].warnings = std::move(diag.warnings);
    });

    std::string log;
    int failed = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const Result& r = results[i];
        if (r.error) {
            ++failed;
            log += fmt::format("FAIL\t{}\t{}\n", files[i], *r.error);
            err << fmt::format("{}: {}\n", files[i], *r.error);
        } else {
            log += fmt::format("ok\t{}\t{} paths\n", files[i], r.paths);
        }
        for (const std::string& w : r.warnings) log += fmt::format("warn\t{}\t{}\n", files[i], w);
    }
    write_text(fs::path(opt.out_dir) / "normalize.log", log);
    out << fmt::format("{} processed, {} failed\n", files.size() - static_cast<std::size_t>(failed), failed);
    for (std::size_t i = 0; i < files.size(); ++i)
        if (results[i].error) out << fmt::format("  failed: {}\n", files[i]);
    return failed > 0 && !opt.skip_bad ? kExitInput : kExitOk;
}

int cmd_graph(const GraphOptions& opt, std::ostream& out, std::ostream& err) {
    const PipelineConfig& cfg = opt.config;
    const auto files = collect_svgs(opt.inputs);
    if (files.empty()) throw Error(ErrorKind::InvalidArgument, "no SVG inputs");
    const auto ids = drawing_ids(files);
    std::optional<LabelMap> map;
    if (opt.with_labels) map = load_label_map(cfg.label_map);
    make_dir((fs::path(opt.out_dir) / "graphs").string());

    std::vector<std::optional<std::vector<NormalizedPath>>> paths(files.size());
    std::vector<std::optional<std::string>> errors(files.size());
    parallel_for(files.size(), opt.jobs, [&](std::size_t i) {
        try {
            paths[i] = load_flat_paths(files[i]);
        } catch (const Error& e) {
            if (!opt.skip_bad) throw;
            errors[i] = e.what();
        }
    });

    // rare layers are folded into the catch-all before lookup
    std::map<std::string, std::string> aliases;
    if (map && cfg.label_source == LabelSource::Layer && cfg.rare_layer_threshold > 0.0) {
        std::map<std::string, int> occurrence;
        int drawings = 0;
        for (const auto& p : paths) {
            if (!p) continue;
            ++drawings;
            std::set<std::string> layers;
            for (const NormalizedPath& path : *p)
                if (path.source_layer) layers.insert(*path.source_layer);
            for (const std::string& l : layers) ++occurrence[l];
        }
        if (drawings > 0) aliases = aggregate_rare(occurrence, drawings, cfg.rare_layer_threshold, map->catch_all());
    }

    std::vector<std::optional<ManifestEntry>> entries(files.size());
    int feature_dim = NodeFeatureVector::dimension(cfg.graph.features.n_max);
    parallel_for(files.size(), opt.jobs, [&](std::size_t i) {
        if (!paths[i]) return;
        try {
            GraphConfig gc = cfg.graph;
            gc.seed = drawing_seed(cfg.seed, ids[i]);
            std::optional<std::vector<std::optional<LabelTriple>>> labels;
            if (map) labels = label_paths(*paths[i], *map, cfg.label_source, aliases);
            const DrawingGraph g = build_graph(*paths[i], gc, ids[i], labels ? &*labels : nullptr);
            const std::string rel = "graphs/" + ids[i] + ".json";
            save_graph(g, (fs::path(opt.out_dir) / rel).string());
            entries[i] = ManifestEntry{ids[i], rel, files[i], static_cast<int>(g.nodes.size()), static_cast<int>(g.edges.size()),
                                       map.has_value()};
        } catch (const Error& e) {
            if (!opt.skip_bad) throw;
            errors[i] = e.what();
        }
    });

    DatasetManifest manifest;
    manifest.feature_dimension = feature_dim;
    if (map) {
        manifest.label_provenance = map->provenance();
        manifest.level_sizes = map->level_sizes();
        manifest.label_file = "labels.tsv";
        write_text(fs::path(opt.out_dir) / "labels.tsv", write_label_map(*map));
    }
    int failed = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (entries[i]) {
            manifest.drawings.push_back(*entries[i]);
        } else {
            ++failed;
            err << fmt::format("{}: {}\n", files[i], errors[i].value_or("skipped"));
        }
    }
    save_manifest(manifest, (fs::path(opt.out_dir) / "manifest.json").string());
    save_config(cfg, (fs::path(opt.out_dir) / "config.toml").string());
    out << fmt::format("{} graphs written to {}, {} failed\n", manifest.drawings.size(), opt.out_dir, failed);
    return kExitOk;
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    const PipelineConfig& cfg = opt.config;
    DatasetManifest manifest;
    std::vector<LabeledGraph> all = load_dataset(opt.dataset, true, &manifest);
    if (all.empty()) throw Error(ErrorKind::InvalidArgument, "dataset is empty");
    std::string label_text;
    std::optional<LabelMap> map;
    if (!manifest.label_file.empty()) {
        label_text = read_text(fs::path(opt.dataset) / manifest.label_file);
        map = parse_label_map(label_text, manifest.label_file);
    }
    const int d_in = static_cast<int>(all.front().tensors.x.cols());

    DatasetSplit split = split_dataset(all.size(), cfg.split, cfg.seed);
    if (cfg.train.early_stopping && split.val.empty() && split.train.size() > 1) {
        const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(cfg.val_fraction * static_cast<double>(split.train.size()))),
                                               1, split.train.size() - 1);
        split.val.assign(split.train.end() - static_cast<std::ptrdiff_t>(k), split.train.end());
        split.train.resize(split.train.size() - k);
    }
    auto pick = [&](const std::vector<std::size_t>& idx) {
        std::vector<LabeledGraph> v;
        for (std::size_t i : idx) v.push_back(all[i]);
        return v;
    };
    const auto train = pick(split.train), val = pick(split.val), test = pick(split.test);
    if (train.empty()) throw Error(ErrorKind::InvalidArgument, "training split is empty");

    GatModel model = init_model(d_in, cfg.hidden, manifest.level_sizes, cfg.seed, cfg.leaky_slope);
    check_features(model, all);
    out << fmt::format("parameter_count: {}\n", parameter_count(model));
    out << fmt::format("drawings: {} train, {} val, {} test; d_in {}, hidden {}, levels {}/{}/{}\n", train.size(), val.size(),
                       test.size(), d_in, cfg.hidden, manifest.level_sizes[0], manifest.level_sizes[1], manifest.level_sizes[2]);
    out.flush();
    if (cfg.standardize) fit_input_scaling(model, train);

    make_dir(opt.out_dir);
    const fs::path dir(opt.out_dir);
    save_config(cfg, (dir / "config.toml").string());
    nlohmann::ordered_json sj;
    sj["seed"] = cfg.seed;
    sj["train"] = id_list(all, split.train);
    sj["val"] = id_list(all, split.val);
    sj["test"] = id_list(all, split.test);
    write_text(dir / "split.json", sj.dump(2) + "\n");

    std::ofstream metrics(dir / "metrics.jsonl", std::ios::binary);
    if (!metrics) throw Error(ErrorKind::Io, fmt::format("cannot write {}", (dir / "metrics.jsonl").string()));
    const auto t0 = std::chrono::steady_clock::now();
    {
        // epoch 0 is the untrained baseline
        nlohmann::ordered_json j;
        j["epoch"] = 0;
        j["train_loss"] = mean_loss(model, train, cfg.train.head_weights);
        if (!val.empty()) {
            j["val_loss"] = mean_loss(model, val, cfg.train.head_weights);
            j["val_wf1"] = weighted_f1(evaluate(model, val, cfg.train.eval_level, {}, cfg.train.jobs));
        }
        j["seconds"] = 0.0;
        metrics << j.dump() << "\n";
    }
    TrainConfig tc = cfg.train;
    tc.divergence_checkpoint = (dir / "diverged.ckpt").string();
    const std::map<std::string, std::string> meta = {{"config", write_config(cfg)}, {"label_map", label_text}};
    train_loop(model, train, val, tc, [&](const EpochMetrics& m, const GatModel&) {
        nlohmann::ordered_json j;
        j["epoch"] = m.epoch;
        j["train_loss"] = m.train_loss;
        if (m.val_loss) j["val_loss"] = *m.val_loss;
        if (m.val_wf1) j["val_wf1"] = *m.val_wf1;
        j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        metrics << j.dump() << "\n";
        metrics.flush();
        if (!opt.quiet) {
            out << fmt::format("epoch {:>4}  loss {:.5f}", m.epoch, m.train_loss);
            if (m.val_wf1) out << fmt::format("  val loss {:.5f}  val wF1 {:.4f}", *m.val_loss, *m.val_wf1);
            out << "\n";
            out.flush();
        }
        return true;
    });
    save_checkpoint(model, (dir / "model.ckpt").string(), meta);
    out << fmt::format("checkpoint: {}\n", (dir / "model.ckpt").string());

    if (!test.empty()) {
        const int level = cfg.train.eval_level;
        const auto names = class_names(map, level, model.level_sizes[static_cast<std::size_t>(level - 1)]);
        const ClassificationReport rep = evaluate(model, test, level, names, cfg.train.jobs);
        const std::string text = format_report(rep, fmt::format("Test split, level {} ({} drawings)", level, test.size()));
        out << text << fmt::format("wF1 {:.4f}\n", weighted_f1(rep));
        write_text(dir / "report.txt", text);
        write_text(dir / "report.json", report_to_json(rep) + "\n");
    }
    return kExitOk;
}

LoadedModel load_trained(const std::string& checkpoint) {
    std::map<std::string, std::string> meta;
    LoadedModel lm{load_checkpoint(checkpoint, &meta), {}};
    if (const auto it = meta.find("config"); it != meta.end()) lm.config = parse_config(it->second);
    return lm;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    if (opt.level < 1 || opt.level > 3) throw Error(ErrorKind::InvalidArgument, "level must be 1, 2 or 3");
    std::map<std::string, std::string> meta;
    const GatModel model = load_checkpoint(opt.checkpoint, &meta);
    std::optional<LabelMap> map = opt.label_map.empty() ? embedded_label_map(meta) : std::optional(load_label_map(opt.label_map));
    std::vector<LabeledGraph> graphs = load_dataset(opt.dataset, true);
    if (!opt.subset.empty()) {
        const auto split_file = fs::path(opt.checkpoint).parent_path() / "split.json";
        const auto j = nlohmann::json::parse(read_text(split_file), nullptr, false);
        if (j.is_discarded() || !j.contains(opt.subset)) {
            throw Error(ErrorKind::BadFormat, fmt::format("{} has no '{}' list", split_file.string(), opt.subset));
        }
        const auto wanted = j.at(opt.subset).get<std::set<std::string>>();
        std::erase_if(graphs, [&](const LabeledGraph& g) { return !wanted.count(g.id); });
    }
    if (graphs.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to evaluate");
    check_features(model, graphs);
    const auto k = static_cast<std::size_t>(opt.level - 1);
    const auto names = class_names(map, opt.level, model.level_sizes[k]);
    const ClassificationReport rep = evaluate(model, graphs, opt.level, names, opt.jobs);
    out << format_report(rep, fmt::format("Classification report, level {} ({} drawings)", opt.level, graphs.size()));
    const double wf1 = weighted_f1(rep);
    out << fmt::format("wF1 {:.4f}\n", wf1);
    std::optional<double> wf1_fg;
    if (map) {
        if (const LabelLeaf* bg = map->find(map->catch_all())) {
            const int bg_id = bg->triple()[k];
            wf1_fg = weighted_f1_excluding(rep, bg_id);
            out << fmt::format("wF1 without '{}' {:.4f}\n", names[static_cast<std::size_t>(bg_id)], *wf1_fg);
        }
    }
    if (!opt.json_out.empty()) {
        auto j = nlohmann::ordered_json::parse(report_to_json(rep));
        j["level"] = opt.level;
        j["wf1"] = wf1;
        if (wf1_fg) j["wf1_excluding_background"] = *wf1_fg;
        write_text(opt.json_out, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    if (opt.level < 1 || opt.level > 3) throw Error(ErrorKind::InvalidArgument, "level must be 1, 2 or 3");
    std::map<std::string, std::string> meta;
    const GatModel model = load_checkpoint(opt.checkpoint, &meta);
    PipelineConfig cfg;
    if (const auto it = meta.find("config"); it != meta.end()) cfg = parse_config(it->second);
    std::optional<LabelMap> map = opt.label_map.empty() ? embedded_label_map(meta) : std::optional(load_label_map(opt.label_map));
    const auto palette = load_palette(opt.palette);

    const auto paths = load_flat_paths(opt.svg);
    const std::string id = fs::path(opt.svg).stem().string();
    GraphConfig gc = cfg.graph;
    gc.seed = drawing_seed(cfg.seed, id);
    const DrawingGraph g = build_graph(paths, gc, id);
    LabeledGraph lg{id, to_tensors(g)};
    check_features(model, {lg});
    const auto pred = predict(model_forward(model, lg.tensors));

    const auto k = static_cast<std::size_t>(opt.level - 1);
    const auto names = class_names(map, opt.level, model.level_sizes[k]);
    std::vector<std::array<double, 3>> colors;
    std::vector<std::string> extra;
    std::string tsv = "path_id\tl1\tl2\tl3\tclass\n";
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int c = pred[i][k];
        colors.push_back(palette[static_cast<std::size_t>(c) % palette.size()]);
        extra.push_back(fmt::format("data-l1=\"{}\" data-l2=\"{}\" data-l3=\"{}\"", pred[i][0], pred[i][1], pred[i][2]));
        tsv += fmt::format("{}\t{}\t{}\t{}\t{}\n", paths[i].path_id, pred[i][0], pred[i][1], pred[i][2],
                           names[static_cast<std::size_t>(c)]);
    }
    write_text(opt.out_svg, write_flat_svg(paths, colors, extra));
    const std::string tsv_path = fs::path(opt.out_svg).replace_extension(".tsv").string();
    write_text(tsv_path, tsv);
    out << fmt::format("{} paths labeled; wrote {} and {}\n", paths.size(), opt.out_svg, tsv_path);
    return kExitOk;
}

int cmd_filter(const FilterOptions& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    const EdgePredicate pred = EdgePredicate::parse(opt.expression);
    const DrawingGraph g = load_graph(opt.graph);
    const DrawingGraph kept = filter_edges(g, [&](const EdgeFeatureVector& e) { return pred(e); });
    save_graph(kept, opt.out);
    out << fmt::format("{}: kept {} of {} edges\n", pred.to_string(), kept.edges.size(), g.edges.size());
    return kExitOk;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    if (opt.count < 0) throw Error(ErrorKind::InvalidArgument, "count must be >= 0");
    make_dir(opt.out_dir);
    SynthConfig sc;
    sc.imbalance = opt.imbalance;
    for (int i = 0; i < opt.count; ++i) {
        const std::uint64_t seed = opt.seed * 1000003ull + static_cast<std::uint64_t>(i);
        const std::string svg = opt.floorplancad_style ? synth_floorplancad_svg(seed, sc) : synth_floorplan_svg(seed, sc);
        write_text(fs::path(opt.out_dir) / fmt::format("synth_{:04d}.svg", i), svg);
    }
    if (!opt.floorplancad_style) write_text(fs::path(opt.out_dir) / "labels.tsv", synthetic_label_tsv());
    out << fmt::format("{} drawings written to {}\n", opt.count, opt.out_dir);
    return kExitOk;
}

}  // namespace vecseg
