// vecseg: normalize -> graph -> train -> eval/predict, plus filter and synth.
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "vecseg/cli/commands.hpp"
#include "vecseg/error.hpp"

using namespace vecseg;

namespace {

// Config file first, then --set overrides, then VG_SEED.
PipelineConfig resolve_config(const std::string& file, const std::vector<std::string>& sets, PipelineConfig base = {}) {
    PipelineConfig cfg = file.empty() ? base : load_config(file, base);
    for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (apply_seed_env(cfg)) std::cerr << "seed " << cfg.seed << " taken from VG_SEED\n";
    cfg.sync_seeds();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vector floor-plan line segmentation with a hierarchical graph attention network"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> sets;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "TOML-style config file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "override one config key, e.g. --set train.epochs=10");
    };

    NormalizeOptions norm;
    auto* normalize = app.add_subcommand("normalize", "flatten transforms and groups into flat SVGs");
    normalize->add_option("inputs", norm.inputs, "SVG files or directories")->required();
    normalize->add_option("-o,--out", norm.out_dir, "output directory")->required();
    normalize->add_flag("--skip-bad", norm.skip_bad, "exit 0 even when some files fail");
    normalize->add_option("-j,--jobs", norm.jobs, "parallel files")->check(CLI::PositiveNumber);

    GraphOptions graph;
    std::string label_file, label_source;
    auto* graph_cmd = app.add_subcommand("graph", "build graph JSON files and a dataset manifest");
    graph_cmd->add_option("inputs", graph.inputs, "SVG files or directories")->required();
    graph_cmd->add_option("-o,--out", graph.out_dir, "dataset directory")->required();
    graph_cmd->add_option("--labels", label_file, "label map TSV; attaches (l1, l2, l3) to every node");
    graph_cmd->add_option("--label-source", label_source, "layer or semantic-id");
    graph_cmd->add_flag("--skip-bad", graph.skip_bad, "skip drawings that fail instead of aborting");
    graph_cmd->add_option("-j,--jobs", graph.jobs, "parallel files")->check(CLI::PositiveNumber);
    add_config(graph_cmd);

    TrainOptions train;
    int train_epochs = -1, train_jobs = 0;
    auto* train_cmd = app.add_subcommand("train", "train on a dataset directory");
    train_cmd->add_option("dataset", train.dataset, "directory written by 'graph'")->required();
    train_cmd->add_option("-o,--out", train.out_dir, "run directory")->required();
    train_cmd->add_option("--epochs", train_epochs, "override train.epochs (0 writes the untrained model)");
    train_cmd->add_option("-j,--jobs", train_jobs, "threads per batch");
    train_cmd->add_flag("-q,--quiet", train.quiet, "no per-epoch lines");
    add_config(train_cmd);

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "classification report for a checkpoint");
    eval_cmd->add_option("checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("dataset", ev.dataset)->required();
    eval_cmd->add_option("--level", ev.level, "hierarchy level 1, 2 or 3")->check(CLI::Range(1, 3));
    eval_cmd->add_option("--subset", ev.subset, "train, val or test from the run's split.json");
    eval_cmd->add_option("--labels", ev.label_map, "label map for class names");
    eval_cmd->add_option("--json", ev.json_out, "also write the report as JSON");
    eval_cmd->add_option("-j,--jobs", ev.jobs)->check(CLI::PositiveNumber);

    PredictOptions pr;
    auto* predict_cmd = app.add_subcommand("predict", "label every path of an SVG and recolor it");
    predict_cmd->add_option("checkpoint", pr.checkpoint)->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("svg", pr.svg)->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("-o,--out", pr.out_svg, "recolored SVG; labels go to the same name with .tsv")->required();
    predict_cmd->add_option("--palette", pr.palette, "palette TSV (id, #rrggbb)");
    predict_cmd->add_option("--labels", pr.label_map, "label map for class names");
    predict_cmd->add_option("--level", pr.level, "level used for colors")->check(CLI::Range(1, 3));

    FilterOptions fl;
    auto* filter_cmd = app.add_subcommand("filter", "keep the edges matching a predicate");
    filter_cmd->add_option("graph", fl.graph)->required()->check(CLI::ExistingFile);
    filter_cmd->add_option("expression", fl.expression, "e.g. \"contiguous == 1 && intersection_count >= 1\"")->required();
    filter_cmd->add_option("-o,--out", fl.out)->required();

    SynthOptions sy;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic labeled floor-plan corpus");
    synth_cmd->add_option("-o,--out", sy.out_dir)->required();
    synth_cmd->add_option("-n,--count", sy.count);
    synth_cmd->add_option("--seed", sy.seed);
    synth_cmd->add_option("--imbalance", sy.imbalance, "unlabeled strokes per stroke of the rarest class");
    synth_cmd->add_flag("--floorplancad", sy.floorplancad_style, "semantic-id attributes instead of layers");

    CLI11_PARSE(app, argc, argv);

    try {
        if (normalize->parsed()) return cmd_normalize(norm, std::cout, std::cerr);
        if (graph_cmd->parsed()) {
            graph.config = resolve_config(config_file, sets);
            if (!label_file.empty()) graph.config.label_map = label_file;
            if (!label_source.empty()) graph.config.label_source = parse_label_source(label_source);
            graph.with_labels = !label_file.empty();
            return cmd_graph(graph, std::cout, std::cerr);
        }
        if (train_cmd->parsed()) {
            // start from the config the dataset was built with so graph settings carry over
            const auto dataset_cfg = std::filesystem::path(train.dataset) / "config.toml";
            train.config = resolve_config(config_file, sets,
                                          std::filesystem::exists(dataset_cfg) ? load_config(dataset_cfg.string()) : PipelineConfig{});
            if (train_epochs >= 0) train.config.train.epochs = train_epochs;
            if (train_jobs > 0) train.config.train.jobs = train_jobs;
            return cmd_train(train, std::cout, std::cerr);
        }
        if (eval_cmd->parsed()) return cmd_eval(ev, std::cout, std::cerr);
        if (predict_cmd->parsed()) return cmd_predict(pr, std::cout, std::cerr);
        if (filter_cmd->parsed()) return cmd_filter(fl, std::cout, std::cerr);
        if (synth_cmd->parsed()) return cmd_synth(sy, std::cout, std::cerr);
    } catch (const std::exception& e) {
        return report_failure(std::cerr, e);
    }
    return kExitInternal;
}
