#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vecseg/cli/config.hpp"

namespace vecseg {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

/// Maps an exception to an exit code and prints it to `err`.
int report_failure(std::ostream& err, const std::exception& e);

/// Expands files and directories (non-recursive, *.svg) into a sorted list.
std::vector<std::string> collect_svgs(const std::vector<std::string>& inputs);

struct NormalizeOptions {
    std::vector<std::string> inputs;
    std::string out_dir;
    bool skip_bad = false;
    int jobs = 1;
};
int cmd_normalize(const NormalizeOptions& opt, std::ostream& out, std::ostream& err);

struct GraphOptions {
    std::vector<std::string> inputs;
    std::string out_dir;
    PipelineConfig config;
    bool with_labels = false;  // use config.label_map / label_source
    bool skip_bad = false;
    int jobs = 1;
};
/// Writes graphs/<id>.json, manifest.json and config.toml under out_dir.
int cmd_graph(const GraphOptions& opt, std::ostream& out, std::ostream& err);

struct TrainOptions {
    std::string dataset;
    std::string out_dir;
    PipelineConfig config;
    bool quiet = false;
};
/// Writes model.ckpt, metrics.jsonl, split.json, config.toml and, when a
/// test split exists, report.txt / report.json.
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);

struct EvalOptions {
    std::string checkpoint;
    std::string dataset;
    int level = 3;
    std::string subset;      // "", "train", "val" or "test" (needs split.json next to the checkpoint)
    std::string label_map;   // class names; defaults to the checkpoint's
    std::string json_out;
    int jobs = 1;
};
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);

struct PredictOptions {
    std::string checkpoint;
    std::string svg;
    std::string out_svg;
    std::string palette;     // defaults to data/palette.tsv next to the label map
    std::string label_map;   // class names; defaults to the checkpoint's
    int level = 3;
};
/// Recolored flat SVG plus <out>.tsv with one label row per path.
int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err);

struct FilterOptions {
    std::string graph;
    std::string expression;
    std::string out;
};
int cmd_filter(const FilterOptions& opt, std::ostream& out, std::ostream& err);

struct SynthOptions {
    std::string out_dir;
    int count = 50;
    std::uint64_t seed = 0;
    double imbalance = 0.0;
    bool floorplancad_style = false;
};
int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);

/// Model + the config it was trained with, as stored in a checkpoint.
struct LoadedModel {
    GatModel model;
    PipelineConfig config;
};
LoadedModel load_trained(const std::string& checkpoint);

}  // namespace vecseg
