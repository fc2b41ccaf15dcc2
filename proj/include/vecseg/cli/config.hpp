#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "vecseg/dataset/dataset.hpp"
#include "vecseg/gat/train.hpp"
#include "vecseg/graph/graph.hpp"

namespace vecseg {

/// Everything a pipeline run depends on. `seed` drives graph building,
/// initialization, shuffling and splitting; the copies inside `graph` and
/// `train` are overwritten from it by sync_seeds().
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string label_map = "data/labels/tum_vhf.tsv";
    LabelSource label_source = LabelSource::Layer;
    double rare_layer_threshold = 0.0;  // aggregate_rare threshold, 0 disables

    GraphConfig graph;

    int hidden = 666;
    double leaky_slope = 0.2;
    bool standardize = true;

    TrainConfig train;
    std::array<double, 3> split{0.8, 0.0, 0.2};
    double val_fraction = 0.1;  // carved from train when early stopping is on and split has no val part

    void sync_seeds();
};

/// TOML-style text: "key = value" lines under [section] headers, '#'
/// comments, strings in double quotes, arrays in brackets. Keys not listed
/// by config_keys() throw BadFormat.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path, PipelineConfig base = {});
std::string write_config(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::string& path);

/// Applies one "section.key" (or top-level "key") assignment; value uses
/// the file syntax, quotes optional for strings.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);
std::vector<std::string> config_keys();

/// VG_SEED, when set, replaces cfg.seed. Returns true if it did.
bool apply_seed_env(PipelineConfig& cfg);

}  // namespace vecseg
