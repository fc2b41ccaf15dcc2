#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vecseg/labels/label_map.hpp"
#include "vecseg/svg/path.hpp"

namespace vecseg {

/// Synthetic floorplan classes (leaf ids of the synthetic label map).
enum class SynthClass : int {
    Other = 0,
    Grid,
    LoadBearingWall,
    PartitionWall,
    Window,
    DoorLeaf,
    DoorSwing,
    Column,
    DimensionLine,
    DimensionTick,
    Furniture,
};

inline constexpr int kSynthClassCount = 11;

/// Label map text shipped as data/labels/synthetic.tsv.
std::string_view synthetic_label_tsv();
LabelMap synthetic_label_map();

struct SynthConfig {
    // r > 0 scales the number of unlabeled "other" strokes to about r times the
    // count of the rarest labeled class; 0 keeps the natural mix.
    double imbalance = 0.0;
    // Probability that a stroke takes the color of a random other class.
    double style_noise = 0.15;
    bool outer_transform = true;
};

/// A floorplan-like SVG: each class lives in its own <g data-layer="name">,
/// all wrapped in a transformed outer group. Labels follow from the layer.
std::string synth_floorplan_svg(std::uint64_t seed, const SynthConfig& cfg = {});

/// Same geometry written in FloorplanCAD style: a flat layer plus a
/// semantic-id attribute (1-based FloorplanCAD class) on labeled elements.
std::string synth_floorplancad_svg(std::uint64_t seed, const SynthConfig& cfg = {});

/// Unlabeled soup of mixed primitives (lines, polylines, curves, arcs,
/// rectangles, ellipses) inside [0, extent]^2 with a few styles.
std::vector<NormalizedPath> random_paths(int count, std::uint64_t seed, double extent = 100.0);

}  // namespace vecseg
