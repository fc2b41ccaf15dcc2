#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "vecseg/error.hpp"
#include "vecseg/geometry/measures.hpp"
#include "vecseg/svg/path.hpp"

namespace vecseg {

/// Axis-aligned drawing bounds. Features are computed in normalized
/// coordinates: origin at (min_x, min_y) and the longest side scaled to 1.
struct DrawingBounds {
    double min_x = 0.0, min_y = 0.0, width = 1.0, height = 1.0;

    double scale() const { return std::max(width, height); }
    AffineTransform2D normalizer() const;
    /// Per-axis mapping onto [0,1]^2 (used for median points).
    Vec2 unit_square(Vec2 p) const { return {(p.x - min_x) / width, (p.y - min_y) / height}; }
};

/// Bounds of the dense samplings of all paths. Zero-extent axes are widened to
/// the other axis (or to 1 when both vanish) around the same center.
DrawingBounds drawing_bounds(const std::vector<NormalizedPath>& paths);

inline constexpr int kTensorColumns = 8;
inline constexpr double kTensorPad = -1.0;

/// Row-major n_max x 8 tensor: [kind index, 7 parameter slots], pad -1.
struct CommandTensor {
    int n_max = 0;
    std::vector<double> values;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * kTensorColumns + col]; }
};

/// Encodes the first min(count, n_max) commands; unused parameter slots and
/// pad rows are -1. Coordinates are taken as given (callers normalize first).
CommandTensor tokenize_path(const NormalizedPath& path, int n_max);

struct FeatureConfig {
    int n_max = 32;
    int median_samples = 64;       // node-feature polyline
    int pairwise_samples = 64;     // intersections / distances / containment
    int curvature_intervals = 16;
    double contiguity_tol = 1e-3;  // fraction of the normalized bbox diagonal
};

inline constexpr int kNodeScalarFeatures = 15;

struct NodeFeatureVector {
    double has_fill = 0;
    std::array<double, 3> stroke_rgb{};
    double stroke_width = 0;
    double is_closed = 0;
    double log_area = 0;
    double log_length = 0;
    double command_count = 0;
    std::array<double, 4> curvature_stats{};  // mean, min, max, mean |k|
    std::array<double, 2> median_xy{};
    CommandTensor tensor;

    std::vector<double> flatten() const;
    static int dimension(int n_max) { return kNodeScalarFeatures + kTensorColumns * n_max; }
};

/// Node feature names in flattened order (tensor entries as "tensor[r][c]").
std::vector<std::string> node_feature_names(int n_max);

NodeFeatureVector node_features(const NormalizedPath& path, const DrawingBounds& bounds, const FeatureConfig& cfg);

inline constexpr int kEdgeFeatureCount = 10;

enum class EdgeFeature {
    SameLength = 0,
    FromKnn,
    LogLengthRatio,
    InvLengthRatio,
    ThetaNorm,
    LogMinDist,
    Containment,
    IntersectionCount,
    SameStyle,
    Contiguous,
};

inline constexpr std::array<std::string_view, kEdgeFeatureCount> kEdgeFeatureNames = {
    "same_length", "from_knn",     "log_length_ratio",   "inv_length_ratio", "theta_norm",
    "log_min_dist", "containment", "intersection_count", "same_style",       "contiguous"};

struct EdgeFeatureVector {
    std::array<double, kEdgeFeatureCount> values{};

    double operator[](EdgeFeature f) const { return values[static_cast<int>(f)]; }
    double& operator[](EdgeFeature f) { return values[static_cast<int>(f)]; }
};

/// Per-path data reused by every edge touching the path; all quantities are in
/// normalized drawing coordinates.
struct PreparedPath {
    NormalizedPath normalized;
    PathShape shape;
    SampledPolyline samples;  // pairwise_samples points
    std::vector<std::vector<Vec2>> rings;
    bool closed = false;
    double length = 0.0;
    Vec2 median;              // uniform-normalized coordinates
    StyleAttributes style;
};

PreparedPath prepare_path(const NormalizedPath& path, const DrawingBounds& bounds, const FeatureConfig& cfg);

/// Angle of the median-point difference (a - b), full quadrant, in turns [0,1).
double theta_norm(Vec2 median_a, Vec2 median_b);

/// Ten-component descriptor for a (lower id) and b. contiguity_tol is absolute
/// in normalized coordinates.
EdgeFeatureVector edge_features(const PreparedPath& a, const PreparedPath& b, bool from_knn, double contiguity_tol,
                                Diagnostics* diag = nullptr);

}  // namespace vecseg
