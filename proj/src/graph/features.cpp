#include "vecseg/graph/features.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace vecseg {

AffineTransform2D DrawingBounds::normalizer() const {
    const double s = scale();
    return {1.0 / s, 0.0, 0.0, 1.0 / s, -min_x / s, -min_y / s};
}

DrawingBounds drawing_bounds(const std::vector<NormalizedPath>& paths) {
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    for (const NormalizedPath& p : paths) {
        for (const auto& ring : PathShape(p).dense_rings(64)) {
            for (const Vec2& q : ring) {
                lo_x = std::min(lo_x, q.x);
                lo_y = std::min(lo_y, q.y);
                hi_x = std::max(hi_x, q.x);
                hi_y = std::max(hi_y, q.y);
            }
        }
    }
    if (!(lo_x <= hi_x)) return {};
    DrawingBounds b{lo_x, lo_y, hi_x - lo_x, hi_y - lo_y};
    if (b.width <= 0.0 && b.height <= 0.0) {
        b = {lo_x - 0.5, lo_y - 0.5, 1.0, 1.0};
    } else if (b.width <= 0.0) {
        b.min_x -= 0.5 * b.height;
        b.width = b.height;
    } else if (b.height <= 0.0) {
        b.min_y -= 0.5 * b.width;
        b.height = b.width;
    }
    return b;
}

CommandTensor tokenize_path(const NormalizedPath& path, int n_max) {
    CommandTensor t;
    t.n_max = n_max;
    t.values.assign(static_cast<std::size_t>(n_max) * kTensorColumns, kTensorPad);
    const std::size_t rows = std::min(path.commands.size(), static_cast<std::size_t>(n_max));
    for (std::size_t r = 0; r < rows; ++r) {
        const PathCommand& cmd = path.commands[r];
        double* row = t.values.data() + r * kTensorColumns;
        row[0] = static_cast<double>(static_cast<int>(cmd.kind()));
        const auto params = cmd.params();
        for (std::size_t i = 0; i < params.size(); ++i) row[1 + i] = params[i];
    }
    return t;
}

std::vector<double> NodeFeatureVector::flatten() const {
    std::vector<double> out;
    out.reserve(kNodeScalarFeatures + tensor.values.size());
    out.push_back(has_fill);
    out.insert(out.end(), stroke_rgb.begin(), stroke_rgb.end());
    out.push_back(stroke_width);
    out.push_back(is_closed);
    out.push_back(log_area);
    out.push_back(log_length);
    out.push_back(command_count);
    out.insert(out.end(), curvature_stats.begin(), curvature_stats.end());
    out.insert(out.end(), median_xy.begin(), median_xy.end());
    out.insert(out.end(), tensor.values.begin(), tensor.values.end());
    return out;
}

std::vector<std::string> node_feature_names(int n_max) {
    std::vector<std::string> names = {"has_fill",      "stroke_r",       "stroke_g",       "stroke_b",
                                      "stroke_width",  "is_closed",      "log_area",       "log_length",
                                      "command_count", "curvature_mean", "curvature_min",  "curvature_max",
                                      "curvature_mean_abs", "median_x",     "median_y"};
    for (int r = 0; r < n_max; ++r)
        for (int c = 0; c < kTensorColumns; ++c) names.push_back(fmt::format("tensor[{}][{}]", r, c));
    return names;
}

NodeFeatureVector node_features(const NormalizedPath& path, const DrawingBounds& bounds, const FeatureConfig& cfg) {
    NormalizedPath normalized = path;
    normalized.commands = transform_commands(path.commands, bounds.normalizer());
    const PathShape shape(normalized);

    NodeFeatureVector f;
    f.has_fill = path.style.has_fill ? 1.0 : 0.0;
    f.stroke_rgb = path.style.stroke_rgb;
    f.stroke_width = path.style.stroke_width;

    const auto area = path_area(shape);
    f.is_closed = area ? 1.0 : 0.0;
    f.log_area = area ? std::log1p(*area) : 0.0;
    f.log_length = shape.empty() ? 0.0 : std::log1p(shape.length());
    f.command_count = static_cast<double>(path.commands.size());

    if (!shape.empty()) {
        const CurvatureProfile prof = curvature_profile(shape, cfg.curvature_intervals);
        double sum = 0.0, abs_sum = 0.0;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double k : prof.samples) {
            sum += k;
            abs_sum += std::abs(k);
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
        const double n = static_cast<double>(prof.samples.size());
        f.curvature_stats = {sum / n, lo, hi, abs_sum / n};

        const Vec2 m = median_point(sample_equal_arclength(shape, cfg.median_samples));
        const double s = bounds.scale();
        f.median_xy = {m.x * s / bounds.width, m.y * s / bounds.height};
    }
    f.tensor = tokenize_path(normalized, cfg.n_max);
    return f;
}

PreparedPath prepare_path(const NormalizedPath& path, const DrawingBounds& bounds, const FeatureConfig& cfg) {
    NormalizedPath normalized = path;
    normalized.commands = transform_commands(path.commands, bounds.normalizer());
    PathShape shape(normalized);
    PreparedPath p{std::move(normalized), shape, {}, {}, false, 0.0, {}, path.style};
    if (!shape.empty()) {
        p.samples = sample_equal_arclength(shape, cfg.pairwise_samples);
        p.length = shape.length();
        p.median = median_point(sample_equal_arclength(shape, cfg.median_samples));
        p.closed = shape.closed();
        if (p.closed) p.rings = shape.dense_rings();
    }
    return p;
}

double theta_norm(Vec2 median_a, Vec2 median_b) {
    const double dx = median_a.x - median_b.x, dy = median_a.y - median_b.y;
    double degrees = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    degrees = std::fmod(degrees, 360.0);
    if (degrees < 0.0) degrees += 360.0;
    const double turns = degrees / 360.0;
    return turns >= 1.0 ? 0.0 : turns;
}

namespace {

bool samples_inside(const PreparedPath& outer, const SampledPolyline& inner) {
    if (!outer.closed || inner.points.empty()) return false;
    for (const Vec2& q : inner.points)
        if (!point_in_rings(q, outer.rings)) return false;
    return true;
}

}  // namespace

EdgeFeatureVector edge_features(const PreparedPath& a, const PreparedPath& b, bool from_knn, double contiguity_tol,
                                Diagnostics* diag) {
    EdgeFeatureVector e;
    double la = a.length, lb = b.length;
    e[EdgeFeature::SameLength] = std::abs(la - lb) <= 1e-6 * std::max(la, lb) ? 1.0 : 0.0;
    e[EdgeFeature::FromKnn] = from_knn ? 1.0 : 0.0;
    constexpr double kEps = 1e-9;
    if (lb <= 0.0 || la <= 0.0) {
        warn(diag, fmt::format("zero-length path in edge ({}, {}); using length {}", a.normalized.path_id,
                               b.normalized.path_id, kEps));
        if (lb <= 0.0) lb = kEps;
        if (la <= 0.0) la = kEps;
    }
    e[EdgeFeature::LogLengthRatio] = std::log(la / lb);
    e[EdgeFeature::InvLengthRatio] = lb / la;
    e[EdgeFeature::ThetaNorm] = theta_norm(a.median, b.median);
    if (!a.samples.points.empty() && !b.samples.points.empty()) {
        e[EdgeFeature::LogMinDist] = std::log1p(min_pairwise_distance(a.samples, b.samples));
        e[EdgeFeature::IntersectionCount] = count_intersections(a.samples, b.samples);
    }
    e[EdgeFeature::Containment] = (samples_inside(a, b.samples) || samples_inside(b, a.samples)) ? 1.0 : 0.0;
    e[EdgeFeature::SameStyle] = a.style == b.style ? 1.0 : 0.0;
    e[EdgeFeature::Contiguous] = (!a.shape.empty() && !b.shape.empty() && is_contiguous(a.shape, b.shape, contiguity_tol)) ? 1.0 : 0.0;
    return e;
}

}  // namespace vecseg
