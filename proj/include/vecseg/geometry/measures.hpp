#pragma once

#include <optional>
#include <vector>

#include "vecseg/geometry/segment.hpp"

namespace vecseg {

struct SampledPolyline {
    std::vector<Vec2> points;
    double spacing = 0.0;  // arc-length step L/(n-1)
    bool closed = false;
};

struct CurvatureProfile {
    std::vector<double> samples;   // signed curvature, 1/length
    std::vector<double> t_values;  // k*dt for k = 1..n
    int n_intervals = 0;
    double dt = 0.0;
};

/// n points equally spaced in arc length over the whole path (jumps between
/// subpaths are not counted). A zero-length path repeats its start point.
SampledPolyline sample_equal_arclength(const PathShape& shape, int n);
SampledPolyline sample_equal_arclength(const NormalizedPath& path, int n);

double path_length(const NormalizedPath& path);

/// Sum of |shoelace| areas of the dense rings, or nullopt for open paths.
std::optional<double> path_area(const PathShape& shape);
std::optional<double> path_area(const NormalizedPath& path);

/// Three-point finite-difference curvature:
/// 2*((x0-x1)(y2-y1) - (y0-y1)(x2-x1)) / |p0-p1|^3, zero when p0 == p1.
double three_point_curvature(Vec2 p0, Vec2 p1, Vec2 p2);

/// Curvature at t = dt, 2dt, ..., 1 with dt = 1/n, where p(t) is the point at
/// arc length t*L. Neighbours outside [0,1] are clamped to the ends.
CurvatureProfile curvature_profile(const PathShape& shape, int n);
CurvatureProfile curvature_profile(const NormalizedPath& path, int n);

/// Coordinate-wise median (mean of the two middle order statistics for even counts).
Vec2 median_point(const SampledPolyline& poly);

double min_pairwise_distance(const SampledPolyline& a, const SampledPolyline& b);

/// Crossings between the chord sequences of two samplings. Each chord pair is
/// tested with the parametric determinant test (non-parallel, parameter signs
/// agree with the determinant, parameter magnitudes bounded by it); hits closer
/// than max(spacing_a, spacing_b) are merged into one event.
int count_intersections(const SampledPolyline& a, const SampledPolyline& b);

/// Exact intersection test of two closed segments by the same determinant
/// conditions, optionally returning the intersection point.
bool segments_intersect(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, Vec2* where = nullptr);

/// Endpoints (first and last analytic points of every subpath) of a and b come
/// within tol of each other.
bool is_contiguous(const PathShape& a, const PathShape& b, double tol);
bool is_contiguous(const NormalizedPath& a, const NormalizedPath& b, double tol);

/// Even-odd point-in-polygon over a set of rings.
bool point_in_rings(Vec2 p, const std::vector<std::vector<Vec2>>& rings);

/// Every sample of `inner` lies inside the closed `outer` (false when outer is open).
bool contains(const PathShape& outer, const SampledPolyline& inner_samples);
bool contains(const NormalizedPath& outer, const NormalizedPath& inner, int samples = 64);

}  // namespace vecseg
