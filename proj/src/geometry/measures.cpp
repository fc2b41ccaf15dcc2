#include "vecseg/geometry/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vecseg {

SampledPolyline sample_equal_arclength(const PathShape& shape, int n) {
    SampledPolyline out;
    out.closed = shape.closed();
    if (shape.empty() || n < 1) return out;
    const double total = shape.length();
    out.points.reserve(static_cast<std::size_t>(n));
    if (!(total > 0.0) || n == 1) {
        out.points.assign(static_cast<std::size_t>(n), shape.start());
        return out;
    }
    out.spacing = total / (n - 1);

    // Single forward walk over the segments.
    int k = 0;
    double walked = 0.0;
    for (const Subpath& sp : shape.subpaths()) {
        for (const Segment& seg : sp.segments) {
            const double len = seg.length();
            if (len <= 0.0) continue;
            while (k < n - 1) {
                const double target = k * out.spacing;
                if (target > walked + len) break;
                out.points.push_back(seg.eval(seg.param_at_length(target - walked, len)));
                ++k;
            }
            walked += len;
        }
    }
    while (static_cast<int>(out.points.size()) < n) out.points.push_back(shape.end());
    return out;
}

SampledPolyline sample_equal_arclength(const NormalizedPath& path, int n) {
    return sample_equal_arclength(PathShape(path), n);
}

double path_length(const NormalizedPath& path) { return PathShape(path).length(); }

std::optional<double> path_area(const PathShape& shape) {
    if (!shape.closed()) return std::nullopt;
    double total = 0.0;
    for (const auto& ring : shape.dense_rings()) {
        double twice = 0.0;
        for (std::size_t i = 0; i < ring.size(); ++i) twice += cross(ring[i], ring[(i + 1) % ring.size()]);
        total += 0.5 * std::abs(twice);
    }
    return total;
}

std::optional<double> path_area(const NormalizedPath& path) { return path_area(PathShape(path)); }

double three_point_curvature(Vec2 p0, Vec2 p1, Vec2 p2) {
    const double dx0 = p0.x - p1.x, dy0 = p0.y - p1.y;
    const double d2 = dx0 * dx0 + dy0 * dy0;
    if (d2 == 0.0) return 0.0;
    const double dx2 = p2.x - p1.x, dy2 = p2.y - p1.y;
    const double cross = dx0 * dy2 - dy0 * dx2;
    // Points sampled off a straight segment carry rounding of order
    // eps*|coordinate|; a cross product within that noise is collinear.
    const double mag = std::max({std::abs(p0.x), std::abs(p0.y), std::abs(p1.x), std::abs(p1.y), std::abs(p2.x),
                                 std::abs(p2.y)});
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * mag * (std::sqrt(d2) + std::hypot(dx2, dy2));
    if (std::abs(cross) <= noise) return 0.0;
    return 2.0 * cross / std::sqrt(d2 * d2 * d2);
}

CurvatureProfile curvature_profile(const PathShape& shape, int n) {
    CurvatureProfile prof;
    prof.n_intervals = std::max(n, 1);
    prof.dt = 1.0 / prof.n_intervals;
    const double total = shape.empty() ? 0.0 : shape.length();
    auto at = [&](double t) { return shape.point_at_length(std::clamp(t, 0.0, 1.0) * total); };
    for (int k = 1; k <= prof.n_intervals; ++k) {
        const double t = k * prof.dt;
        prof.t_values.push_back(t);
        prof.samples.push_back(total > 0.0 ? three_point_curvature(at(t - prof.dt), at(t), at(t + prof.dt)) : 0.0);
    }
    return prof;
}

CurvatureProfile curvature_profile(const NormalizedPath& path, int n) {
    return curvature_profile(PathShape(path), n);
}

Vec2 median_point(const SampledPolyline& poly) {
    const std::size_t n = poly.points.size();
    if (n == 0) return {};
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = poly.points[i].x;
        ys[i] = poly.points[i].y;
    }
    auto median = [n](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    return {median(xs), median(ys)};
}

double min_pairwise_distance(const SampledPolyline& a, const SampledPolyline& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& p : a.points)
        for (const Vec2& q : b.points) {
            const Vec2 d = p - q;
            best = std::min(best, d.x * d.x + d.y * d.y);
        }
    return std::sqrt(best);
}

bool segments_intersect(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, Vec2* where) {
    const Vec2 d1 = q1 - p1, d2 = q2 - p2, r = p2 - p1;
    const double det = cross(d1, d2);
    if (det == 0.0) return false;                      // parallel
    const double t_num = cross(r, d2), u_num = cross(r, d1);
    if (t_num * det < 0.0 || u_num * det < 0.0) return false;  // signs agree with det
    if (std::abs(t_num) > std::abs(det) || std::abs(u_num) > std::abs(det)) return false;  // within [0,1]
    if (where) *where = p1 + d1 * (t_num / det);
    return true;
}

namespace {

bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

int count_intersections(const SampledPolyline& a, const SampledPolyline& b) {
    if (a.points.size() < 2 || b.points.size() < 2) return 0;
    std::vector<Vec2> hits;
    for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
        Vec2 a0 = a.points[i], a1 = a.points[i + 1];
        if (lex_less(a1, a0)) std::swap(a0, a1);
        for (std::size_t j = 0; j + 1 < b.points.size(); ++j) {
            Vec2 b0 = b.points[j], b1 = b.points[j + 1];
            if (lex_less(b1, b0)) std::swap(b0, b1);
            // Canonical chord order keeps the computed point independent of argument order.
            const bool a_first = lex_less(a0, b0) || (a0 == b0 && lex_less(a1, b1));
            Vec2 hit;
            const bool found = a_first ? segments_intersect(a0, a1, b0, b1, &hit) : segments_intersect(b0, b1, a0, a1, &hit);
            if (found) hits.push_back(hit);
        }
    }
    if (hits.empty()) return 0;
    const double radius = std::max(a.spacing, b.spacing);
    DisjointSet clusters(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t j = i + 1; j < hits.size(); ++j)
            if (distance(hits[i], hits[j]) <= radius) clusters.unite(static_cast<int>(i), static_cast<int>(j));
    int events = 0;
    for (std::size_t i = 0; i < hits.size(); ++i)
        if (clusters.find(static_cast<int>(i)) == static_cast<int>(i)) ++events;
    return events;
}

bool is_contiguous(const PathShape& a, const PathShape& b, double tol) {
    for (const Subpath& sa : a.subpaths())
        for (Vec2 pa : {sa.start, sa.end})
            for (const Subpath& sb : b.subpaths())
                for (Vec2 pb : {sb.start, sb.end})
                    if (distance(pa, pb) <= tol) return true;
    return false;
}

bool is_contiguous(const NormalizedPath& a, const NormalizedPath& b, double tol) {
    return is_contiguous(PathShape(a), PathShape(b), tol);
}

bool point_in_rings(Vec2 p, const std::vector<std::vector<Vec2>>& rings) {
    bool inside = false;
    for (const auto& ring : rings) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2 a = ring[i], b = ring[j];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < x_cross) inside = !inside;
            }
        }
    }
    return inside;
}

bool contains(const PathShape& outer, const SampledPolyline& inner_samples) {
    if (!outer.closed() || inner_samples.points.empty()) return false;
    const auto rings = outer.dense_rings();
    for (const Vec2& p : inner_samples.points)
        if (!point_in_rings(p, rings)) return false;
    return true;
}

bool contains(const NormalizedPath& outer, const NormalizedPath& inner, int samples) {
    return contains(PathShape(outer), sample_equal_arclength(inner, samples));
}

}  // namespace vecseg
