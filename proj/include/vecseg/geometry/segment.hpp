#pragma once

#include <vector>

#include "vecseg/geometry/vec2.hpp"
#include "vecseg/svg/path.hpp"

namespace vecseg {

/// One drawable piece of a path, parameterized on t in [0,1].
/// Quadratic and cubic Béziers are evaluated with De Casteljau; arcs use the
/// SVG center parameterization (with out-of-range radii scaled up).
class Segment {
public:
    enum class Kind { Line, Quadratic, Cubic, Arc };

    static Segment line(Vec2 a, Vec2 b);
    static Segment quadratic(Vec2 a, Vec2 c, Vec2 b);
    static Segment cubic(Vec2 a, Vec2 c1, Vec2 c2, Vec2 b);
    /// Endpoint-parameterized arc; degenerate arcs collapse to lines.
    static Segment arc(Vec2 from, double rx, double ry, double rotation_deg, bool large_arc, bool sweep, Vec2 to);

    Kind kind() const { return kind_; }
    Vec2 start() const { return eval(0.0); }
    Vec2 end() const { return eval(1.0); }
    Vec2 eval(double t) const;
    Vec2 derivative(double t) const;

    /// Arc length of [t0, t1] via adaptive Gauss-Legendre; lines are exact.
    double length(double t0 = 0.0, double t1 = 1.0, double rel_tol = 1e-10) const;

    /// Parameter t where the arc length from 0 reaches s (0 <= s <= total).
    double param_at_length(double s, double total) const;

private:
    Kind kind_ = Kind::Line;
    Vec2 p_[4]{};
    // Arc center parameterization.
    Vec2 center_{};
    double rx_ = 0, ry_ = 0, cos_phi_ = 1, sin_phi_ = 0, theta0_ = 0, dtheta_ = 0;
};

struct Subpath {
    std::vector<Segment> segments;
    Vec2 start;
    Vec2 end;
    bool closed = false;
};

/// Geometry view of a canonical command list: subpaths of segments with cached
/// lengths. A Z adds the closing line segment.
class PathShape {
public:
    explicit PathShape(const std::vector<PathCommand>& commands);
    explicit PathShape(const NormalizedPath& path) : PathShape(path.commands) {}

    const std::vector<Subpath>& subpaths() const { return subpaths_; }
    double length() const { return total_length_; }
    /// Every subpath closed (explicit Z or coincident end/start).
    bool closed() const;
    bool empty() const { return subpaths_.empty(); }

    Vec2 start() const { return subpaths_.front().start; }
    Vec2 end() const { return subpaths_.back().end; }

    /// Point at arc length s measured over all subpaths, jumps excluded.
    Vec2 point_at_length(double s) const;

    /// One ring per subpath: lines contribute exact vertices, curves are
    /// subdivided uniformly in parameter (curve_pieces per segment).
    std::vector<std::vector<Vec2>> dense_rings(int curve_pieces = 256) const;

private:
    std::vector<Subpath> subpaths_;
    std::vector<std::vector<double>> seg_lengths_;
    double total_length_ = 0.0;
};

}  // namespace vecseg
