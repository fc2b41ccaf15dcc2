#include "vecseg/geometry/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vecseg/error.hpp"

namespace vecseg {

namespace {

constexpr double kGaussNodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                   0.9061798459386640};
constexpr double kGaussWeights[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                     0.2369268850561891, 0.2369268850561891};

template <typename F>
double gauss5(const F& f, double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
    return sum * half;
}

template <typename F>
double adaptive_gauss(const F& f, double a, double b, double whole, double abs_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss5(f, a, m), right = gauss5(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= abs_tol) return left + right;
    return adaptive_gauss(f, a, m, left, 0.5 * abs_tol, depth - 1) +
           adaptive_gauss(f, m, b, right, 0.5 * abs_tol, depth - 1);
}

double vector_angle(Vec2 u, Vec2 v) { return std::atan2(cross(u, v), dot(u, v)); }

}  // namespace

Segment Segment::line(Vec2 a, Vec2 b) {
    Segment s;
    s.kind_ = Kind::Line;
    s.p_[0] = a;
    s.p_[1] = b;
    return s;
}

Segment Segment::quadratic(Vec2 a, Vec2 c, Vec2 b) {
    Segment s;
    s.kind_ = Kind::Quadratic;
    s.p_[0] = a;
    s.p_[1] = c;
    s.p_[2] = b;
    return s;
}

Segment Segment::cubic(Vec2 a, Vec2 c1, Vec2 c2, Vec2 b) {
    Segment s;
    s.kind_ = Kind::Cubic;
    s.p_[0] = a;
    s.p_[1] = c1;
    s.p_[2] = c2;
    s.p_[3] = b;
    return s;
}

Segment Segment::arc(Vec2 from, double rx, double ry, double rotation_deg, bool large_arc, bool sweep, Vec2 to) {
    rx = std::abs(rx);
    ry = std::abs(ry);
    if (from == to || rx == 0.0 || ry == 0.0) return line(from, to);

    const double phi = rotation_deg * std::numbers::pi / 180.0;
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double hx = 0.5 * (from.x - to.x), hy = 0.5 * (from.y - to.y);
    const double x1 = cphi * hx + sphi * hy;
    const double y1 = -sphi * hx + cphi * hy;

    const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
    double coef = 0.0;  // radii too small: half ellipse centred on the chord
    if (lambda > 1.0) {
        const double k = std::sqrt(lambda);
        rx *= k;
        ry *= k;
    } else {
        const double rx2 = rx * rx, ry2 = ry * ry;
        const double num = rx2 * ry2 - rx2 * y1 * y1 - ry2 * x1 * x1;
        const double den = rx2 * y1 * y1 + ry2 * x1 * x1;
        coef = std::sqrt(std::max(0.0, num / den));
    }
    if (large_arc == sweep) coef = -coef;
    const double cxp = coef * rx * y1 / ry;
    const double cyp = -coef * ry * x1 / rx;

    Segment s;
    s.kind_ = Kind::Arc;
    s.p_[0] = from;
    s.p_[1] = to;
    s.center_ = {cphi * cxp - sphi * cyp + 0.5 * (from.x + to.x), sphi * cxp + cphi * cyp + 0.5 * (from.y + to.y)};
    s.rx_ = rx;
    s.ry_ = ry;
    s.cos_phi_ = cphi;
    s.sin_phi_ = sphi;
    const Vec2 u{(x1 - cxp) / rx, (y1 - cyp) / ry};
    const Vec2 v{(-x1 - cxp) / rx, (-y1 - cyp) / ry};
    s.theta0_ = vector_angle({1.0, 0.0}, u);
    double dtheta = vector_angle(u, v);
    if (!sweep && dtheta > 0) dtheta -= 2 * std::numbers::pi;
    if (sweep && dtheta < 0) dtheta += 2 * std::numbers::pi;
    s.dtheta_ = dtheta;
    return s;
}

Vec2 Segment::eval(double t) const {
    switch (kind_) {
        case Kind::Line: return lerp(p_[0], p_[1], t);
        case Kind::Quadratic: {
            Vec2 a = lerp(p_[0], p_[1], t), b = lerp(p_[1], p_[2], t);
            return lerp(a, b, t);
        }
        case Kind::Cubic: {
            Vec2 a = lerp(p_[0], p_[1], t), b = lerp(p_[1], p_[2], t), c = lerp(p_[2], p_[3], t);
            Vec2 d = lerp(a, b, t), e = lerp(b, c, t);
            return lerp(d, e, t);
        }
        case Kind::Arc: {
            if (t <= 0.0) return p_[0];
            if (t >= 1.0) return p_[1];
            const double th = theta0_ + t * dtheta_;
            const double ct = std::cos(th), st = std::sin(th);
            return {center_.x + rx_ * cos_phi_ * ct - ry_ * sin_phi_ * st,
                    center_.y + rx_ * sin_phi_ * ct + ry_ * cos_phi_ * st};
        }
    }
    return {};
}

Vec2 Segment::derivative(double t) const {
    switch (kind_) {
        case Kind::Line: return p_[1] - p_[0];
        case Kind::Quadratic: return 2.0 * lerp(p_[1] - p_[0], p_[2] - p_[1], t);
        case Kind::Cubic: {
            Vec2 a = p_[1] - p_[0], b = p_[2] - p_[1], c = p_[3] - p_[2];
            return 3.0 * lerp(lerp(a, b, t), lerp(b, c, t), t);
        }
        case Kind::Arc: {
            const double th = theta0_ + t * dtheta_;
            const double ct = std::cos(th), st = std::sin(th);
            return {dtheta_ * (-rx_ * cos_phi_ * st - ry_ * sin_phi_ * ct),
                    dtheta_ * (-rx_ * sin_phi_ * st + ry_ * cos_phi_ * ct)};
        }
    }
    return {};
}

double Segment::length(double t0, double t1, double rel_tol) const {
    if (t1 <= t0) return 0.0;
    if (kind_ == Kind::Line) return distance(p_[0], p_[1]) * (t1 - t0);
    auto speed = [this](double t) { return norm(derivative(t)); };
    const double whole = gauss5(speed, t0, t1);
    const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
    return adaptive_gauss(speed, t0, t1, whole, tol, 30);
}

double Segment::param_at_length(double s, double total) const {
    if (total <= 0.0 || s <= 0.0) return 0.0;
    if (s >= total) return 1.0;
    if (kind_ == Kind::Line) return s / total;
    double lo = 0.0, hi = 1.0, t = s / total;
    for (int iter = 0; iter < 60; ++iter) {
        const double f = length(0.0, t) - s;
        if (std::abs(f) <= 1e-13 * total) break;
        if (f > 0) hi = t; else lo = t;
        const double sp = norm(derivative(t));
        double next = sp > 0 ? t - f / sp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

PathShape::PathShape(const std::vector<PathCommand>& commands) {
    Subpath current;
    bool open = false;
    Vec2 pen{};
    auto flush = [&] {
        if (open && (!current.segments.empty() || current.closed)) subpaths_.push_back(std::move(current));
        current = Subpath{};
        open = false;
    };
    Vec2 first_point{};
    bool have_point = false;

    for (const PathCommand& cmd : commands) {
        switch (cmd.kind()) {
            case CommandKind::M:
                flush();
                pen = cmd.end_point();
                current.start = current.end = pen;
                open = true;
                if (!have_point) { first_point = pen; have_point = true; }
                break;
            case CommandKind::L:
                current.segments.push_back(Segment::line(pen, cmd.end_point()));
                break;
            case CommandKind::C:
                current.segments.push_back(Segment::cubic(pen, {cmd[0], cmd[1]}, {cmd[2], cmd[3]}, cmd.end_point()));
                break;
            case CommandKind::Q:
                current.segments.push_back(Segment::quadratic(pen, {cmd[0], cmd[1]}, cmd.end_point()));
                break;
            case CommandKind::A:
                current.segments.push_back(
                    Segment::arc(pen, cmd[0], cmd[1], cmd[2], cmd[3] != 0.0, cmd[4] != 0.0, cmd.end_point()));
                break;
            case CommandKind::Z:
                if (!open) break;
                if (!(pen == current.start)) current.segments.push_back(Segment::line(pen, current.start));
                pen = current.start;
                current.end = pen;
                current.closed = true;
                flush();
                continue;
            default:
                throw Error(ErrorKind::InvalidArgument,
                            std::string("geometry expects canonical commands, got ") + command_letter(cmd.kind()));
        }
        if (cmd.kind() != CommandKind::M) {
            pen = cmd.end_point();
            current.end = pen;
        }
    }
    flush();
    if (subpaths_.empty() && have_point) {
        Subpath point;
        point.start = point.end = first_point;
        subpaths_.push_back(point);
    }

    for (const Subpath& sp : subpaths_) {
        std::vector<double> lengths;
        lengths.reserve(sp.segments.size());
        for (const Segment& seg : sp.segments) {
            lengths.push_back(seg.length());
            total_length_ += lengths.back();
        }
        seg_lengths_.push_back(std::move(lengths));
    }
}

bool PathShape::closed() const {
    if (subpaths_.empty()) return false;
    double extent = 0.0;
    for (const auto& ring : dense_rings(8))
        for (const Vec2& p : ring) extent = std::max({extent, std::abs(p.x - ring[0].x), std::abs(p.y - ring[0].y)});
    for (const Subpath& sp : subpaths_) {
        if (sp.segments.empty()) return false;
        if (!sp.closed && distance(sp.start, sp.end) > 1e-9 * extent) return false;
    }
    return true;
}

Vec2 PathShape::point_at_length(double s) const {
    if (subpaths_.empty()) return {};
    double remaining = std::clamp(s, 0.0, total_length_);
    const Segment* last = nullptr;
    for (std::size_t i = 0; i < subpaths_.size(); ++i) {
        const auto& segs = subpaths_[i].segments;
        for (std::size_t j = 0; j < segs.size(); ++j) {
            const double len = seg_lengths_[i][j];
            if (len <= 0.0) continue;
            last = &segs[j];
            if (remaining <= len) return segs[j].eval(segs[j].param_at_length(remaining, len));
            remaining -= len;
        }
    }
    return last ? last->end() : subpaths_.front().start;
}

std::vector<std::vector<Vec2>> PathShape::dense_rings(int curve_pieces) const {
    std::vector<std::vector<Vec2>> rings;
    rings.reserve(subpaths_.size());
    for (const Subpath& sp : subpaths_) {
        std::vector<Vec2> ring{sp.start};
        for (const Segment& seg : sp.segments) {
            if (seg.kind() == Segment::Kind::Line) {
                ring.push_back(seg.end());
            } else {
                for (int k = 1; k <= curve_pieces; ++k) ring.push_back(seg.eval(static_cast<double>(k) / curve_pieces));
            }
        }
        rings.push_back(std::move(ring));
    }
    return rings;
}

}  // namespace vecseg
