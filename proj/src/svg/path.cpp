#include "vecseg/svg/path.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "vecseg/error.hpp"

namespace vecseg {

char command_letter(CommandKind kind) {
    static constexpr char letters[] = {'M', 'L', 'H', 'V', 'C', 'S', 'Q', 'T', 'A', 'Z'};
    return letters[static_cast<int>(kind)];
}

PathCommand::PathCommand(CommandKind kind, std::span<const double> params) : kind_(kind) {
    if (params.size() != static_cast<std::size_t>(arity(kind))) {
        throw Error(ErrorKind::BadPathData, std::string("command ") + command_letter(kind) + " expects " +
                                                std::to_string(arity(kind)) + " parameters, got " +
                                                std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) params_[i] = params[i];
}

Vec2 PathCommand::end_point() const {
    switch (kind_) {
        case CommandKind::M:
        case CommandKind::L:
        case CommandKind::T: return {params_[0], params_[1]};
        case CommandKind::C: return {params_[4], params_[5]};
        case CommandKind::S:
        case CommandKind::Q: return {params_[2], params_[3]};
        case CommandKind::A: return {params_[5], params_[6]};
        default: return {};
    }
}

namespace {

constexpr double kDegrees = 180.0 / std::numbers::pi;

PathCommand transform_arc(Vec2 from, const PathCommand& arc, const AffineTransform2D& t) {
    double rx = std::abs(arc[0]), ry = std::abs(arc[1]);
    const double phi = arc[2] / kDegrees;
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    // Out-of-range radii mean a half ellipse on the chord. The image has
    // lambda == 1 exactly, which the centre solve cannot resolve in floating
    // point, so shrink slightly and let the evaluator scale back up.
    const Vec2 half = 0.5 * (from - arc.end_point());
    const double x1 = cphi * half.x + sphi * half.y, y1 = -sphi * half.x + cphi * half.y;
    if (rx > 0.0 && ry > 0.0 && (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry) >= 1.0) {
        rx *= 1.0 - 1e-6;
        ry *= 1.0 - 1e-6;
    }
    // M = L * R(phi) * diag(rx, ry)
    const double m00 = (t.a * cphi + t.c * sphi) * rx;
    const double m01 = (-t.a * sphi + t.c * cphi) * ry;
    const double m10 = (t.b * cphi + t.d * sphi) * rx;
    const double m11 = (-t.b * sphi + t.d * cphi) * ry;

    // Closed-form 2x2 SVD: M = R(beta) diag(s1, s2) R(gamma).
    const double e = 0.5 * (m00 + m11), f = 0.5 * (m00 - m11);
    const double g = 0.5 * (m10 + m01), h = 0.5 * (m10 - m01);
    const double q = std::hypot(e, h), r = std::hypot(f, g);
    const double s1 = q + r;
    const double s2 = std::abs(q - r);
    const double beta = 0.5 * (std::atan2(h, e) + std::atan2(g, f));

    const Vec2 end = t.apply(arc.end_point());
    if (!(s1 > 0.0) || s2 <= 1e-12 * s1) return PathCommand::line_to(end);

    const bool large = arc[3] != 0.0;
    bool sweep = arc[4] != 0.0;
    if (t.determinant() < 0.0) sweep = !sweep;
    return PathCommand::arc_to(s1, s2, beta * kDegrees, large, sweep, end);
}

void append_number(std::string& out, double v) {
    if (v == 0.0) v = 0.0;  // drop negative zero
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

std::vector<PathCommand> transform_commands(const std::vector<PathCommand>& commands,
                                            const AffineTransform2D& t) {
    std::vector<PathCommand> out;
    out.reserve(commands.size());
    Vec2 current{}, subpath_start{};
    for (const PathCommand& cmd : commands) {
        switch (cmd.kind()) {
            case CommandKind::M: out.push_back(PathCommand::move_to(t.apply(cmd.end_point()))); break;
            case CommandKind::L: out.push_back(PathCommand::line_to(t.apply(cmd.end_point()))); break;
            case CommandKind::C:
                out.push_back(PathCommand::cubic_to(t.apply({cmd[0], cmd[1]}), t.apply({cmd[2], cmd[3]}),
                                                    t.apply({cmd[4], cmd[5]})));
                break;
            case CommandKind::Q:
                out.push_back(PathCommand::quad_to(t.apply({cmd[0], cmd[1]}), t.apply({cmd[2], cmd[3]})));
                break;
            case CommandKind::A: out.push_back(transform_arc(current, cmd, t)); break;
            case CommandKind::Z: out.push_back(cmd); break;
            default:
                throw Error(ErrorKind::InvalidArgument,
                            std::string("transform_commands expects canonical commands, got ") +
                                command_letter(cmd.kind()));
        }
        if (cmd.kind() == CommandKind::M) subpath_start = cmd.end_point();
        current = cmd.kind() == CommandKind::Z ? subpath_start : cmd.end_point();
    }
    return out;
}

std::string to_path_data(const std::vector<PathCommand>& commands) {
    std::string out;
    for (const PathCommand& cmd : commands) {
        if (!out.empty()) out += ' ';
        out += command_letter(cmd.kind());
        for (double v : cmd.params()) {
            out += ' ';
            append_number(out, v);
        }
    }
    return out;
}

}  // namespace vecseg
