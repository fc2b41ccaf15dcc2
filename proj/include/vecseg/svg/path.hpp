#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecseg/geometry/affine.hpp"

namespace vecseg {

/// Path command kinds; the numeric value is the command index used in the
/// command tensor.
enum class CommandKind : std::uint8_t { M = 0, L, H, V, C, S, Q, T, A, Z };

constexpr int arity(CommandKind kind) {
    switch (kind) {
        case CommandKind::M:
        case CommandKind::L:
        case CommandKind::T: return 2;
        case CommandKind::H:
        case CommandKind::V: return 1;
        case CommandKind::C: return 6;
        case CommandKind::S:
        case CommandKind::Q: return 4;
        case CommandKind::A: return 7;
        case CommandKind::Z: return 0;
    }
    return 0;
}

char command_letter(CommandKind kind);

/// One absolute path command. Slots beyond arity(kind) are always zero.
class PathCommand {
public:
    PathCommand() = default;
    PathCommand(CommandKind kind, std::span<const double> params);

    static PathCommand move_to(Vec2 p) { return {CommandKind::M, std::array{p.x, p.y}}; }
    static PathCommand line_to(Vec2 p) { return {CommandKind::L, std::array{p.x, p.y}}; }
    static PathCommand cubic_to(Vec2 c1, Vec2 c2, Vec2 p) {
        return {CommandKind::C, std::array{c1.x, c1.y, c2.x, c2.y, p.x, p.y}};
    }
    static PathCommand quad_to(Vec2 c, Vec2 p) { return {CommandKind::Q, std::array{c.x, c.y, p.x, p.y}}; }
    static PathCommand arc_to(double rx, double ry, double rotation_deg, bool large_arc, bool sweep, Vec2 p) {
        return {CommandKind::A,
                std::array{rx, ry, rotation_deg, large_arc ? 1.0 : 0.0, sweep ? 1.0 : 0.0, p.x, p.y}};
    }
    static PathCommand close() { return {CommandKind::Z, std::span<const double>{}}; }

    CommandKind kind() const { return kind_; }
    std::span<const double> params() const { return {params_.data(), static_cast<std::size_t>(arity(kind_))}; }
    double operator[](std::size_t i) const { return params_[i]; }

    /// Final point of the command; meaningless for Z.
    Vec2 end_point() const;

    bool operator==(const PathCommand&) const = default;

private:
    CommandKind kind_ = CommandKind::Z;
    std::array<double, 7> params_{};
};

struct StyleAttributes {
    bool has_fill = false;
    std::array<double, 3> stroke_rgb{0.0, 0.0, 0.0};
    double stroke_width = 1.0;

    bool operator==(const StyleAttributes&) const = default;
};

/// A flattened, transform-free path: the atomic drawing element.
struct NormalizedPath {
    int path_id = 0;
    std::vector<PathCommand> commands;
    StyleAttributes style;
    std::optional<std::string> source_layer;
    std::optional<int> semantic_id;
};

/// Applies an affine map to canonical commands (M, L, C, Q, A, Z). Elliptical
/// arcs are mapped exactly: the image ellipse is recovered from the singular
/// values of the transformed axis matrix, and the sweep flag flips when the
/// map reverses orientation. Arcs that collapse to a segment become L.
std::vector<PathCommand> transform_commands(const std::vector<PathCommand>& commands,
                                            const AffineTransform2D& transform);

/// Serializes commands as SVG path data with shortest round-trip numbers.
std::string to_path_data(const std::vector<PathCommand>& commands);

}  // namespace vecseg
