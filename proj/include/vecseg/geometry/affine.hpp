#pragma once

#include <string_view>

#include "vecseg/geometry/vec2.hpp"

namespace vecseg {

/// x' = a*x + c*y + e, y' = b*x + d*y + f (SVG matrix order).
struct AffineTransform2D {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0, e = 0.0, f = 0.0;

    static constexpr AffineTransform2D identity() { return {}; }
    static constexpr AffineTransform2D translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
    static constexpr AffineTransform2D scale(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
    static AffineTransform2D rotate_degrees(double degrees);

    constexpr Vec2 apply(Vec2 p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
    constexpr Vec2 apply_linear(Vec2 v) const { return {a * v.x + c * v.y, b * v.x + d * v.y}; }
    constexpr double determinant() const { return a * d - b * c; }
    constexpr bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1 && e == 0 && f == 0; }

    /// Composition: (*this * rhs).apply(p) == apply(rhs.apply(p)).
    constexpr AffineTransform2D operator*(const AffineTransform2D& r) const {
        return {a * r.a + c * r.b, b * r.a + d * r.b, a * r.c + c * r.d,
                b * r.c + d * r.d, a * r.e + c * r.f + e, b * r.e + d * r.f + f};
    }
    constexpr bool operator==(const AffineTransform2D&) const = default;
};

/// Parses an SVG transform list ("translate(1,2) scale(2)"). The leftmost entry
/// is outermost. Throws Error{UnsupportedTransformKind} for non-affine forms and
/// Error{BadFormat} for syntax errors.
AffineTransform2D parse_transform_list(std::string_view text);

}  // namespace vecseg
