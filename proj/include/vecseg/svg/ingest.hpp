#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vecseg/error.hpp"
#include "vecseg/svg/document.hpp"
#include "vecseg/svg/path.hpp"

namespace vecseg {

/// Converts a basic shape (line, rect, circle, ellipse, polyline, polygon) into
/// canonical commands. Circles and ellipses become four quarter arcs + Z
/// starting at (cx + rx, cy). Zero-size shapes yield a single M and a warning.
std::vector<PathCommand> shape_to_commands(const XmlElement& element, Diagnostics* diag = nullptr);

/// Parses an SVG paint value to RGB in [0,1]. Returns nullopt for "none" and
/// for values that cannot be interpreted.
std::optional<std::array<double, 3>> parse_color(std::string_view text);

/// Bakes every group/element transform into absolute coordinates, resolves
/// inherited style and emits one NormalizedPath per drawable element in
/// document pre-order. Ids are 0..n-1 in that order.
std::vector<NormalizedPath> flatten_transforms(const RawSvgDocument& doc, Diagnostics* diag = nullptr);

/// Writes paths as a flat SVG: one <path> per record, no groups, no
/// transforms. Re-ingesting the output reproduces geometry and style.
std::string write_flat_svg(const std::vector<NormalizedPath>& paths);

/// Same as write_flat_svg but with an explicit stroke color per path, used for
/// prediction overlays. Extra attributes are written verbatim on each path.
std::string write_flat_svg(const std::vector<NormalizedPath>& paths,
                           const std::vector<std::array<double, 3>>& stroke_override,
                           const std::vector<std::string>& extra_attributes);

}  // namespace vecseg
