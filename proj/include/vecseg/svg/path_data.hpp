#pragma once

#include <string_view>
#include <vector>

#include "vecseg/svg/path.hpp"

namespace vecseg {

/// A command as written in a d attribute: letter case preserved, parameters
/// exactly as parsed. Implicit repeats are already split into separate entries.
struct RawPathCommand {
    CommandKind kind = CommandKind::M;
    bool relative = false;
    std::vector<double> params;
    std::size_t offset = 0;  // byte offset of the command in the source text
};

/// Tokenizes a d attribute. Throws Error{BadPathData} with offset and token.
std::vector<RawPathCommand> tokenize_path_data(std::string_view d);

/// Converts raw commands to the canonical absolute form: lowercase -> absolute,
/// H/V -> L, S -> C and T -> Q with reflected control points, zero-radius arcs
/// -> L. A command following Z without an explicit M starts a new subpath at
/// the closed subpath's start, so an M is inserted.
std::vector<PathCommand> canonicalize_commands(const std::vector<RawPathCommand>& raw);

/// tokenize_path_data + canonicalize_commands.
std::vector<PathCommand> canonicalize_commands(std::string_view d);

}  // namespace vecseg
