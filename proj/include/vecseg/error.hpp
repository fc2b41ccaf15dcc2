#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vecseg {

enum class ErrorKind {
    MalformedMarkup,
    UnsupportedSvgFeature,
    NonInvertibleTransform,
    UnsupportedTransformKind,
    BadPathData,
    EmptyDrawing,
    DuplicateLeaf,
    NonForestHierarchy,
    SparseIds,
    UnknownLeaf,
    NonFiniteInput,
    DimensionMismatch,
    UnlabeledNode,
    DivergedLoss,
    LengthMismatch,
    EmptyReport,
    InvalidArgument,
    BadFormat,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Collects non-fatal warnings (degenerate shapes, unparsable colors, ...).
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
    if (diag) diag->warn(std::move(message));
}

}  // namespace vecseg
