#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vecseg {

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;  // document order
    std::vector<XmlElement> children;
    std::size_t line = 0;
    /// Set for text/defs/metadata-like elements that ingest skips entirely.
    bool ignored = false;

    const std::string* attribute(std::string_view key) const;
};

struct RawSvgDocument {
    std::string source_id;
    XmlElement root;
    std::optional<std::array<double, 4>> viewbox;  // min-x, min-y, width, height
};

/// Parses SVG markup. Throws Error{MalformedMarkup} (with line/column) for
/// ill-formed XML and Error{UnsupportedSvgFeature} for graphical elements the
/// pipeline does not handle. text/defs subtrees are kept but flagged ignored.
RawSvgDocument parse_svg(std::string_view bytes, std::string source_id = {});

/// Reads a file and parses it; the file name becomes the source id.
RawSvgDocument load_svg_file(const std::string& path);

/// Number of elements in the tree with the given name (ignored ones included).
std::size_t count_elements(const XmlElement& root, std::string_view name);

}  // namespace vecseg
