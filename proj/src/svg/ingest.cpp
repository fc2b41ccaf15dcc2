#include "vecseg/svg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

#include "vecseg/svg/path_data.hpp"

namespace vecseg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

// Leading number of a length ("12", "3.5px"); user units only, suffix ignored.
std::optional<double> parse_length(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    const char* first = text.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc()) return std::nullopt;
    return v;
}

double length_attr(const XmlElement& el, std::string_view key, double fallback = 0.0) {
    const std::string* text = el.attribute(key);
    if (!text) return fallback;
    return parse_length(*text).value_or(fallback);
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
        if (i >= text.size()) break;
        const char* first = text.data() + i;
        if (*first == '+') ++first;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
        if (ec != std::errc()) break;  // render up to the first error
        out.push_back(v);
        i = static_cast<std::size_t>(ptr - text.data());
    }
    return out;
}

std::vector<PathCommand> ellipse_commands(double cx, double cy, double rx, double ry) {
    return {PathCommand::move_to({cx + rx, cy}),
            PathCommand::arc_to(rx, ry, 0, false, true, {cx, cy + ry}),
            PathCommand::arc_to(rx, ry, 0, false, true, {cx - rx, cy}),
            PathCommand::arc_to(rx, ry, 0, false, true, {cx, cy - ry}),
            PathCommand::arc_to(rx, ry, 0, false, true, {cx + rx, cy}),
            PathCommand::close()};
}

std::vector<PathCommand> degenerate(const XmlElement& el, Vec2 at, Diagnostics* diag) {
    warn(diag, "degenerate <" + el.name + "> at line " + std::to_string(el.line) + " emitted as a point");
    return {PathCommand::move_to(at)};
}

std::vector<PathCommand> rect_commands(const XmlElement& el, Diagnostics* diag) {
    const double x = length_attr(el, "x"), y = length_attr(el, "y");
    const double w = length_attr(el, "width"), h = length_attr(el, "height");
    if (!(w > 0.0) || !(h > 0.0)) return degenerate(el, {x, y}, diag);

    std::optional<double> rx_attr, ry_attr;
    if (const auto* s = el.attribute("rx")) rx_attr = parse_length(*s);
    if (const auto* s = el.attribute("ry")) ry_attr = parse_length(*s);
    double rx = rx_attr.value_or(ry_attr.value_or(0.0));
    double ry = ry_attr.value_or(rx_attr.value_or(0.0));
    rx = std::clamp(rx, 0.0, w / 2);
    ry = std::clamp(ry, 0.0, h / 2);

    if (rx <= 0.0 || ry <= 0.0) {
        // Same traversal as "m x,y v h h w v -h Z".
        return {PathCommand::move_to({x, y}), PathCommand::line_to({x, y + h}),
                PathCommand::line_to({x + w, y + h}), PathCommand::line_to({x + w, y}), PathCommand::close()};
    }
    return {PathCommand::move_to({x + rx, y}),
            PathCommand::line_to({x + w - rx, y}),
            PathCommand::arc_to(rx, ry, 0, false, true, {x + w, y + ry}),
            PathCommand::line_to({x + w, y + h - ry}),
            PathCommand::arc_to(rx, ry, 0, false, true, {x + w - rx, y + h}),
            PathCommand::line_to({x + rx, y + h}),
            PathCommand::arc_to(rx, ry, 0, false, true, {x, y + h - ry}),
            PathCommand::line_to({x, y + ry}),
            PathCommand::arc_to(rx, ry, 0, false, true, {x + rx, y}),
            PathCommand::close()};
}

const std::map<std::string, std::array<int, 3>, std::less<>>& named_colors() {
    static const std::map<std::string, std::array<int, 3>, std::less<>> colors = {
        {"black", {0, 0, 0}},         {"silver", {192, 192, 192}}, {"gray", {128, 128, 128}},
        {"grey", {128, 128, 128}},    {"white", {255, 255, 255}},  {"maroon", {128, 0, 0}},
        {"red", {255, 0, 0}},         {"purple", {128, 0, 128}},   {"fuchsia", {255, 0, 255}},
        {"magenta", {255, 0, 255}},   {"green", {0, 128, 0}},      {"lime", {0, 255, 0}},
        {"olive", {128, 128, 0}},     {"yellow", {255, 255, 0}},   {"navy", {0, 0, 128}},
        {"blue", {0, 0, 255}},        {"teal", {0, 128, 128}},     {"aqua", {0, 255, 255}},
        {"cyan", {0, 255, 255}},      {"orange", {255, 165, 0}},   {"brown", {165, 42, 42}},
        {"darkgray", {169, 169, 169}}, {"darkgrey", {169, 169, 169}}, {"lightgray", {211, 211, 211}},
        {"lightgrey", {211, 211, 211}}, {"dimgray", {105, 105, 105}}, {"dimgrey", {105, 105, 105}},
        {"darkred", {139, 0, 0}},     {"darkgreen", {0, 100, 0}},  {"darkblue", {0, 0, 139}},
        {"pink", {255, 192, 203}},    {"gold", {255, 215, 0}},     {"violet", {238, 130, 238}},
    };
    return colors;
}

int hex_digit(char ch) {
    if (ch >= '0' && ch <= '9') return ch - '0';
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    return -1;
}

struct StyleContext {
    AffineTransform2D ctm;
    std::optional<std::string> fill;
    std::optional<std::string> stroke;
    std::optional<std::string> stroke_width;
    std::optional<std::string> layer;
    std::optional<int> semantic_id;
};

std::map<std::string, std::string, std::less<>> parse_inline_style(std::string_view style) {
    std::map<std::string, std::string, std::less<>> out;
    std::size_t i = 0;
    while (i < style.size()) {
        std::size_t semi = style.find(';', i);
        if (semi == std::string_view::npos) semi = style.size();
        std::string_view decl = style.substr(i, semi - i);
        std::size_t colon = decl.find(':');
        if (colon != std::string_view::npos) {
            out[lower(trim(decl.substr(0, colon)))] = std::string(trim(decl.substr(colon + 1)));
        }
        i = semi + 1;
    }
    return out;
}

StyleContext child_context(const XmlElement& el, const StyleContext& parent, bool is_root) {
    StyleContext ctx = parent;
    if (const auto* t = el.attribute("transform")) ctx.ctm = parent.ctm * parse_transform_list(*t);
    if (el.name == "svg" && !is_root) {
        // Nested viewports only contribute their x/y offset; viewBox is not applied.
        const double x = length_attr(el, "x"), y = length_attr(el, "y");
        if (x != 0.0 || y != 0.0) ctx.ctm = ctx.ctm * AffineTransform2D::translate(x, y);
    }
    static constexpr std::string_view kStyleKeys[] = {"fill", "stroke", "stroke-width"};
    std::optional<std::string>* slots[] = {&ctx.fill, &ctx.stroke, &ctx.stroke_width};
    for (std::size_t k = 0; k < 3; ++k)
        if (const auto* v = el.attribute(kStyleKeys[k])) *slots[k] = std::string(trim(*v));
    if (const auto* s = el.attribute("style")) {
        auto decls = parse_inline_style(*s);
        for (std::size_t k = 0; k < 3; ++k) {
            auto it = decls.find(kStyleKeys[k]);
            if (it != decls.end()) *slots[k] = it->second;
        }
    }
    for (std::string_view key : {"data-layer", "inkscape:label"}) {
        if (const auto* v = el.attribute(key)) {
            ctx.layer = *v;
            break;
        }
    }
    if (el.name == "g" && !el.attribute("data-layer") && !el.attribute("inkscape:label")) {
        if (const auto* id = el.attribute("id")) ctx.layer = *id;
    }
    if (const auto* sid = el.attribute("semantic-id")) {
        int v = 0;
        std::string_view text = trim(*sid);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec == std::errc() && ptr == text.data() + text.size()) ctx.semantic_id = v;
    }
    return ctx;
}

StyleAttributes resolve_style(const StyleContext& ctx, const XmlElement& el, Diagnostics* diag) {
    StyleAttributes style;
    if (!ctx.fill) {
        style.has_fill = el.name != "line";  // initial fill is black; a line has no interior
    } else {
        style.has_fill = lower(*ctx.fill) != "none";
    }
    if (ctx.stroke && lower(*ctx.stroke) != "none") {
        if (auto rgb = parse_color(*ctx.stroke)) {
            style.stroke_rgb = *rgb;
        } else {
            warn(diag, "unparsable stroke color '" + *ctx.stroke + "' at line " + std::to_string(el.line) +
                           ", using black");
        }
    }
    double width = 1.0;
    if (ctx.stroke_width) {
        auto w = parse_length(*ctx.stroke_width);
        if (w && *w >= 0.0) {
            width = *w;
        } else {
            warn(diag, "invalid stroke-width '" + *ctx.stroke_width + "', using 1");
        }
    }
    style.stroke_width = width * std::sqrt(std::abs(ctx.ctm.determinant()));
    return style;
}

void walk(const XmlElement& el, const StyleContext& parent, bool is_root, std::vector<NormalizedPath>& out,
          Diagnostics* diag) {
    if (el.ignored) return;
    // The root viewport's offset and viewBox are not applied: user units as-is.
    const StyleContext ctx = child_context(el, parent, is_root);

    if (el.name == "svg" || el.name == "g") {
        for (const XmlElement& child : el.children) walk(child, ctx, false, out, diag);
        return;
    }

    std::vector<PathCommand> commands;
    if (el.name == "path") {
        const std::string* d = el.attribute("d");
        if (!d || trim(*d).empty()) {
            warn(diag, "<path> without data at line " + std::to_string(el.line) + " skipped");
            return;
        }
        commands = canonicalize_commands(*d);
    } else {
        commands = shape_to_commands(el, diag);
        if (commands.empty()) {
            warn(diag, "<" + el.name + "> without geometry at line " + std::to_string(el.line) + " skipped");
            return;
        }
    }
    if (!ctx.ctm.is_identity()) commands = transform_commands(commands, ctx.ctm);

    NormalizedPath path;
    path.path_id = static_cast<int>(out.size());
    path.commands = std::move(commands);
    path.style = resolve_style(ctx, el, diag);
    path.source_layer = ctx.layer;
    path.semantic_id = ctx.semantic_id;
    out.push_back(std::move(path));
}

void append_color_hex(std::string& out, const std::array<double, 3>& rgb) {
    static constexpr char digits[] = "0123456789abcdef";
    out += '#';
    for (double c : rgb) {
        int v = static_cast<int>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
        out += digits[v >> 4];
        out += digits[v & 15];
    }
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::vector<PathCommand> shape_to_commands(const XmlElement& el, Diagnostics* diag) {
    if (el.name == "line") {
        return {PathCommand::move_to({length_attr(el, "x1"), length_attr(el, "y1")}),
                PathCommand::line_to({length_attr(el, "x2"), length_attr(el, "y2")})};
    }
    if (el.name == "rect") return rect_commands(el, diag);
    if (el.name == "circle") {
        const double cx = length_attr(el, "cx"), cy = length_attr(el, "cy"), r = length_attr(el, "r");
        if (!(r > 0.0)) return degenerate(el, {cx, cy}, diag);
        return ellipse_commands(cx, cy, r, r);
    }
    if (el.name == "ellipse") {
        const double cx = length_attr(el, "cx"), cy = length_attr(el, "cy");
        const double rx = length_attr(el, "rx"), ry = length_attr(el, "ry");
        if (!(rx > 0.0) || !(ry > 0.0)) return degenerate(el, {cx, cy}, diag);
        return ellipse_commands(cx, cy, rx, ry);
    }
    if (el.name == "polyline" || el.name == "polygon") {
        const std::string* pts = el.attribute("points");
        std::vector<double> v = pts ? parse_number_list(*pts) : std::vector<double>{};
        std::vector<PathCommand> out;
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
            Vec2 p{v[i], v[i + 1]};
            out.push_back(out.empty() ? PathCommand::move_to(p) : PathCommand::line_to(p));
        }
        if (el.name == "polygon" && !out.empty()) out.push_back(PathCommand::close());
        return out;
    }
    throw Error(ErrorKind::UnsupportedSvgFeature, el.name);
}

std::optional<std::array<double, 3>> parse_color(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    std::string low = lower(text);
    if (low == "none") return std::nullopt;
    if (low[0] == '#') {
        std::string_view hex = std::string_view(low).substr(1);
        if (hex.size() != 3 && hex.size() != 6) return std::nullopt;
        std::array<double, 3> rgb{};
        for (std::size_t c = 0; c < 3; ++c) {
            int value = 0;
            if (hex.size() == 3) {
                int d = hex_digit(hex[c]);
                if (d < 0) return std::nullopt;
                value = d * 17;
            } else {
                int hi = hex_digit(hex[2 * c]), lo = hex_digit(hex[2 * c + 1]);
                if (hi < 0 || lo < 0) return std::nullopt;
                value = hi * 16 + lo;
            }
            rgb[c] = value / 255.0;
        }
        return rgb;
    }
    if (low.rfind("rgb(", 0) == 0 && low.back() == ')') {
        std::string_view body = std::string_view(low).substr(4, low.size() - 5);
        std::array<double, 3> rgb{};
        std::size_t start = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            std::size_t comma = body.find(',', start);
            if ((c < 2) != (comma != std::string_view::npos)) return std::nullopt;
            std::string_view part = trim(body.substr(start, comma == std::string_view::npos ? body.size() - start
                                                                                           : comma - start));
            bool percent = !part.empty() && part.back() == '%';
            if (percent) part.remove_suffix(1);
            auto v = parse_length(part);
            if (!v) return std::nullopt;
            rgb[c] = std::clamp(percent ? *v / 100.0 : *v / 255.0, 0.0, 1.0);
            start = comma + 1;
        }
        return rgb;
    }
    auto it = named_colors().find(low);
    if (it == named_colors().end()) return std::nullopt;
    return std::array<double, 3>{it->second[0] / 255.0, it->second[1] / 255.0, it->second[2] / 255.0};
}

std::vector<NormalizedPath> flatten_transforms(const RawSvgDocument& doc, Diagnostics* diag) {
    std::vector<NormalizedPath> out;
    walk(doc.root, StyleContext{}, true, out, diag);
    return out;
}

std::string write_flat_svg(const std::vector<NormalizedPath>& paths) {
    return write_flat_svg(paths, {}, {});
}

std::string write_flat_svg(const std::vector<NormalizedPath>& paths,
                           const std::vector<std::array<double, 3>>& stroke_override,
                           const std::vector<std::string>& extra_attributes) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\">\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const NormalizedPath& p = paths[i];
        out += "  <path d=\"";
        out += to_path_data(p.commands);
        out += "\" style=\"fill:";
        out += p.style.has_fill ? "#000000" : "none";
        out += ";stroke:";
        append_color_hex(out, i < stroke_override.size() ? stroke_override[i] : p.style.stroke_rgb);
        out += ";stroke-width:";
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p.style.stroke_width);
        out.append(buf, ptr);
        out += '"';
        if (p.source_layer) out += " data-layer=\"" + xml_escape(*p.source_layer) + "\"";
        if (p.semantic_id) out += " semantic-id=\"" + std::to_string(*p.semantic_id) + "\"";
        if (i < extra_attributes.size() && !extra_attributes[i].empty()) out += " " + extra_attributes[i];
        out += "/>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace vecseg
