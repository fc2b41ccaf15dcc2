#include "vecseg/svg/document.hpp"

#include <expat.h>

#include <charconv>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "vecseg/error.hpp"

namespace vecseg {

const std::string* XmlElement::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return &v;
    return nullptr;
}

namespace {

// Elements whose whole subtree is skipped (non-geometric content).
const std::set<std::string, std::less<>> kIgnoredElements = {"defs", "text", "title", "desc", "metadata"};
const std::set<std::string, std::less<>> kGraphicElements = {"svg",    "g",       "path",     "line",
                                                             "rect",   "circle",  "ellipse",  "polyline",
                                                             "polygon"};

struct BuildState {
    std::unique_ptr<XmlElement> root;
    std::vector<XmlElement*> stack;
    XML_Parser parser = nullptr;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto* st = static_cast<BuildState*>(user);
    XmlElement el;
    el.name = name;
    el.line = XML_GetCurrentLineNumber(st->parser);
    for (const XML_Char** a = attrs; *a; a += 2) el.attributes.emplace_back(a[0], a[1]);
    if (st->stack.empty()) {
        st->root = std::make_unique<XmlElement>(std::move(el));
        st->stack.push_back(st->root.get());
    } else {
        XmlElement* parent = st->stack.back();
        parent->children.push_back(std::move(el));
        st->stack.push_back(&parent->children.back());
    }
}

void on_end(void* user, const XML_Char*) {
    static_cast<BuildState*>(user)->stack.pop_back();
}

void validate(XmlElement& el) {
    // Foreign-namespace elements (sodipodi:namedview, ...) carry editor state only.
    if (kIgnoredElements.count(el.name) || el.name.find(':') != std::string::npos) {
        el.ignored = true;
        return;
    }
    if (!kGraphicElements.count(el.name)) throw Error(ErrorKind::UnsupportedSvgFeature, el.name);
    for (XmlElement& child : el.children) validate(child);
}

std::optional<std::array<double, 4>> parse_viewbox(const std::string* text) {
    if (!text) return std::nullopt;
    std::array<double, 4> box{};
    const char* p = text->data();
    const char* end = p + text->size();
    for (double& v : box) {
        while (p < end && (*p == ' ' || *p == ',' || *p == '\t' || *p == '\n' || *p == '\r')) ++p;
        auto [ptr, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) throw Error(ErrorKind::BadFormat, "invalid viewBox '" + *text + "'");
        p = ptr;
    }
    return box;
}

}  // namespace

RawSvgDocument parse_svg(std::string_view bytes, std::string source_id) {
    BuildState st;
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) throw Error(ErrorKind::Io, "cannot allocate XML parser");
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), &on_start, &on_end);

    if (XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) == XML_STATUS_ERROR) {
        std::ostringstream msg;
        msg << (source_id.empty() ? std::string("<input>") : source_id) << ":"
            << XML_GetCurrentLineNumber(parser.get()) << ":" << XML_GetCurrentColumnNumber(parser.get()) << ": "
            << XML_ErrorString(XML_GetErrorCode(parser.get()));
        throw Error(ErrorKind::MalformedMarkup, msg.str());
    }
    if (!st.root) throw Error(ErrorKind::MalformedMarkup, "document has no root element");
    if (st.root->name != "svg") throw Error(ErrorKind::UnsupportedSvgFeature, "root element " + st.root->name);

    RawSvgDocument doc;
    doc.source_id = std::move(source_id);
    doc.root = std::move(*st.root);
    validate(doc.root);
    doc.viewbox = parse_viewbox(doc.root.attribute("viewBox"));
    return doc;
}

RawSvgDocument load_svg_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_svg(ss.str(), path);
}

std::size_t count_elements(const XmlElement& root, std::string_view name) {
    std::size_t n = root.name == name ? 1 : 0;
    for (const XmlElement& c : root.children) n += count_elements(c, name);
    return n;
}

}  // namespace vecseg
