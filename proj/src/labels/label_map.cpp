#include "vecseg/labels/label_map.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "vecseg/error.hpp"

namespace vecseg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

int parse_int(std::string_view s, std::string_view source, int line) {
    s = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::BadFormat, fmt::format("{}:{}: expected integer, got '{}'", source, line, s));
    }
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

LabelMap LabelMap::build(std::vector<LabelLeaf> leaves, std::string provenance, std::string catch_all,
                         std::vector<std::string> l1_names) {
    LabelMap m;
    m.provenance_ = std::move(provenance);
    m.catch_all_ = std::move(catch_all);
    m.l1_names_ = std::move(l1_names);

    // Same name twice: a contradiction if the parents differ, a plain duplicate otherwise.
    std::map<std::string, const LabelLeaf*> names;
    std::set<int> ids;
    for (const LabelLeaf& leaf : leaves) {
        if (leaf.l1 < 0 || leaf.l2 < 0 || leaf.l3 < 0) {
            throw Error(ErrorKind::SparseIds, fmt::format("negative class id for leaf '{}'", leaf.name));
        }
        auto [it, fresh] = names.emplace(leaf.name, &leaf);
        if (!fresh) {
            const LabelLeaf& other = *it->second;
            if (other.l1 != leaf.l1 || other.l2 != leaf.l2) {
                throw Error(ErrorKind::NonForestHierarchy,
                            fmt::format("leaf '{}' listed under l2={} and l2={}", leaf.name, other.l2, leaf.l2));
            }
            throw Error(ErrorKind::DuplicateLeaf, fmt::format("leaf '{}' listed twice", leaf.name));
        }
        if (!ids.insert(leaf.leaf_id).second) {
            throw Error(ErrorKind::DuplicateLeaf, fmt::format("leaf id {} listed twice", leaf.leaf_id));
        }
    }

    std::sort(leaves.begin(), leaves.end(), [](const LabelLeaf& a, const LabelLeaf& b) { return a.l3 < b.l3; });
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i].l3 != static_cast<int>(i)) {
            if (i > 0 && leaves[i].l3 == leaves[i - 1].l3) {
                throw Error(ErrorKind::DuplicateLeaf, fmt::format("l3 id {} used by '{}' and '{}'", leaves[i].l3,
                                                                  leaves[i - 1].name, leaves[i].name));
            }
            throw Error(ErrorKind::SparseIds, fmt::format("l3 ids not dense: missing {}", i));
        }
    }

    int max_l1 = -1, max_l2 = -1;
    for (const LabelLeaf& leaf : leaves) {
        max_l1 = std::max(max_l1, leaf.l1);
        max_l2 = std::max(max_l2, leaf.l2);
    }
    m.l2_parent_.assign(static_cast<std::size_t>(max_l2 + 1), -1);
    std::vector<const LabelLeaf*> l2_witness(m.l2_parent_.size(), nullptr);
    for (int pass = 0; pass < 2; ++pass) {
        // Regular leaves first so they define the parent; the catch-all only
        // claims an l2 nobody else uses.
        for (const LabelLeaf& leaf : leaves) {
            const bool is_catch_all = lower(leaf.name) == lower(m.catch_all_);
            if (is_catch_all != (pass == 1)) continue;
            int& parent = m.l2_parent_[static_cast<std::size_t>(leaf.l2)];
            if (parent == -1) {
                parent = leaf.l1;
                l2_witness[static_cast<std::size_t>(leaf.l2)] = &leaf;
            } else if (parent != leaf.l1 && !is_catch_all) {
                throw Error(ErrorKind::NonForestHierarchy,
                            fmt::format("l2={} has parents l1={} ('{}') and l1={} ('{}')", leaf.l2, parent,
                                        l2_witness[static_cast<std::size_t>(leaf.l2)]->name, leaf.l1, leaf.name));
            }
        }
    }
    for (std::size_t k = 0; k < m.l2_parent_.size(); ++k) {
        if (m.l2_parent_[k] == -1) throw Error(ErrorKind::SparseIds, fmt::format("l2 id {} unused", k));
    }
    std::vector<bool> l1_used(static_cast<std::size_t>(max_l1 + 1), false);
    for (const LabelLeaf& leaf : leaves) l1_used[static_cast<std::size_t>(leaf.l1)] = true;
    for (std::size_t k = 0; k < l1_used.size(); ++k) {
        if (!l1_used[k]) throw Error(ErrorKind::SparseIds, fmt::format("l1 id {} unused", k));
    }

    for (LabelLeaf& leaf : leaves)
        if (leaf.display.empty()) leaf.display = leaf.name;
    m.leaves_ = std::move(leaves);
    m.sizes_ = {max_l1 + 1, max_l2 + 1, static_cast<int>(m.leaves_.size())};
    for (std::size_t i = 0; i < m.leaves_.size(); ++i) {
        m.by_name_.emplace(m.leaves_[i].name, i);
        m.by_id_.emplace(m.leaves_[i].leaf_id, i);
    }
    return m;
}

const LabelLeaf* LabelMap::find(std::string_view name) const {
    const auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : &leaves_[it->second];
}

const LabelLeaf* LabelMap::find_id(int leaf_id) const {
    const auto it = by_id_.find(leaf_id);
    return it == by_id_.end() ? nullptr : &leaves_[it->second];
}

std::vector<std::string> LabelMap::nearest_names(std::string_view name, std::size_t count) const {
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (const LabelLeaf& leaf : leaves_) scored.emplace_back(edit_distance(lower(name), lower(leaf.name)), leaf.name);
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < count; ++i) out.push_back(scored[i].second);
    return out;
}

LabelTriple LabelMap::map_leaf(std::string_view name) const {
    if (const LabelLeaf* leaf = find(name)) return leaf->triple();
    throw Error(ErrorKind::UnknownLeaf,
                fmt::format("'{}' not in {} map; nearest: {}", name, provenance_, fmt::join(nearest_names(name), ", ")));
}

LabelTriple LabelMap::map_leaf(int leaf_id) const {
    if (const LabelLeaf* leaf = find_id(leaf_id)) return leaf->triple();
    throw Error(ErrorKind::UnknownLeaf, fmt::format("leaf id {} not in {} map (0..{})", leaf_id, provenance_,
                                                    static_cast<int>(leaves_.size()) - 1));
}

std::vector<std::string> LabelMap::level_names(int level) const {
    if (level < 0 || level > 2) throw Error(ErrorKind::InvalidArgument, "level must be 0, 1 or 2");
    std::vector<std::string> out(static_cast<std::size_t>(sizes_[static_cast<std::size_t>(level)]));
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (level == 0) out[k] = k < l1_names_.size() ? l1_names_[k] : fmt::format("L1_{}", k);
        else out[k] = fmt::format("L2_{}", k);
    }
    // the catch-all names its l2 group only if no regular leaf did
    for (int pass = 0; pass < 2; ++pass) {
        for (const LabelLeaf& leaf : leaves_) {
            if ((lower(leaf.name) == lower(catch_all_)) != (pass == 1)) continue;
            if (level == 2) out[static_cast<std::size_t>(leaf.l3)] = leaf.display;
            else if (level == 1 && !leaf.group.empty() && out[static_cast<std::size_t>(leaf.l2)].starts_with("L2_")) {
                out[static_cast<std::size_t>(leaf.l2)] = leaf.group;
            }
        }
    }
    return out;
}

LabelMap parse_label_map(std::string_view text, std::string_view source) {
    std::vector<LabelLeaf> leaves;
    std::string provenance(source);
    std::string catch_all = "Others";
    std::vector<std::string> l1_names;
    int line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;
        if (line.front() == '#') {
            const std::string_view body = trim(line.substr(1));
            const auto directive = [&](std::string_view key) -> std::optional<std::string_view> {
                if (body.starts_with(key)) return trim(body.substr(key.size()));
                return std::nullopt;
            };
            if (auto v = directive("provenance:")) provenance = std::string(*v);
            else if (auto c = directive("catch-all:")) catch_all = std::string(*c);
            else if (auto n = directive("level1-names:")) {
                for (std::string_view part : split(*n, '|')) l1_names.emplace_back(trim(part));
            }
            continue;
        }
        const auto cols = split(line, '\t');
        if (trim(cols[0]) == "leaf_id") continue;
        if (cols.size() < 5) {
            throw Error(ErrorKind::BadFormat,
                        fmt::format("{}:{}: expected at least 5 tab-separated columns, got {}", source, line_no, cols.size()));
        }
        LabelLeaf leaf;
        leaf.leaf_id = parse_int(cols[0], source, line_no);
        leaf.name = std::string(trim(cols[1]));
        leaf.l1 = parse_int(cols[2], source, line_no);
        leaf.l2 = parse_int(cols[3], source, line_no);
        leaf.l3 = parse_int(cols[4], source, line_no);
        if (cols.size() > 5) leaf.display = std::string(trim(cols[5]));
        if (cols.size() > 6) leaf.group = std::string(trim(cols[6]));
        if (leaf.name.empty()) throw Error(ErrorKind::BadFormat, fmt::format("{}:{}: empty leaf name", source, line_no));
        leaves.push_back(std::move(leaf));
    }
    return LabelMap::build(std::move(leaves), std::move(provenance), std::move(catch_all), std::move(l1_names));
}

LabelMap load_label_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open label map " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_label_map(ss.str(), path);
}

std::string write_label_map(const LabelMap& map) {
    std::string out = fmt::format("# provenance: {}\n# catch-all: {}\n", map.provenance(), map.catch_all());
    out += fmt::format("# level1-names: {}\n", fmt::join(map.level_names(0), "|"));
    out += "leaf_id\tname\tl1\tl2\tl3\tdisplay\tgroup\n";
    for (const LabelLeaf& leaf : map.leaves()) {
        out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", leaf.leaf_id, leaf.name, leaf.l1, leaf.l2, leaf.l3,
                           leaf.display, leaf.group);
    }
    return out;
}

std::map<std::string, std::string> aggregate_rare(const std::map<std::string, int>& layer_occurrence,
                                                  int total_drawings, double threshold, std::string_view catch_all) {
    if (total_drawings < 1) throw Error(ErrorKind::InvalidArgument, "total_drawings must be >= 1");
    std::map<std::string, std::string> out;
    for (const auto& [layer, count] : layer_occurrence) {
        const double share = static_cast<double>(count) / static_cast<double>(total_drawings);
        out.emplace(layer, share < threshold ? std::string(catch_all) : layer);
    }
    return out;
}

}  // namespace vecseg
