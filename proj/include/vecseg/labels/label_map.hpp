#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vecseg {

using LabelTriple = std::array<int, 3>;

struct LabelLeaf {
    int leaf_id = 0;
    std::string name;  // dataset-native key (layer name, class name)
    int l1 = 0;
    int l2 = 0;
    int l3 = 0;
    std::string display;  // human-readable class name, defaults to name
    std::string group;    // l2 group name, may be empty

    LabelTriple triple() const { return {l1, l2, l3}; }
};

/// Three-level forest of labels. Immutable once built.
class LabelMap {
public:
    LabelMap() = default;

    /// Validates and indexes. The leaf named `catch_all` may share its l2 id
    /// with a different l1 (the TUM table does this for "Others").
    /// Throws DuplicateLeaf, NonForestHierarchy, SparseIds.
    static LabelMap build(std::vector<LabelLeaf> leaves, std::string provenance,
                          std::string catch_all = "Others", std::vector<std::string> l1_names = {});

    const std::vector<LabelLeaf>& leaves() const { return leaves_; }  // sorted by l3
    std::array<int, 3> level_sizes() const { return sizes_; }
    const std::string& provenance() const { return provenance_; }
    const std::string& catch_all() const { return catch_all_; }

    const LabelLeaf* find(std::string_view name) const;
    const LabelLeaf* find_id(int leaf_id) const;

    /// Throws UnknownLeaf naming the closest known leaves.
    LabelTriple map_leaf(std::string_view name) const;
    LabelTriple map_leaf(int leaf_id) const;

    const LabelLeaf& leaf_for_l3(int l3) const { return leaves_.at(static_cast<std::size_t>(l3)); }
    int l2_of(int l3) const { return leaf_for_l3(l3).l2; }
    int l1_of_l2(int l2) const { return l2_parent_.at(static_cast<std::size_t>(l2)); }

    /// Display names per level, index = class id.
    std::vector<std::string> level_names(int level) const;

    /// Closest known names by edit distance, at most `count`.
    std::vector<std::string> nearest_names(std::string_view name, std::size_t count = 3) const;

private:
    std::vector<LabelLeaf> leaves_;
    std::array<int, 3> sizes_{0, 0, 0};
    std::string provenance_;
    std::string catch_all_;
    std::vector<std::string> l1_names_;
    std::vector<int> l2_parent_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::unordered_map<int, std::size_t> by_id_;
};

/// Tab-separated: leaf_id name l1 l2 l3 [display [group]]. A header row
/// starting with "leaf_id" is skipped. Comment lines start with '#';
/// "# provenance: X", "# catch-all: X" and "# level1-names: a|b|c" are read.
LabelMap parse_label_map(std::string_view text, std::string_view source = "<memory>");
LabelMap load_label_map(const std::string& path);
std::string write_label_map(const LabelMap& map);

/// Layers present in fewer than threshold·total drawings map to the
/// catch-all name; the rest map to themselves. Strict less-than.
std::map<std::string, std::string> aggregate_rare(const std::map<std::string, int>& layer_occurrence,
                                                  int total_drawings, double threshold = 1.0 / 3.0,
                                                  std::string_view catch_all = "Others");

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace vecseg
