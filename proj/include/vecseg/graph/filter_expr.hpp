#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "vecseg/graph/features.hpp"

namespace vecseg {

/// Boolean predicate over the named edge-feature components, e.g.
///   contiguous == 1 && intersection_count >= 1
///   !(from_knn == 1) || log_min_dist < 0.05
/// Operands are feature names or numbers; a bare name means "!= 0".
/// Operators: == != < <= > >= && || ! and parentheses.
class EdgePredicate {
public:
    /// Throws BadFormat with the offending position.
    static EdgePredicate parse(std::string_view text);

    bool operator()(const EdgeFeatureVector& e) const;
    /// Fully parenthesized canonical form.
    std::string to_string() const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

}  // namespace vecseg
