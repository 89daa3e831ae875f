#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "admercs/dataset.hpp"

namespace admercs {

struct TreeParams {
    int32_t max_depth = 10;
    double min_samples_leaf_frac = 0.02;  // fraction of N, in (0, 0.5]
    double min_impurity_decrease = 0.001;
};

struct Split {
    int32_t attribute = -1;
    bool numeric = true;
    double threshold = 0.0;                // numeric: left iff value <= threshold
    std::vector<int32_t> left_categories;  // nominal: left iff category in this set

    bool goes_left(double value) const {
        if (numeric) return value <= threshold;
        const auto cat = static_cast<int32_t>(value);
        for (int32_t c : left_categories)
            if (c == cat) return true;
        return false;  // unseen categories take the "rest" branch
    }
};

struct TreeNode {
    std::optional<Split> split;
    int32_t left = -1;
    int32_t right = -1;
    double impurity = 0.0;  // Gini (nominal target) or variance (numeric target)
    int32_t depth = 0;
    int32_t leaf_id = -1;             // dense id, leaves only
    std::vector<int32_t> members;     // training rows reaching this node

    bool is_leaf() const { return !split.has_value(); }
};

// Axis-aligned decision tree predicting one target attribute from the others.
// Leaves act as instance contexts; each leaf is scored by the likelihood
// model of its lowest-impurity ancestor-or-self.
struct Tree {
    int32_t target = -1;
    std::vector<TreeNode> nodes;        // nodes[0] is the root
    std::vector<int32_t> leaf_nodes;    // leaf id -> node index
    std::vector<int32_t> scoring_nodes; // leaf id -> scoring node index

    int32_t n_leaves() const { return static_cast<int32_t>(leaf_nodes.size()); }
    int32_t route(std::span<const double> cells) const;  // returns leaf id
    // Node indices on the path from the root to `node`, inclusive.
    std::vector<int32_t> path_to(int32_t node) const;
};

// Greedy top-down CART induction. Numeric candidates are midpoints between
// consecutive distinct sorted values; nominal candidates are
// one-category-vs-rest. Ties in impurity decrease go to the lowest attribute
// index, then the lowest threshold/category.
Tree learn_tree(const Dataset& d, int32_t target, const TreeParams& p, uint64_t seed);

// One tree per attribute, fit independently (optionally in parallel).
std::vector<Tree> learn_ensemble(const Dataset& d, const TreeParams& p, uint64_t seed,
                                 int32_t threads = 1);

// Fills Tree::scoring_nodes: per leaf, the minimum-impurity node among the
// leaf and its ancestors, ties broken toward the deepest node.
void assign_scoring_nodes(Tree& t);

}  // namespace admercs
