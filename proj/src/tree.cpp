#include "admercs/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "admercs/parallel.hpp"

namespace admercs {

namespace {

constexpr double kPurityEps = 1e-15;
constexpr double kTieEps = 1e-12;

// Population variance of the target over `rows`.
double variance_impurity(const Dataset& d, int32_t target, std::span<const int32_t> rows) {
    const int64_t n = static_cast<int64_t>(rows.size());
    if (n == 0) return 0.0;
    double sum = 0.0, sumsq = 0.0;
    for (int32_t r : rows) {
        const double y = d.cell(r, target);
        sum += y;
        sumsq += y * y;
    }
    const double mean = sum / n;
    return std::max(0.0, sumsq / n - mean * mean);
}

double gini_from_counts(std::span<const int64_t> counts, int64_t n) {
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (int64_t c : counts) {
        const double p = static_cast<double>(c) / n;
        sq += p * p;
    }
    return std::max(0.0, 1.0 - sq);
}

double gini_impurity(const Dataset& d, int32_t target, std::span<const int32_t> rows) {
    const int32_t k = static_cast<int32_t>(d.attributes[target].categories.size());
    std::vector<int64_t> counts(k, 0);
    for (int32_t r : rows) counts[static_cast<int32_t>(d.cell(r, target))]++;
    return gini_from_counts(counts, rows.size());
}

double node_impurity(const Dataset& d, int32_t target, std::span<const int32_t> rows) {
    return d.is_numeric(target) ? variance_impurity(d, target, rows)
                                : gini_impurity(d, target, rows);
}

struct Candidate {
    bool found = false;
    double decrease = 0.0;
    int32_t attribute = -1;
    bool numeric = true;
    double threshold = 0.0;
    int32_t left_category = -1;
    int64_t n_left = 0;
};

// Candidates are scanned with attributes ascending and thresholds/categories
// ascending, so on ties the earliest candidate is kept.
void consider(Candidate& best, double decrease, int32_t attr, bool numeric,
              double threshold, int32_t left_category, int64_t n_left) {
    if (!best.found || decrease > best.decrease + kTieEps) {
        best = {true, decrease, attr, numeric, threshold, left_category, n_left};
    }
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& d, int32_t target, const TreeParams& p)
        : d_(d), target_(target), params_(p) {
        min_leaf_ = std::max<int64_t>(
            1, static_cast<int64_t>(std::ceil(p.min_samples_leaf_frac * d.n_rows)));
        numeric_target_ = d.is_numeric(target);
        if (!numeric_target_)
            n_classes_ = static_cast<int32_t>(d.attributes[target].categories.size());
    }

    Tree build() {
        Tree t;
        t.target = target_;
        std::vector<int32_t> all(d_.n_rows);
        std::iota(all.begin(), all.end(), 0);
        t.nodes.emplace_back();
        t.nodes[0].depth = 0;
        t.nodes[0].members = std::move(all);
        t.nodes[0].impurity = node_impurity(d_, target_, t.nodes[0].members);
        grow(t, 0);
        for (int32_t i = 0; i < static_cast<int32_t>(t.nodes.size()); ++i) {
            if (t.nodes[i].is_leaf()) {
                t.nodes[i].leaf_id = static_cast<int32_t>(t.leaf_nodes.size());
                t.leaf_nodes.push_back(i);
            }
        }
        assign_scoring_nodes(t);
        return t;
    }

private:
    void grow(Tree& t, int32_t node_idx) {
        // Note: t.nodes may reallocate; re-index instead of holding references.
        const int32_t depth = t.nodes[node_idx].depth;
        const double impurity = t.nodes[node_idx].impurity;
        const int64_t n = static_cast<int64_t>(t.nodes[node_idx].members.size());
        if (depth >= params_.max_depth || impurity <= kPurityEps || n < 2 * min_leaf_)
            return;

        const Candidate best = best_split(t.nodes[node_idx].members, impurity);
        if (!best.found || best.decrease < params_.min_impurity_decrease) return;

        Split split;
        split.attribute = best.attribute;
        split.numeric = best.numeric;
        if (best.numeric) {
            split.threshold = best.threshold;
        } else {
            split.left_categories = {best.left_category};
        }

        std::vector<int32_t> left_rows, right_rows;
        left_rows.reserve(best.n_left);
        right_rows.reserve(n - best.n_left);
        for (int32_t r : t.nodes[node_idx].members) {
            (split.goes_left(d_.cell(r, best.attribute)) ? left_rows : right_rows)
                .push_back(r);
        }

        const int32_t left_idx = static_cast<int32_t>(t.nodes.size());
        t.nodes.emplace_back();
        const int32_t right_idx = static_cast<int32_t>(t.nodes.size());
        t.nodes.emplace_back();

        t.nodes[left_idx].depth = depth + 1;
        t.nodes[left_idx].members = std::move(left_rows);
        t.nodes[left_idx].impurity = node_impurity(d_, target_, t.nodes[left_idx].members);
        t.nodes[right_idx].depth = depth + 1;
        t.nodes[right_idx].members = std::move(right_rows);
        t.nodes[right_idx].impurity = node_impurity(d_, target_, t.nodes[right_idx].members);

        t.nodes[node_idx].split = std::move(split);
        t.nodes[node_idx].left = left_idx;
        t.nodes[node_idx].right = right_idx;

        grow(t, left_idx);
        grow(t, right_idx);
    }

    Candidate best_split(const std::vector<int32_t>& rows, double parent_impurity) {
        Candidate best;
        for (int32_t a = 0; a < d_.n_cols(); ++a) {
            if (a == target_) continue;
            if (d_.is_numeric(a)) {
                scan_numeric_attribute(rows, parent_impurity, a, best);
            } else {
                scan_nominal_attribute(rows, parent_impurity, a, best);
            }
        }
        return best;
    }

    void scan_numeric_attribute(const std::vector<int32_t>& rows, double parent_impurity,
                                int32_t attr, Candidate& best) {
        const int64_t n = static_cast<int64_t>(rows.size());
        std::vector<std::pair<double, double>> vt;  // (attr value, target value)
        vt.reserve(n);
        for (int32_t r : rows) vt.emplace_back(d_.cell(r, attr), d_.cell(r, target_));
        std::sort(vt.begin(), vt.end());

        if (numeric_target_) {
            double total = 0.0, totalsq = 0.0;
            for (auto& [v, y] : vt) {
                total += y;
                totalsq += y * y;
            }
            double sum_l = 0.0, sumsq_l = 0.0;
            for (int64_t i = 0; i < n - 1; ++i) {
                const double y = vt[i].second;
                sum_l += y;
                sumsq_l += y * y;
                if (vt[i].first == vt[i + 1].first) continue;
                const int64_t nl = i + 1, nr = n - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double dec = variance_decrease(parent_impurity, sum_l, sumsq_l, nl,
                                                     total - sum_l, totalsq - sumsq_l, nr);
                consider(best, dec, attr, true,
                         midpoint(vt[i].first, vt[i + 1].first), -1, nl);
            }
        } else {
            std::vector<int64_t> total(n_classes_, 0), left(n_classes_, 0);
            for (auto& [v, y] : vt) total[static_cast<int32_t>(y)]++;
            std::vector<int64_t> right = total;
            for (int64_t i = 0; i < n - 1; ++i) {
                const int32_t cls = static_cast<int32_t>(vt[i].second);
                left[cls]++;
                right[cls]--;
                if (vt[i].first == vt[i + 1].first) continue;
                const int64_t nl = i + 1, nr = n - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double dec = gini_decrease(parent_impurity, left, nl, right, nr);
                consider(best, dec, attr, true,
                         midpoint(vt[i].first, vt[i + 1].first), -1, nl);
            }
        }
    }

    void scan_nominal_attribute(const std::vector<int32_t>& rows, double parent_impurity,
                                int32_t attr, Candidate& best) {
        const int64_t n = static_cast<int64_t>(rows.size());
        const int32_t n_cats = static_cast<int32_t>(d_.attributes[attr].categories.size());

        if (numeric_target_) {
            std::vector<int64_t> cat_n(n_cats, 0);
            std::vector<double> cat_sum(n_cats, 0.0), cat_sumsq(n_cats, 0.0);
            double total = 0.0, totalsq = 0.0;
            for (int32_t r : rows) {
                const int32_t c = static_cast<int32_t>(d_.cell(r, attr));
                const double y = d_.cell(r, target_);
                cat_n[c]++;
                cat_sum[c] += y;
                cat_sumsq[c] += y * y;
                total += y;
                totalsq += y * y;
            }
            for (int32_t c = 0; c < n_cats; ++c) {
                const int64_t nl = cat_n[c], nr = n - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double dec =
                    variance_decrease(parent_impurity, cat_sum[c], cat_sumsq[c], nl,
                                      total - cat_sum[c], totalsq - cat_sumsq[c], nr);
                consider(best, dec, attr, false, 0.0, c, nl);
            }
        } else {
            std::vector<int64_t> counts(static_cast<size_t>(n_cats) * n_classes_, 0);
            std::vector<int64_t> total(n_classes_, 0);
            for (int32_t r : rows) {
                const int32_t c = static_cast<int32_t>(d_.cell(r, attr));
                const int32_t cls = static_cast<int32_t>(d_.cell(r, target_));
                counts[static_cast<size_t>(c) * n_classes_ + cls]++;
                total[cls]++;
            }
            std::vector<int64_t> left(n_classes_), right(n_classes_);
            for (int32_t c = 0; c < n_cats; ++c) {
                int64_t nl = 0;
                for (int32_t k = 0; k < n_classes_; ++k) {
                    left[k] = counts[static_cast<size_t>(c) * n_classes_ + k];
                    right[k] = total[k] - left[k];
                    nl += left[k];
                }
                const int64_t nr = n - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double dec = gini_decrease(parent_impurity, left, nl, right, nr);
                consider(best, dec, attr, false, 0.0, c, nl);
            }
        }
    }

    static double midpoint(double a, double b) { return a + 0.5 * (b - a); }

    static double variance_decrease(double parent, double sum_l, double sumsq_l, int64_t nl,
                                    double sum_r, double sumsq_r, int64_t nr) {
        const int64_t n = nl + nr;
        const double mean_l = sum_l / nl, mean_r = sum_r / nr;
        const double var_l = std::max(0.0, sumsq_l / nl - mean_l * mean_l);
        const double var_r = std::max(0.0, sumsq_r / nr - mean_r * mean_r);
        return parent - (static_cast<double>(nl) / n) * var_l -
               (static_cast<double>(nr) / n) * var_r;
    }

    static double gini_decrease(double parent, std::span<const int64_t> left, int64_t nl,
                                std::span<const int64_t> right, int64_t nr) {
        const int64_t n = nl + nr;
        return parent - (static_cast<double>(nl) / n) * gini_from_counts(left, nl) -
               (static_cast<double>(nr) / n) * gini_from_counts(right, nr);
    }

    const Dataset& d_;
    int32_t target_;
    TreeParams params_;
    int64_t min_leaf_ = 1;
    bool numeric_target_ = true;
    int32_t n_classes_ = 0;
};

}  // namespace

int32_t Tree::route(std::span<const double> cells) const {
    int32_t idx = 0;
    while (!nodes[idx].is_leaf()) {
        const Split& s = *nodes[idx].split;
        idx = s.goes_left(cells[s.attribute]) ? nodes[idx].left : nodes[idx].right;
    }
    return nodes[idx].leaf_id;
}

std::vector<int32_t> Tree::path_to(int32_t node) const {
    // Parents are not stored; recover them once and walk up from `node`.
    std::vector<int32_t> parent(nodes.size(), -1);
    for (int32_t i = 0; i < static_cast<int32_t>(nodes.size()); ++i) {
        if (!nodes[i].is_leaf()) {
            parent[nodes[i].left] = i;
            parent[nodes[i].right] = i;
        }
    }
    std::vector<int32_t> path;
    for (int32_t cur = node; cur != -1; cur = parent[cur]) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
}

Tree learn_tree(const Dataset& d, int32_t target, const TreeParams& p, uint64_t seed) {
    (void)seed;  // induction is deterministic; the seed is part of the API
                 // so ensembles stay reproducible if sampling is ever added
    if (d.n_cols() < 2) throw std::invalid_argument("need at least 2 attributes");
    if (target < 0 || target >= d.n_cols()) throw std::invalid_argument("bad target index");
    if (p.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (!(p.min_samples_leaf_frac > 0.0 && p.min_samples_leaf_frac <= 0.5))
        throw std::invalid_argument("min_samples_leaf_frac must be in (0, 0.5]");
    return TreeBuilder(d, target, p).build();
}

std::vector<Tree> learn_ensemble(const Dataset& d, const TreeParams& p, uint64_t seed,
                                 int32_t threads) {
    std::vector<Tree> trees(d.n_cols());
    parallel_for(d.n_cols(), threads, [&](int64_t t) {
        trees[t] = learn_tree(d, static_cast<int32_t>(t), p, seed + t);
    });
    return trees;
}

void assign_scoring_nodes(Tree& t) {
    t.scoring_nodes.assign(t.leaf_nodes.size(), 0);
    // DFS carrying the best (lowest-impurity, deepest-on-tie) node seen so far.
    struct Frame {
        int32_t node;
        int32_t best;
    };
    std::vector<Frame> stack{{0, 0}};
    while (!stack.empty()) {
        auto [idx, best] = stack.back();
        stack.pop_back();
        if (t.nodes[idx].impurity <= t.nodes[best].impurity) best = idx;
        if (t.nodes[idx].is_leaf()) {
            t.scoring_nodes[t.nodes[idx].leaf_id] = best;
        } else {
            stack.push_back({t.nodes[idx].left, best});
            stack.push_back({t.nodes[idx].right, best});
        }
    }
}

}  // namespace admercs
