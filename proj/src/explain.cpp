#include "admercs/explain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace admercs {

namespace {

constexpr int kScanPoints = 512;
// Slack for the omega == 1 predicate during interval scanning; grid points a
// hair off a sample would otherwise never reach the exact plateau.
constexpr double kTypicalSlack = 1e-9;

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Refines the omega = 1 boundary between two scan points to 1e-6 * range.
double refine_boundary(const LikelihoodModel& m, double inside, double outside,
                       double tol) {
    for (int it = 0; it < 60 && std::abs(outside - inside) > tol; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (m.omega(mid) >= 1.0 - kTypicalSlack) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    return 0.5 * (inside + outside);
}

}  // namespace

std::vector<Condition> describe_node(const Tree& t, int32_t node,
                                     std::span<const AttributeMeta> attrs) {
    std::vector<Condition> out;
    const std::vector<int32_t> path = t.path_to(node);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const TreeNode& parent = t.nodes[path[i]];
        const Split& s = *parent.split;
        const bool went_left = parent.left == path[i + 1];
        Condition c;
        c.attribute = attrs[s.attribute].name;
        c.numeric = s.numeric;
        if (s.numeric) {
            c.relation = went_left ? Relation::LessEq : Relation::Greater;
            c.threshold = s.threshold;
        } else {
            c.relation = went_left ? Relation::Equal : Relation::NotEqual;
            c.category = attrs[s.attribute].categories[s.left_categories.front()];
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Condition> merge_conditions(const std::vector<Condition>& raw) {
    std::vector<Condition> out;
    for (const Condition& c : raw) {
        if (c.numeric) {
            auto same = std::find_if(out.begin(), out.end(), [&](const Condition& o) {
                return o.numeric && o.attribute == c.attribute && o.relation == c.relation;
            });
            if (same != out.end()) {
                // Deeper conditions only tighten: keep min of <=, max of >.
                if (c.relation == Relation::LessEq) {
                    same->threshold = std::min(same->threshold, c.threshold);
                } else {
                    same->threshold = std::max(same->threshold, c.threshold);
                }
                continue;
            }
        } else {
            auto dup = std::find_if(out.begin(), out.end(), [&](const Condition& o) {
                return !o.numeric && o.attribute == c.attribute &&
                       o.relation == c.relation && o.category == c.category;
            });
            if (dup != out.end()) continue;
        }
        out.push_back(c);
    }
    return out;
}

TypicalValues typical_values(const LikelihoodModel& m, const AttributeMeta& attr) {
    TypicalValues out;
    if (m.tau() <= 0.0) {
        out.unconstrained = true;
        return out;
    }
    if (attr.kind == AttributeKind::Nominal) {
        for (size_t c = 0; c < attr.categories.size(); ++c) {
            if (m.omega(static_cast<double>(c)) >= 1.0)
                out.categories.push_back(attr.categories[c]);
        }
        return out;
    }

    const auto& kde = std::get<KdeModel>(m.density);
    const auto [lo_it, hi_it] = std::minmax_element(kde.samples.begin(), kde.samples.end());
    const double lo = *lo_it - 3.0 * kde.bandwidth;
    const double hi = *hi_it + 3.0 * kde.bandwidth;
    const double range = hi - lo;
    const double tol = 1e-6 * range;

    // Scan grid plus the sample values themselves: a spike narrower than the
    // grid spacing is still anchored by its own sample.
    std::vector<double> scan;
    scan.reserve(kScanPoints + kde.samples.size());
    for (int i = 0; i < kScanPoints; ++i)
        scan.push_back(lo + range * i / (kScanPoints - 1));
    scan.insert(scan.end(), kde.samples.begin(), kde.samples.end());
    std::sort(scan.begin(), scan.end());
    scan.erase(std::unique(scan.begin(), scan.end()), scan.end());

    bool inside = false;
    double start = lo;
    double prev = lo;
    for (size_t i = 0; i < scan.size(); ++i) {
        const double x = scan[i];
        const bool typical = m.omega(x) >= 1.0 - kTypicalSlack;
        if (typical && !inside) {
            start = i == 0 ? x : refine_boundary(m, x, prev, tol);
            inside = true;
        } else if (!typical && inside) {
            out.intervals.emplace_back(start, refine_boundary(m, prev, x, tol));
            inside = false;
        }
        prev = x;
    }
    if (inside) out.intervals.emplace_back(start, hi);
    return out;
}

std::vector<Explanation> explain_instance(const Model& m, std::span<const double> cells,
                                          int32_t top_k, double lambda_threshold) {
    std::vector<Explanation> out;
    for (size_t t = 0; t < m.trees.size(); ++t) {
        const Tree& tree = m.trees[t];
        const int32_t leaf = tree.route(cells);
        const LikelihoodModel& density = m.leaf_model(static_cast<int32_t>(t), leaf);
        const double target_value = cells[tree.target];
        const double omega = density.omega(target_value);
        const double lambda = m.context_lambda[m.context_id(static_cast<int32_t>(t), leaf)];
        const double v = context_evidence(lambda, omega);

        Explanation e;
        e.tree = static_cast<int32_t>(t);
        e.target = m.attributes[tree.target].name;
        e.strength = v;
        e.observed = target_value;
        const AttributeMeta& target_attr = m.attributes[tree.target];
        if (target_attr.kind == AttributeKind::Nominal) {
            const auto cat = static_cast<int64_t>(target_value);
            e.observed_text = cat >= 0 && cat < static_cast<int64_t>(target_attr.categories.size())
                                  ? target_attr.categories[cat]
                                  : "<unseen>";
        } else {
            e.observed_text = format_number(target_value);
        }

        if (lambda >= lambda_threshold) {
            e.kind = Explanation::Kind::AnomalousContext;
            e.lambda = lambda;
            e.conditions = merge_conditions(
                describe_node(tree, tree.leaf_nodes[leaf], m.attributes));
        } else if (omega < 1.0) {
            e.kind = Explanation::Kind::Deviation;
            e.omega_observed = omega;
            e.typical = typical_values(density, target_attr);
            e.conditions = merge_conditions(
                describe_node(tree, m.scoring_node(static_cast<int32_t>(t), leaf),
                              m.attributes));
        } else {
            continue;  // typical value in a normal context: nothing to explain
        }
        out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(), [](const Explanation& a, const Explanation& b) {
        return a.strength > b.strength;
    });
    if (top_k > 0 && static_cast<int32_t>(out.size()) > top_k) out.resize(top_k);
    return out;
}

std::vector<ContextReport> list_anomalous_contexts(const Model& m, double lambda_threshold) {
    std::vector<ContextReport> out;
    for (size_t t = 0; t < m.trees.size(); ++t) {
        const Tree& tree = m.trees[t];
        for (int32_t leaf = 0; leaf < tree.n_leaves(); ++leaf) {
            const int32_t ctx = m.context_id(static_cast<int32_t>(t), leaf);
            const double lambda = m.context_lambda[ctx];
            if (lambda < lambda_threshold) continue;
            ContextReport r;
            r.context_id = ctx;
            r.tree = static_cast<int32_t>(t);
            r.leaf = leaf;
            r.lambda = lambda;
            r.target = m.attributes[tree.target].name;
            r.conditions =
                merge_conditions(describe_node(tree, tree.leaf_nodes[leaf], m.attributes));
            r.members = tree.nodes[tree.leaf_nodes[leaf]].members;
            out.push_back(std::move(r));
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ContextReport& a, const ContextReport& b) {
                         return a.lambda > b.lambda;
                     });
    return out;
}

std::string render_condition(const Condition& c) {
    std::ostringstream os;
    os << c.attribute;
    switch (c.relation) {
        case Relation::LessEq: os << " <= " << format_number(c.threshold); break;
        case Relation::Greater: os << " > " << format_number(c.threshold); break;
        case Relation::Equal: os << " = " << c.category; break;
        case Relation::NotEqual: os << " != " << c.category; break;
    }
    return os.str();
}

std::string render_typical(const TypicalValues& t) {
    if (t.unconstrained) return "any value";
    std::ostringstream os;
    bool first = true;
    for (const auto& [lo, hi] : t.intervals) {
        if (!first) os << " or ";
        os << "[" << format_number(lo) << ", " << format_number(hi) << "]";
        first = false;
    }
    for (const auto& c : t.categories) {
        if (!first) os << " or ";
        os << c;
        first = false;
    }
    if (first) os << "(none)";
    return os.str();
}

std::string render_text(const Explanation& e) {
    std::ostringstream os;
    os << "instances";
    if (!e.conditions.empty()) {
        os << " where ";
        for (size_t i = 0; i < e.conditions.size(); ++i) {
            if (i) os << " and ";
            os << render_condition(e.conditions[i]);
        }
    }
    if (e.kind == Explanation::Kind::Deviation) {
        os << " typically have " << e.target << " in " << render_typical(e.typical)
           << " but this instance has " << e.target << " = " << e.observed_text
           << " (likelihood " << format_number(e.omega_observed) << ", strength "
           << format_number(e.strength) << ")";
    } else {
        os << " form an anomalous context (context score " << format_number(e.lambda)
           << ", strength " << format_number(e.strength) << ")";
    }
    return os.str();
}

}  // namespace admercs
