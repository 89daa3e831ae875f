#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "admercs/bench.hpp"
#include "admercs/explain.hpp"
#include "admercs/model.hpp"
#include "admercs/rng.hpp"
#include "test_util.hpp"

using namespace admercs;
using testutil::make_dataset;

namespace {

bool condition_holds(const Condition& c, const Model& m, std::span<const double> cells) {
    const auto it = std::find_if(m.attributes.begin(), m.attributes.end(),
                                 [&](const AttributeMeta& a) { return a.name == c.attribute; });
    REQUIRE(it != m.attributes.end());
    const double v = cells[it->index];
    switch (c.relation) {
        case Relation::LessEq: return v <= c.threshold;
        case Relation::Greater: return v > c.threshold;
        case Relation::Equal: {
            const auto cat = static_cast<int64_t>(v);
            return cat >= 0 && it->categories[cat] == c.category;
        }
        case Relation::NotEqual: {
            const auto cat = static_cast<int64_t>(v);
            return cat < 0 || it->categories[cat] != c.category;
        }
    }
    return false;
}

// Small hand-built model: tree 0 predicts x0 from x1 with two leaves, tree 1
// is a single global leaf. Context 0 carries a high lambda.
Model toy_model() {
    Model m;
    AttributeMeta a0{"x0", AttributeKind::Numeric, {}, 0};
    AttributeMeta a1{"x1", AttributeKind::Numeric, {}, 1};
    m.attributes = {a0, a1};

    Tree t0;
    t0.target = 0;
    t0.nodes.resize(3);
    t0.nodes[0].split = Split{1, true, 0.5, {}};
    t0.nodes[0].left = 1;
    t0.nodes[0].right = 2;
    t0.nodes[0].impurity = 0.3;
    t0.nodes[0].members = {0, 1, 2, 3};
    t0.nodes[1].leaf_id = 0;
    t0.nodes[1].impurity = 0.1;
    t0.nodes[1].members = {0, 1};
    t0.nodes[1].depth = 1;
    t0.nodes[2].leaf_id = 1;
    t0.nodes[2].impurity = 0.2;
    t0.nodes[2].members = {2, 3};
    t0.nodes[2].depth = 1;
    t0.leaf_nodes = {1, 2};
    t0.scoring_nodes = {1, 2};

    Tree t1;
    t1.target = 1;
    t1.nodes.resize(1);
    t1.nodes[0].leaf_id = 0;
    t1.nodes[0].members = {0, 1, 2, 3};
    t1.leaf_nodes = {0};
    t1.scoring_nodes = {0};

    m.trees = {t0, t1};
    m.densities.resize(2);
    m.densities[0].emplace(1, fit_model(std::vector<double>{0.2, 0.25}, AttributeKind::Numeric,
                                        0.7, 1.0, 0));
    m.densities[0].emplace(2, fit_model(std::vector<double>{0.8, 0.85}, AttributeKind::Numeric,
                                        0.7, 1.0, 0));
    m.densities[1].emplace(0, fit_model(std::vector<double>{0.2, 0.25, 0.8, 0.85},
                                        AttributeKind::Numeric, 0.7, 1.0, 0));
    m.context_offsets = {0, 2};
    m.context_lambda = {0.9, 0.0, 0.0};
    m.context_lambda_final = {0.9, 0.0, 0.0};
    m.params.scoring.gamma_delta = 1.0;
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("explain");

TEST_CASE("describe_node maps edges to conditions") {
    // root -> empty
    Tree t;
    t.target = 2;
    t.nodes.resize(5);
    t.nodes[0].split = Split{0, true, 0.5, {}};
    t.nodes[0].left = 1;
    t.nodes[0].right = 2;
    t.nodes[1].split = Split{1, false, 0.0, {0}};
    t.nodes[1].left = 3;
    t.nodes[1].right = 4;
    t.nodes[1].depth = 1;
    t.nodes[3].leaf_id = 0;
    t.nodes[3].depth = 2;
    t.nodes[4].leaf_id = 1;
    t.nodes[4].depth = 2;
    t.nodes[2].leaf_id = 2;
    t.nodes[2].depth = 1;
    t.leaf_nodes = {3, 4, 2};

    AttributeMeta a0{"x", AttributeKind::Numeric, {}, 0};
    AttributeMeta a1{"c", AttributeKind::Nominal, {"a", "b"}, 1};
    AttributeMeta a2{"y", AttributeKind::Numeric, {}, 2};
    const std::vector<AttributeMeta> attrs = {a0, a1, a2};

    CHECK(describe_node(t, 0, attrs).empty());

    const auto left_left = describe_node(t, 3, attrs);
    REQUIRE(left_left.size() == 2);
    CHECK(left_left[0].attribute == "x");
    CHECK(left_left[0].relation == Relation::LessEq);
    CHECK(left_left[0].threshold == 0.5);
    CHECK(left_left[1].attribute == "c");
    CHECK(left_left[1].relation == Relation::Equal);
    CHECK(left_left[1].category == "a");

    const auto left_right = describe_node(t, 4, attrs);
    REQUIRE(left_right.size() == 2);
    CHECK(left_right[1].relation == Relation::NotEqual);
    CHECK(left_right[1].category == "a");

    const auto right = describe_node(t, 2, attrs);
    REQUIRE(right.size() == 1);
    CHECK(right[0].relation == Relation::Greater);
}

TEST_CASE("repeated numeric conditions merge into the tightest interval") {
    Condition a{"x", Relation::LessEq, 0.8, "", true};
    Condition b{"x", Relation::LessEq, 0.5, "", true};
    Condition c{"x", Relation::Greater, 0.1, "", true};
    Condition d{"x", Relation::Greater, 0.3, "", true};
    const auto merged = merge_conditions({a, b, c, d});
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].relation == Relation::LessEq);
    CHECK(merged[0].threshold == 0.5);
    CHECK(merged[1].relation == Relation::Greater);
    CHECK(merged[1].threshold == 0.3);
}

TEST_CASE("typical values of a skewed histogram keep only the common category") {
    std::vector<double> values(9, 0.0);
    values.push_back(1.0);  // {a: 9, b: 1}
    const auto m = fit_model(values, AttributeKind::Nominal, 0.7, 0.0, 2);
    CHECK(m.tau() == doctest::Approx(0.9));
    AttributeMeta attr{"c", AttributeKind::Nominal, {"a", "b"}, 0};
    const auto typical = typical_values(m, attr);
    CHECK(typical.categories == std::vector<std::string>{"a"});
}

TEST_CASE("typical values of a spike model form one tiny interval") {
    const auto m = fit_model(std::vector<double>{1.5, 1.5, 1.5}, AttributeKind::Numeric,
                             0.7, 1.0, 0);
    AttributeMeta attr{"y", AttributeKind::Numeric, {}, 0};
    const auto typical = typical_values(m, attr);
    REQUIRE(typical.intervals.size() == 1);
    CHECK(typical.intervals[0].first <= 1.5);
    CHECK(typical.intervals[0].second >= 1.5);
    CHECK(typical.intervals[0].second - typical.intervals[0].first < 1e-6);
}

TEST_CASE("typical values of a bimodal leaf exclude the gap") {
    Rng rng(3);
    std::vector<double> xs;
    for (int rep = 0; rep < 20; ++rep)
        for (double base : {1.4, 1.5, 1.6, 3.4, 3.5, 3.6})
            xs.push_back(base + rng.uniform(-0.01, 0.01));
    const auto m = fit_model(xs, AttributeKind::Numeric, 0.7, 2.2, 0);
    AttributeMeta attr{"y", AttributeKind::Numeric, {}, 0};
    const auto typical = typical_values(m, attr);
    REQUIRE(typical.intervals.size() >= 2);
    for (const auto& [lo, hi] : typical.intervals) {
        CHECK(!(lo <= 2.5 && 2.5 <= hi));
        // grid-scan oracle: interval interiors really do squash to 1
        const double mid = 0.5 * (lo + hi);
        CHECK(m.omega(mid) == 1.0);
    }
    // the two main modes are covered
    const auto covers = [&](double v) {
        return std::any_of(typical.intervals.begin(), typical.intervals.end(),
                           [&](const auto& iv) { return iv.first <= v && v <= iv.second; });
    };
    CHECK(covers(1.5));
    CHECK(covers(3.5));
}

TEST_CASE("fully typical instances produce no explanations") {
    Model m = toy_model();
    m.context_lambda = {0.0, 0.0, 0.0};
    // x1 = 0.9 routes right; x0 = 0.8 is typical there and globally
    const auto ex = explain_instance(m, std::vector<double>{0.8, 0.85}, 5);
    CHECK(ex.empty());
}

TEST_CASE("a high-lambda context dominates the explanation list") {
    const Model m = toy_model();
    // routes left in tree 0 (context 0 with lambda 0.9); values typical
    const auto ex = explain_instance(m, std::vector<double>{0.2, 0.25}, 5);
    REQUIRE(!ex.empty());
    CHECK(ex[0].kind == Explanation::Kind::AnomalousContext);
    CHECK(ex[0].lambda == doctest::Approx(0.9));
    CHECK(ex[0].strength == doctest::Approx(0.9));
    REQUIRE(ex[0].conditions.size() == 1);
    CHECK(ex[0].conditions[0].attribute == "x1");
    CHECK(ex[0].conditions[0].relation == Relation::LessEq);
}

TEST_CASE("a functional dependency violation is explained by the right tree") {
    // teeth is fully determined by eggs except for one instance
    std::vector<double> teeth, eggs;
    for (int i = 0; i < 100; ++i) {
        const double e = i % 2;
        eggs.push_back(e);
        teeth.push_back(i == 41 ? e : 1.0 - e);  // row 41 breaks the rule
    }
    auto d = make_dataset({teeth, eggs},
                          {AttributeKind::Nominal, AttributeKind::Nominal}, {2, 2});
    d.attributes[0].name = "teeth";
    d.attributes[1].name = "eggs";

    FitParams p;
    p.scoring.rho = 0.9;
    p.scoring.gamma_delta = 1.0;
    p.scoring.gamma_lambda = 1.0;
    const FitResult r = fit(d, p);

    const auto ex = explain_instance(r.model, d.row(41), 5);
    REQUIRE(!ex.empty());
    const auto teeth_ex = std::find_if(ex.begin(), ex.end(), [](const Explanation& e) {
        return e.target == "teeth";
    });
    REQUIRE(teeth_ex != ex.end());
    CHECK(teeth_ex->kind == Explanation::Kind::Deviation);
    REQUIRE(!teeth_ex->conditions.empty());
    CHECK(teeth_ex->conditions[0].attribute == "eggs");
    CHECK(teeth_ex->omega_observed < 0.1);
    // the violated row scores far above any conforming row
    for (int i = 0; i < 100; ++i) {
        if (i != 41) CHECK(r.state.delta[41] > r.state.delta[i]);
    }
}

TEST_CASE("deviation conditions route the instance to the scoring node") {
    BenchConfig cfg;
    cfg.seed = 23;
    cfg.n_instances = 400;
    const Dataset d = gen_synth_c(cfg, pattern_catalog()[6]);
    FitParams p;
    p.tree.min_samples_leaf_frac = 0.02;
    p.scoring.rho = 0.7;
    p.scoring.gamma_delta = 0.5;
    p.scoring.gamma_lambda = 0.5;
    const FitResult r = fit(d, p);

    int checked = 0;
    for (int64_t row = 0; row < d.n_rows && checked < 25; ++row) {
        if (!(*d.labels)[row]) continue;
        ++checked;
        const auto cells = d.row(row);
        const auto ex = explain_instance(r.model, cells, 0, 0.5);
        double max_strength = 0.0;
        for (const Explanation& e : ex) {
            max_strength = std::max(max_strength, e.strength);
            if (e.kind != Explanation::Kind::Deviation) continue;
            CHECK(e.omega_observed < 1.0);
            for (const Condition& c : e.conditions) CHECK(condition_holds(c, r.model, cells));
            // conditions pin down the scoring node: descending the tree while
            // they all hold must land inside the scoring node's subtree
            const Tree& tree = r.model.trees[e.tree];
            const int32_t leaf = tree.route(cells);
            const int32_t scoring = r.model.scoring_node(e.tree, leaf);
            const auto path = tree.path_to(tree.leaf_nodes[leaf]);
            CHECK(std::find(path.begin(), path.end(), scoring) != path.end());
        }
        // explanations agree with the score: max strength equals max v
        double max_v = 0.0;
        for (size_t t = 0; t < r.model.trees.size(); ++t) {
            const Tree& tree = r.model.trees[t];
            const int32_t leaf = tree.route(cells);
            const double omega =
                r.model.leaf_model(static_cast<int32_t>(t), leaf).omega(cells[tree.target]);
            const double lambda =
                r.model.context_lambda[r.model.context_id(static_cast<int32_t>(t), leaf)];
            max_v = std::max(max_v, context_evidence(lambda, omega));
        }
        if (!ex.empty()) CHECK(max_strength == doctest::Approx(max_v).epsilon(1e-9));
    }
    CHECK(checked > 0);
}

TEST_CASE("anomalous context listing is sorted and carries members") {
    Model m = toy_model();
    m.context_lambda = {0.6, 0.9, 0.2};
    const auto contexts = list_anomalous_contexts(m, 0.5);
    REQUIRE(contexts.size() == 2);
    CHECK(contexts[0].lambda == doctest::Approx(0.9));
    CHECK(contexts[0].tree == 0);
    CHECK(contexts[0].leaf == 1);
    CHECK(contexts[0].members == std::vector<int32_t>{2, 3});
    CHECK(contexts[1].lambda == doctest::Approx(0.6));
    REQUIRE(contexts[0].conditions.size() == 1);
    CHECK(contexts[0].conditions[0].relation == Relation::Greater);
}

TEST_CASE("rendering stays faithful to the condition grammar") {
    Condition num{"x", Relation::LessEq, 0.5, "", true};
    Condition cat{"c", Relation::NotEqual, 0.0, "b", false};
    CHECK(render_condition(num) == "x <= 0.5");
    CHECK(render_condition(cat) == "c != b");

    const Model m = toy_model();
    const auto ex = explain_instance(m, std::vector<double>{0.5, 0.25}, 5);
    REQUIRE(!ex.empty());
    for (const auto& e : ex) {
        const std::string text = render_text(e);
        CHECK(text.find("instances") == 0);
        if (e.kind == Explanation::Kind::Deviation) {
            CHECK(text.find("typically have") != std::string::npos);
            CHECK(text.find(e.target) != std::string::npos);
        } else {
            CHECK(text.find("anomalous context") != std::string::npos);
        }
    }
}

TEST_SUITE_END();
