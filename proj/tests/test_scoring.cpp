#include <doctest.h>

#include <cmath>
#include <vector>

#include "admercs/rng.hpp"
#include "admercs/scoring.hpp"

using namespace admercs;

namespace {

// Hand-built index: per tree, a partition of the instances into contexts.
ContextIndex make_index(int64_t n_instances,
                        const std::vector<std::vector<std::vector<int32_t>>>& per_tree) {
    ContextIndex index;
    index.n_instances = n_instances;
    index.n_trees = static_cast<int32_t>(per_tree.size());
    index.membership.assign(n_instances * per_tree.size(), -1);
    index.omega.assign(n_instances * per_tree.size(), 1.0);
    for (int32_t t = 0; t < index.n_trees; ++t) {
        for (const auto& members : per_tree[t]) {
            const int32_t ctx = index.n_contexts();
            index.contexts.emplace_back(t, static_cast<int32_t>(index.contexts.size()));
            index.context_members.push_back(members);
            for (int32_t i : members) index.membership[i * index.n_trees + t] = ctx;
        }
    }
    return index;
}

ContextIndex random_index(Rng& rng, int64_t n, int32_t trees, int32_t contexts_per_tree) {
    std::vector<std::vector<std::vector<int32_t>>> per_tree(trees);
    for (int32_t t = 0; t < trees; ++t) {
        per_tree[t].resize(contexts_per_tree);
        for (int64_t i = 0; i < n; ++i) {
            per_tree[t][rng.uniform_int(contexts_per_tree)].push_back(
                static_cast<int32_t>(i));
        }
        // no empty contexts
        std::erase_if(per_tree[t], [](const auto& m) { return m.empty(); });
    }
    ContextIndex index = make_index(n, per_tree);
    for (double& o : index.omega) o = rng.uniform();
    return index;
}

}  // namespace

TEST_SUITE_BEGIN("scoring");

TEST_CASE("noisy_or closed forms") {
    CHECK(noisy_or(std::vector<double>{0.5, 0.5}, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(noisy_or(std::vector<double>{1.0}, 1.0) == 1.0);
    CHECK(noisy_or(std::vector<double>{0.5, 0.5}, 0.5) ==
          doctest::Approx(0.4375).epsilon(1e-12));
    CHECK(noisy_or(std::vector<double>{}, 0.7) == 0.0);
}

TEST_CASE("noisy_or is monotone in inputs, gamma, and set growth") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(6));
        std::vector<double> ps(n);
        for (double& p : ps) p = rng.uniform();
        const double gamma = 0.05 + 0.95 * rng.uniform();
        const double base = noisy_or(ps, gamma);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);

        auto bumped = ps;
        const auto k = rng.uniform_int(n);
        bumped[k] = std::min(1.0, ps[k] + rng.uniform());
        CHECK(noisy_or(bumped, gamma) >= base - 1e-12);

        CHECK(noisy_or(ps, std::min(1.0, gamma + 0.3)) >= base - 1e-12);

        auto grown = ps;
        grown.push_back(rng.uniform());
        CHECK(noisy_or(grown, gamma) >= base - 1e-12);
    }
}

TEST_CASE("context evidence blends lambda and deviation") {
    CHECK(context_evidence(0.0, 0.3) == doctest::Approx(0.7));
    CHECK(context_evidence(1.0, 0.0) == 1.0);
    CHECK(context_evidence(1.0, 1.0) == 1.0);
    CHECK(context_evidence(0.5, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("delta update degenerate cases") {
    // single tree, lambda = 0: delta = gamma * (1 - omega)
    auto index = make_index(3, {{{0, 1, 2}}});
    index.omega = {0.2, 1.0, 0.6};
    std::vector<double> lambda{0.0};
    std::vector<double> delta(3);
    update_delta(index, lambda, 0.5, delta);
    CHECK(delta[0] == doctest::Approx(0.5 * 0.8).epsilon(1e-12));
    CHECK(delta[1] == doctest::Approx(0.0));
    CHECK(delta[2] == doctest::Approx(0.5 * 0.4).epsilon(1e-12));

    // all omega = 1, all lambda = 0: delta = 0
    auto calm = make_index(4, {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}});
    std::vector<double> lam4(4, 0.0);
    std::vector<double> d4(4, 9.0);
    update_delta(calm, lam4, 1.0, d4);
    for (double v : d4) CHECK(v == 0.0);

    // all v = 1 via lambda = 1, gamma = 1: delta = 1
    std::vector<double> hot(4, 1.0);
    update_delta(calm, hot, 1.0, d4);
    for (double v : d4) CHECK(v == 1.0);
}

TEST_CASE("lambda update is a noisy-AND over members") {
    auto index = make_index(3, {{{0, 1, 2}}});
    std::vector<double> lambda(1);

    update_lambda(index, std::vector<double>{1.0, 1.0, 1.0}, 1.0, lambda);
    CHECK(lambda[0] == 1.0);
    update_lambda(index, std::vector<double>{1.0, 1.0, 0.0}, 1.0, lambda);
    CHECK(lambda[0] == 0.0);

    auto pair = make_index(2, {{{0, 1}}});
    update_lambda(pair, std::vector<double>{0.9, 0.8}, 1.0, lambda);
    CHECK(lambda[0] == doctest::Approx(0.72).epsilon(1e-12));
}

TEST_CASE("gamma_lambda = 1 reduces to the exact product of member deltas") {
    Rng rng(31);
    auto index = random_index(rng, 40, 3, 5);
    std::vector<double> delta(40);
    for (double& v : delta) v = rng.uniform();
    std::vector<double> lambda(index.n_contexts());
    update_lambda(index, delta, 1.0, lambda);
    for (int32_t j = 0; j < index.n_contexts(); ++j) {
        double prod = 1.0;
        for (int32_t i : index.context_members[j]) prod *= delta[i];
        CHECK(lambda[j] == doctest::Approx(prod).epsilon(1e-12));
    }
}

TEST_CASE("first iteration equals pure density scoring") {
    Rng rng(41);
    auto index = random_index(rng, 30, 4, 4);
    ScoringParams p;
    p.gamma_delta = 0.7;
    p.gamma_lambda = 0.9;
    p.iterations = 1;
    const ScoreState s = run_iterations(index, p);
    for (int64_t i = 0; i < 30; ++i) {
        std::vector<double> vs;
        for (int32_t t = 0; t < 4; ++t) vs.push_back(1.0 - index.omega_of(i, t));
        CHECK(s.delta[i] == doctest::Approx(noisy_or(vs, 0.7)).epsilon(1e-12));
    }
    // lambda computed once from those deltas
    std::vector<double> expect(index.n_contexts());
    update_lambda(index, s.delta, 0.9, expect);
    for (int32_t j = 0; j < index.n_contexts(); ++j)
        CHECK(s.lambda[j] == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("a pure anomalous context saturates and lifts its members") {
    // Five training instances, two trees. Tree 0 groups the two pattern
    // breakers (rows 3, 4) into their own context; both look fully anomalous
    // in tree 1 (omega = 0) and fully typical inside their shared context.
    auto index = make_index(5, {{{0, 1, 2}, {3, 4}}, {{0, 1, 2}, {3, 4}}});
    index.omega[3 * 2 + 1] = 0.0;
    index.omega[4 * 2 + 1] = 0.0;

    ScoringParams p;
    p.gamma_delta = 1.0;
    p.gamma_lambda = 1.0;

    p.iterations = 1;
    const ScoreState after1 = run_iterations(index, p);
    CHECK(after1.delta == std::vector<double>{0, 0, 0, 1, 1});
    CHECK(after1.lambda[1] == 1.0);  // tree-0 context {3,4}
    CHECK(after1.lambda[3] == 1.0);  // tree-1 context {3,4}
    CHECK(after1.lambda[0] == 0.0);
    CHECK(after1.lambda[2] == 0.0);

    p.iterations = 2;
    const ScoreState after2 = run_iterations(index, p);
    CHECK(after2.delta[3] == 1.0);
    CHECK(after2.delta[4] == 1.0);
    CHECK(after2.delta[0] == 0.0);
    // the snapshot that produced delta is the iteration-1 lambda
    CHECK(after2.lambda_scoring[1] == 1.0);

    // a member-of-record with omega = 1 everywhere cannot be lifted by the
    // training iteration itself: its own zero delta vetoes every product
    auto with_inlier = make_index(6, {{{0, 1, 2, 5}, {3, 4}}, {{0, 1, 2}, {3, 4, 5}}});
    with_inlier.omega[3 * 2 + 1] = 0.0;
    with_inlier.omega[4 * 2 + 1] = 0.0;
    const ScoreState s6 = run_iterations(with_inlier, p);
    CHECK(s6.delta[5] == 0.0);
    CHECK(s6.lambda[3] == 0.0);  // {3,4,5} product includes delta_5 = 0

    // routed against the frozen lambdas, the same instance scores 1: both
    // pattern breakers back the context it lands in
    const double v_anomalous_ctx = context_evidence(after2.lambda_scoring[1], 1.0);
    const double v_normal_ctx = context_evidence(after2.lambda_scoring[2], 1.0);
    CHECK(noisy_or(std::vector<double>{v_anomalous_ctx, v_normal_ctx}, 1.0) == 1.0);
}

TEST_CASE("inhibition limit: gamma_delta near 0 sends delta to 0") {
    Rng rng(51);
    auto index = random_index(rng, 20, 3, 3);
    ScoringParams p;
    p.gamma_delta = 1e-9;
    p.gamma_lambda = 0.5;
    p.iterations = 5;
    const ScoreState s = run_iterations(index, p);
    for (double v : s.delta) CHECK(v < 1e-6);
}

TEST_CASE("one iteration from lambda = 0 never lowers a delta") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        auto index = random_index(rng, 25, 3, 4);
        ScoringParams p;
        p.gamma_delta = 0.1 + 0.9 * rng.uniform();
        p.gamma_lambda = 0.1 + 0.9 * rng.uniform();
        p.tolerance = 0.0;
        p.iterations = 1;
        const auto s1 = run_iterations(index, p);
        p.iterations = 2;
        const auto s2 = run_iterations(index, p);
        for (int64_t i = 0; i < 25; ++i) CHECK(s2.delta[i] >= s1.delta[i] - 1e-12);
    }
}

TEST_CASE("scores stay finite and inside [0,1] for any gamma and omega") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        auto index = random_index(rng, 30, 4, 5);
        ScoringParams p;
        p.gamma_delta = trial % 2 ? 1.0 : 1e-3;
        p.gamma_lambda = trial % 3 ? 1.0 : 1e-3;
        p.iterations = 7;
        const ScoreState s = run_iterations(index, p);
        for (double v : s.delta) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        for (double v : s.lambda) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("all-typical index is a fixed point at zero") {
    auto index = make_index(8, {{{0, 1, 2, 3}, {4, 5, 6, 7}}, {{0, 2, 4, 6}, {1, 3, 5, 7}}});
    ScoringParams p;
    p.gamma_delta = 1.0;
    p.gamma_lambda = 1.0;
    p.iterations = 5;
    p.tolerance = 0.0;
    const ScoreState s = run_iterations(index, p);
    for (double v : s.delta) CHECK(v == 0.0);
    for (double v : s.lambda) CHECK(v == 0.0);
}

TEST_CASE("freeze_lambda pins every context score at zero") {
    Rng rng(81);
    auto index = random_index(rng, 20, 2, 3);
    ScoringParams p;
    p.freeze_lambda = true;
    p.iterations = 6;
    const ScoreState s = run_iterations(index, p);
    for (double v : s.lambda) CHECK(v == 0.0);
    // deltas equal the density-only scores
    for (int64_t i = 0; i < 20; ++i) {
        std::vector<double> vs;
        for (int32_t t = 0; t < 2; ++t) vs.push_back(1.0 - index.omega_of(i, t));
        CHECK(s.delta[i] == doctest::Approx(noisy_or(vs, p.gamma_delta)).epsilon(1e-12));
    }
}

TEST_SUITE_END();
