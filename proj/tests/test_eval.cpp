#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "admercs/eval.hpp"
#include "admercs/rng.hpp"

using namespace admercs;

namespace {

// Exhaustive positive/negative pair oracle with half credit on ties.
double auc_pair_oracle(const std::vector<double>& s, const std::vector<uint8_t>& y) {
    double wins = 0.0;
    int64_t pairs = 0;
    for (size_t p = 0; p < s.size(); ++p) {
        if (y[p] != 1) continue;
        for (size_t n = 0; n < s.size(); ++n) {
            if (y[n] != 0) continue;
            ++pairs;
            if (s[p] > s[n]) {
                wins += 1.0;
            } else if (s[p] == s[n]) {
                wins += 0.5;
            }
        }
    }
    return wins / static_cast<double>(pairs);
}

// Precision-recall staircase oracle in stable descending order.
double ap_staircase_oracle(const std::vector<double>& s, const std::vector<uint8_t>& y) {
    std::vector<size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return s[a] > s[b]; });
    const auto n_pos = static_cast<double>(std::count(y.begin(), y.end(), uint8_t{1}));
    double ap = 0.0, tp = 0.0;
    for (size_t k = 0; k < order.size(); ++k) {
        if (y[order[k]] == 1) {
            tp += 1.0;
            ap += (tp / static_cast<double>(k + 1)) * (1.0 / n_pos);
        }
    }
    return ap;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("auc basics") {
    CHECK(auc_roc(std::vector<double>{0.9, 0.8, 0.1, 0.2},
                  std::vector<uint8_t>{1, 1, 0, 0}) == 1.0);
    CHECK(auc_roc(std::vector<double>{0.5, 0.5, 0.5, 0.5},
                  std::vector<uint8_t>{1, 0, 1, 0}) == 0.5);
    // pairs: (0.9 > 0.5) and (0.3 < 0.5) -> 1 of 2
    CHECK(auc_roc(std::vector<double>{0.9, 0.3, 0.5},
                  std::vector<uint8_t>{1, 1, 0}) == 0.5);
}

TEST_CASE("ap basics") {
    CHECK(average_precision(std::vector<double>{0.9, 0.8, 0.2, 0.1},
                            std::vector<uint8_t>{1, 1, 0, 0}) == 1.0);
    // single positive at rank 2 of 4: precision@2 = 0.5
    CHECK(average_precision(std::vector<double>{0.9, 0.8, 0.2, 0.1},
                            std::vector<uint8_t>{0, 1, 0, 0}) == 0.5);
}

TEST_CASE("random scores give AP near the contamination rate") {
    Rng rng(123);
    const int n = 2000;
    const double contamination = 0.05;
    std::vector<uint8_t> labels(n, 0);
    for (int i = 0; i < n * contamination; ++i) labels[i] = 1;

    double mean_ap = 0.0;
    const int shuffles = 100;
    for (int s = 0; s < shuffles; ++s) {
        std::vector<double> scores(n);
        for (double& v : scores) v = rng.uniform();
        mean_ap += average_precision(scores, labels);
    }
    mean_ap /= shuffles;
    CHECK(mean_ap == doctest::Approx(contamination).epsilon(0.4));
    CHECK(std::abs(mean_ap - contamination) < 0.02);
}

TEST_CASE("single-class labels are rejected") {
    CHECK_THROWS_AS(auc_roc(std::vector<double>{1.0, 2.0},
                            std::vector<uint8_t>{1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(average_precision(std::vector<double>{1.0, 2.0},
                                      std::vector<uint8_t>{0, 0}),
                    std::invalid_argument);
}

TEST_CASE("both metrics match exhaustive oracles on small inputs") {
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(11));  // up to 12
        std::vector<double> scores(n);
        std::vector<uint8_t> labels(n);
        // coarse score grid so ties actually happen
        for (double& v : scores) v = static_cast<double>(rng.uniform_int(5)) / 4.0;
        bool has_pos = false, has_neg = false;
        for (auto& l : labels) {
            l = rng.uniform() < 0.5 ? 1 : 0;
            (l ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auc_roc(scores, labels) == doctest::Approx(auc_pair_oracle(scores, labels)).epsilon(1e-12));
        CHECK(average_precision(scores, labels) ==
              doctest::Approx(ap_staircase_oracle(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("auc is invariant under strictly monotone transforms") {
    Rng rng(9);
    std::vector<double> scores(50);
    std::vector<uint8_t> labels(50);
    for (double& v : scores) v = rng.uniform();
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = i % 5 == 0 ? 1 : 0;
    const double base = auc_roc(scores, labels);
    std::vector<double> transformed = scores;
    for (double& v : transformed) v = std::exp(3.0 * v) - 7.0;
    CHECK(auc_roc(transformed, labels) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("inverted perfect ranking hits the closed-form minimum") {
    const int n_pos = 3, n_neg = 9;
    std::vector<double> scores;
    std::vector<uint8_t> labels;
    for (int i = 0; i < n_neg; ++i) {
        scores.push_back(100.0 - i);
        labels.push_back(0);
    }
    for (int i = 0; i < n_pos; ++i) {
        scores.push_back(10.0 - i);
        labels.push_back(1);
    }
    double expected = 0.0;
    for (int i = 1; i <= n_pos; ++i)
        expected += static_cast<double>(i) / (n_neg + i);
    expected /= n_pos;
    CHECK(average_precision(scores, labels) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(average_precision(scores, labels) ==
          doctest::Approx(ap_staircase_oracle(scores, labels)).epsilon(1e-12));
}

TEST_CASE("tie warning fires only when a tie group mixes classes") {
    bool warn = false;
    average_precision(std::vector<double>{0.9, 0.5, 0.5, 0.1},
                      std::vector<uint8_t>{1, 1, 0, 0}, &warn);
    CHECK(warn);
    average_precision(std::vector<double>{0.9, 0.5, 0.5, 0.1},
                      std::vector<uint8_t>{1, 0, 0, 0}, &warn);
    CHECK(!warn);
}

TEST_SUITE_END();
