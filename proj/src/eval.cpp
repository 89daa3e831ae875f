#include "admercs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace admercs {

namespace {

void check_classes(std::span<const uint8_t> labels, int64_t& n_pos, int64_t& n_neg) {
    n_pos = std::count(labels.begin(), labels.end(), uint8_t{1});
    n_neg = static_cast<int64_t>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("metrics need both classes present");
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const uint8_t> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores/labels size mismatch");
    int64_t n_pos, n_neg;
    check_classes(labels, n_pos, n_neg);

    // Rank-sum formulation with average ranks over tie groups.
    const int64_t n = static_cast<int64_t>(scores.size());
    std::vector<int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int64_t a, int64_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    int64_t i = 0;
    while (i < n) {
        int64_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (int64_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(std::span<const double> scores, std::span<const uint8_t> labels,
                         bool* tie_warning) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores/labels size mismatch");
    int64_t n_pos, n_neg;
    check_classes(labels, n_pos, n_neg);

    const int64_t n = static_cast<int64_t>(scores.size());
    std::vector<int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int64_t a, int64_t b) { return scores[a] > scores[b]; });

    if (tie_warning) {
        *tie_warning = false;
        int64_t i = 0;
        while (i < n) {
            int64_t j = i;
            bool has_pos = false, has_neg = false;
            while (j < n && scores[order[j]] == scores[order[i]]) {
                (labels[order[j]] == 1 ? has_pos : has_neg) = true;
                ++j;
            }
            if (has_pos && has_neg) {
                *tie_warning = true;
                break;
            }
            i = j;
        }
    }

    double ap = 0.0;
    int64_t cum_pos = 0;
    for (int64_t k = 0; k < n; ++k) {
        if (labels[order[k]] == 1) {
            ++cum_pos;
            const double precision_at_k = static_cast<double>(cum_pos) / (k + 1);
            ap += precision_at_k / static_cast<double>(n_pos);
        }
    }
    return ap;
}

EvalResult evaluate(std::span<const double> scores, std::span<const uint8_t> labels) {
    EvalResult r;
    check_classes(labels, r.n_pos, r.n_neg);
    r.auc = auc_roc(scores, labels);
    r.ap = average_precision(scores, labels);
    return r;
}

std::string hash_params(const std::string& params_text) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : params_text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_report(const ExperimentReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "dataset\tparams_hash\tauc\tap\twall_time_ms\n";
    for (const ExperimentRow& row : r.rows) {
        out << row.dataset << '\t' << r.params_hash << '\t';
        if (row.error.empty()) {
            out << row.auc << '\t' << row.ap;
        } else {
            out << "NA\tNA";
        }
        out << '\t' << row.wall_time_ms;
        if (!row.error.empty()) out << "\t# error: " << row.error;
        out << '\n';
    }
    out << "AGGREGATE\t" << r.params_hash << '\t' << r.mean_auc << '\t' << r.mean_ap
        << "\t0\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace admercs
