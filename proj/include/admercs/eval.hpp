#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace admercs {

struct EvalResult {
    double auc = 0.0;
    double ap = 0.0;
    int64_t n_pos = 0;
    int64_t n_neg = 0;
};

// Mann-Whitney AUC: ties between a positive and a negative score earn half
// credit. Throws when either class is absent.
double auc_roc(std::span<const double> scores, std::span<const uint8_t> labels);

// Area under the precision-recall staircase in descending score order. Ties
// keep stable input order; `tie_warning`, when given, is set if a tie group
// mixes positives and negatives (the value then depends on input order).
double average_precision(std::span<const double> scores, std::span<const uint8_t> labels,
                         bool* tie_warning = nullptr);

EvalResult evaluate(std::span<const double> scores, std::span<const uint8_t> labels);

struct ExperimentParams {
    std::string preset;       // resolved by the caller into fit params
    std::string params_text;  // canonical text of the resolved parameters
    int32_t threads = 1;
};

struct ExperimentRow {
    std::string dataset;
    double auc = 0.0;
    double ap = 0.0;
    int64_t wall_time_ms = 0;
    std::string error;  // empty on success
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::string params_hash;
    double mean_auc = 0.0;
    double mean_ap = 0.0;
};

// FNV-1a over the canonical parameter text, hex-encoded.
std::string hash_params(const std::string& params_text);

// Writes rows plus a trailing AGGREGATE line as tab-separated text.
void write_report(const ExperimentReport& r, const std::string& path);

}  // namespace admercs
