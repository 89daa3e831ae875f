#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace admercs {

enum class AttributeKind { Numeric, Nominal };

struct AttributeMeta {
    std::string name;
    AttributeKind kind = AttributeKind::Numeric;
    std::vector<std::string> categories;  // nominal only, first-appearance order
    int32_t index = 0;
};

// Columnar table of N instances x M attributes. Numeric cells hold finite
// reals, nominal cells hold category indices. Immutable after construction;
// safe to share across threads.
struct Dataset {
    std::vector<AttributeMeta> attributes;
    std::vector<double> values;  // row-major, N x M
    std::optional<std::vector<uint8_t>> labels;  // 1 = anomaly, evaluation only
    int64_t n_rows = 0;

    int32_t n_cols() const { return static_cast<int32_t>(attributes.size()); }
    double cell(int64_t row, int32_t col) const { return values[row * n_cols() + col]; }
    double& cell(int64_t row, int32_t col) { return values[row * n_cols() + col]; }
    std::span<const double> row(int64_t r) const {
        return {values.data() + r * n_cols(), static_cast<size_t>(n_cols())};
    }
    bool is_numeric(int32_t col) const { return attributes[col].kind == AttributeKind::Numeric; }

    // Min/max of a numeric column (0, 0 for empty).
    std::pair<double, double> column_range(int32_t col) const;
};

struct CsvOptions {
    std::optional<std::string> label_column;
    // Tokens in the label column counted as anomalies; everything else is normal.
    std::vector<std::string> positive_tokens = {"1", "anomaly"};
    // Per-attribute kind overrides (by column name).
    std::map<std::string, AttributeKind> schema_override;
};

// Header row names the attributes; a column is Numeric when every value in it
// parses as a finite real, Nominal otherwise (categories in first-appearance
// order). Empty cells and non-finite numerics are rejected.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

// Writes the dataset back as CSV (labels, when present, as a trailing
// "label" column of 0/1). Numeric text round-trips through load_csv exactly.
void save_csv(const Dataset& d, const std::string& path);

// Affinely maps every numeric attribute onto [0,1]; constant columns map to
// 0.0, nominal columns and labels are left alone.
Dataset normalize_minmax(const Dataset& d);

// Parses a schema override file of `name=numeric|nominal` lines.
std::map<std::string, AttributeKind> read_schema_file(const std::string& path);

}  // namespace admercs
