#include "admercs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace admercs {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e && std::isfinite(out);
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

std::pair<double, double> Dataset::column_range(int32_t col) const {
    if (n_rows == 0) return {0.0, 0.0};
    double lo = cell(0, col), hi = cell(0, col);
    for (int64_t r = 1; r < n_rows; ++r) {
        lo = std::min(lo, cell(r, col));
        hi = std::max(hi, cell(r, col));
    }
    return {lo, hi};
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (header.empty()) {
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        rows.push_back(std::move(fields));
    }
    if (header.empty()) throw std::runtime_error("empty file: " + path);
    if (rows.empty()) throw std::runtime_error("no data rows in: " + path);

    {
        std::unordered_map<std::string, int> seen;
        for (const auto& h : header) {
            if (++seen[h] > 1) throw std::runtime_error("duplicate column name: " + h);
        }
    }

    int32_t label_col = -1;
    if (opts.label_column) {
        auto it = std::find(header.begin(), header.end(), *opts.label_column);
        if (it == header.end())
            throw std::runtime_error("label column not found: " + *opts.label_column);
        label_col = static_cast<int32_t>(it - header.begin());
    }

    const int64_t n = static_cast<int64_t>(rows.size());
    const int32_t n_raw = static_cast<int32_t>(header.size());

    Dataset d;
    d.n_rows = n;
    for (int32_t c = 0; c < n_raw; ++c) {
        if (c == label_col) continue;
        AttributeMeta meta;
        meta.name = header[c];
        meta.index = static_cast<int32_t>(d.attributes.size());

        bool all_numeric = true;
        for (int64_t r = 0; r < n; ++r) {
            const std::string& cell = rows[r][c];
            if (cell.empty())
                throw std::runtime_error("empty cell at row " + std::to_string(r + 2) +
                                         ", column '" + header[c] + "'");
            double v;
            if (!parse_double(cell, v)) {
                all_numeric = false;
                break;
            }
        }
        auto ov = opts.schema_override.find(meta.name);
        if (ov != opts.schema_override.end()) {
            if (ov->second == AttributeKind::Numeric && !all_numeric)
                throw std::runtime_error("schema forces column '" + meta.name +
                                         "' numeric but it has non-numeric values");
            meta.kind = ov->second;
        } else {
            meta.kind = all_numeric ? AttributeKind::Numeric : AttributeKind::Nominal;
        }
        d.attributes.push_back(std::move(meta));
    }
    if (d.n_cols() < 2)
        throw std::runtime_error("need at least 2 attributes, got " +
                                 std::to_string(d.n_cols()));

    const int32_t m = d.n_cols();
    d.values.resize(n * m);
    for (int32_t c = 0, out_c = 0; c < n_raw; ++c) {
        if (c == label_col) continue;
        AttributeMeta& meta = d.attributes[out_c];
        if (meta.kind == AttributeKind::Numeric) {
            for (int64_t r = 0; r < n; ++r) {
                double v;
                if (!parse_double(rows[r][c], v))
                    throw std::runtime_error("non-numeric cell at row " + std::to_string(r + 2) +
                                             ", column '" + meta.name + "'");
                d.cell(r, out_c) = v;
            }
        } else {
            std::unordered_map<std::string, int32_t> index;
            for (int64_t r = 0; r < n; ++r) {
                const std::string& cell = rows[r][c];
                auto [it, inserted] = index.try_emplace(
                    cell, static_cast<int32_t>(meta.categories.size()));
                if (inserted) meta.categories.push_back(cell);
                d.cell(r, out_c) = static_cast<double>(it->second);
            }
        }
        ++out_c;
    }

    if (label_col >= 0) {
        std::vector<uint8_t> labels(n, 0);
        for (int64_t r = 0; r < n; ++r) {
            const std::string& cell = rows[r][label_col];
            labels[r] = std::find(opts.positive_tokens.begin(), opts.positive_tokens.end(),
                                  cell) != opts.positive_tokens.end()
                            ? 1
                            : 0;
        }
        d.labels = std::move(labels);
    }
    return d;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);

    for (int32_t c = 0; c < d.n_cols(); ++c) {
        if (c) out << ',';
        out << d.attributes[c].name;
    }
    if (d.labels) out << ",label";
    out << '\n';

    for (int64_t r = 0; r < d.n_rows; ++r) {
        for (int32_t c = 0; c < d.n_cols(); ++c) {
            if (c) out << ',';
            if (d.is_numeric(c)) {
                out << format_double(d.cell(r, c));
            } else {
                out << d.attributes[c].categories[static_cast<size_t>(d.cell(r, c))];
            }
        }
        if (d.labels) out << ',' << static_cast<int>((*d.labels)[r]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset normalize_minmax(const Dataset& d) {
    Dataset out = d;
    for (int32_t c = 0; c < d.n_cols(); ++c) {
        if (!d.is_numeric(c)) continue;
        auto [lo, hi] = d.column_range(c);
        const double range = hi - lo;
        for (int64_t r = 0; r < d.n_rows; ++r) {
            out.cell(r, c) = range > 0.0 ? (d.cell(r, c) - lo) / range : 0.0;
        }
    }
    return out;
}

std::map<std::string, AttributeKind> read_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    std::map<std::string, AttributeKind> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("schema line " + std::to_string(line_no) +
                                     ": expected name=numeric|nominal");
        std::string name = trim(line.substr(0, eq));
        std::string kind = trim(line.substr(eq + 1));
        if (kind == "numeric") {
            out[name] = AttributeKind::Numeric;
        } else if (kind == "nominal") {
            out[name] = AttributeKind::Nominal;
        } else {
            throw std::runtime_error("schema line " + std::to_string(line_no) +
                                     ": unknown kind '" + kind + "'");
        }
    }
    return out;
}

}  // namespace admercs
