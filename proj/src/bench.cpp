#include "admercs/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "admercs/parallel.hpp"

namespace admercs {

namespace {

constexpr int kMaxRejectionTries = 10000;
constexpr double kNoiseCut = 2.0;       // normals stay within 2 * noise_width
constexpr double kAnomalyMargin = 3.0;  // anomalies stay beyond 3 * noise_width
constexpr int kMarginalBins = 10;
constexpr double kMarginalFloor = 0.35; // accept bins holding >= 35% of the
                                        // uniform per-bin share of normals

PatternSpec linear(const std::string& name, double slope, double intercept, double w) {
    PatternSpec s;
    s.family = PatternFamily::LinearBand;
    s.name = name;
    s.slope = slope;
    s.intercept = intercept;
    s.noise_width = w;
    return s;
}

PatternSpec sine(const std::string& name, double a, double f, double phase, double w) {
    PatternSpec s;
    s.family = PatternFamily::SineCurve;
    s.name = name;
    s.amplitude = a;
    s.frequency = f;
    s.phase = phase;
    s.noise_width = w;
    return s;
}

PatternSpec clusters(const std::string& name, double c1x, double c1y, double c2x,
                     double c2y, double w) {
    PatternSpec s;
    s.family = PatternFamily::TwoClusters;
    s.name = name;
    s.c1x = c1x;
    s.c1y = c1y;
    s.c2x = c2x;
    s.c2y = c2y;
    s.noise_width = w;
    return s;
}

PatternSpec ring(const std::string& name, double cx, double cy, double r, double w) {
    PatternSpec s;
    s.family = PatternFamily::Ring;
    s.name = name;
    s.center_x = cx;
    s.center_y = cy;
    s.radius = r;
    s.noise_width = w;
    return s;
}

PatternSpec checker(const std::string& name, int32_t k, int32_t phase, double w) {
    PatternSpec s;
    s.family = PatternFamily::Checkerboard;
    s.name = name;
    s.grid_k = k;
    s.grid_phase = phase;
    s.noise_width = w;
    return s;
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len_sq = dx * dx + dy * dy;
    double t = len_sq > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = ax + t * dx, cy = ay + t * dy;
    return std::hypot(px - cx, py - cy);
}

bool is_black_cell(const PatternSpec& s, int32_t i, int32_t j) {
    return (i + j + s.grid_phase) % 2 == 0;
}

struct MarginalFilter {
    double lo[2], hi[2];
    int64_t counts[2][kMarginalBins];
    int64_t floor_count;

    MarginalFilter(const std::vector<double>& xs, const std::vector<double>& ys) {
        const std::vector<double>* cols[2] = {&xs, &ys};
        for (int c = 0; c < 2; ++c) {
            const auto [mn, mx] = std::minmax_element(cols[c]->begin(), cols[c]->end());
            lo[c] = *mn;
            hi[c] = *mx;
            std::fill(counts[c], counts[c] + kMarginalBins, 0);
            for (double v : *cols[c]) counts[c][bin(c, v)]++;
        }
        floor_count = static_cast<int64_t>(
            kMarginalFloor * static_cast<double>(xs.size()) / kMarginalBins);
    }

    int bin(int c, double v) const {
        const double span = hi[c] - lo[c];
        if (span <= 0.0) return 0;
        auto b = static_cast<int64_t>((v - lo[c]) / span * kMarginalBins);
        return static_cast<int>(std::clamp<int64_t>(b, 0, kMarginalBins - 1));
    }

    bool accepts(double x, double y) const {
        if (x < lo[0] || x > hi[0] || y < lo[1] || y > hi[1]) return false;
        return counts[0][bin(0, x)] >= floor_count && counts[1][bin(1, y)] >= floor_count;
    }
};

// Off-pattern but marginally plausible point: coordinates are resampled
// independently from the normals' empirical marginals (breaking the joint
// pattern while keeping each marginal distribution intact), then filtered by
// pattern distance and marginal bin density.
void place_anomaly(const PatternSpec& spec, Rng& rng, const std::vector<double>& norm_x,
                   const std::vector<double>& norm_y, const MarginalFilter& filter,
                   double& out_x, double& out_y) {
    const double jitter = 0.5 * spec.noise_width;
    for (int attempt = 0; attempt < kMaxRejectionTries; ++attempt) {
        const double x = std::clamp(
            norm_x[rng.uniform_int(norm_x.size())] + rng.normal(0.0, jitter), 0.0, 1.0);
        const double y = std::clamp(
            norm_y[rng.uniform_int(norm_y.size())] + rng.normal(0.0, jitter), 0.0, 1.0);
        if (pattern_distance(spec, x, y) < kAnomalyMargin * spec.noise_width) continue;
        if (!filter.accepts(x, y)) continue;
        out_x = x;
        out_y = y;
        return;
    }
    throw std::runtime_error("anomaly placement failed for pattern '" + spec.name +
                             "': pattern covers the marginally-typical region; "
                             "try different family parameters");
}

Dataset assemble(std::vector<std::string> names, std::vector<std::vector<double>> cols,
                 std::vector<uint8_t> labels, Rng& rng) {
    const int64_t n = static_cast<int64_t>(labels.size());
    const int32_t m = static_cast<int32_t>(cols.size());

    std::vector<int64_t> order(n);
    for (int64_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    Dataset d;
    d.n_rows = n;
    for (int32_t c = 0; c < m; ++c) {
        AttributeMeta meta;
        meta.name = std::move(names[c]);
        meta.kind = AttributeKind::Numeric;
        meta.index = c;
        d.attributes.push_back(std::move(meta));
    }
    d.values.resize(n * m);
    std::vector<uint8_t> shuffled_labels(n);
    for (int64_t r = 0; r < n; ++r) {
        for (int32_t c = 0; c < m; ++c) d.cell(r, c) = cols[c][order[r]];
        shuffled_labels[r] = labels[order[r]];
    }
    d.labels = std::move(shuffled_labels);
    return d;
}

}  // namespace

const std::vector<PatternSpec>& pattern_catalog() {
    static const std::vector<PatternSpec> catalog = {
        linear("line-up", 0.8, 0.1, 0.025),
        linear("line-down", -0.8, 0.9, 0.025),
        linear("line-up-wide", 0.8, 0.1, 0.04),
        linear("line-down-wide", -0.8, 0.9, 0.04),
        linear("line-shallow", 0.5, 0.3, 0.03),
        linear("line-steep", -0.5, 0.65, 0.03),

        sine("sine-1", 0.3, 1.0, 0.0, 0.025),
        sine("sine-1-flip", 0.3, 1.0, M_PI, 0.025),
        sine("sine-2", 0.25, 2.0, 0.0, 0.02),
        sine("sine-2-shift", 0.25, 2.0, M_PI / 2.0, 0.02),
        sine("sine-wide", 0.35, 1.0, M_PI / 2.0, 0.03),
        sine("sine-3", 0.2, 3.0, 0.0, 0.02),

        clusters("clusters-anti", 0.2, 0.8, 0.8, 0.2, 0.05),
        clusters("clusters-diag", 0.25, 0.25, 0.75, 0.75, 0.05),
        clusters("clusters-anti-tight", 0.3, 0.7, 0.7, 0.3, 0.04),
        clusters("clusters-diag-tight", 0.2, 0.2, 0.8, 0.8, 0.04),
        clusters("clusters-anti-wide", 0.25, 0.75, 0.75, 0.25, 0.06),
        clusters("clusters-diag-wide", 0.3, 0.3, 0.7, 0.7, 0.06),

        ring("ring", 0.5, 0.5, 0.3, 0.02),
        ring("ring-small", 0.5, 0.5, 0.25, 0.025),
        ring("ring-large", 0.5, 0.5, 0.35, 0.02),
        ring("ring-off", 0.45, 0.45, 0.3, 0.02),
        ring("ring-thick", 0.5, 0.5, 0.28, 0.03),
        ring("ring-mid", 0.5, 0.5, 0.32, 0.025),

        checker("checker-2", 2, 0, 0.02),
        checker("checker-2-flip", 2, 1, 0.02),
        checker("checker-4", 4, 0, 0.02),
        checker("checker-4-flip", 4, 1, 0.02),
        checker("checker-4-wide", 4, 0, 0.03),
        checker("checker-2-wide", 2, 0, 0.03),
    };
    return catalog;
}

double pattern_distance(const PatternSpec& s, double x, double y) {
    switch (s.family) {
        case PatternFamily::LinearBand: {
            const double x0 = 0.05, x1 = 0.95;
            return segment_distance(x, y, x0, s.slope * x0 + s.intercept, x1,
                                    s.slope * x1 + s.intercept);
        }
        case PatternFamily::SineCurve: {
            double best = 1e9;
            const int n = 256;
            for (int i = 0; i <= n; ++i) {
                const double cx = 0.05 + 0.9 * i / n;
                const double cy =
                    0.5 + s.amplitude * std::sin(2.0 * M_PI * s.frequency * cx + s.phase);
                best = std::min(best, std::hypot(x - cx, y - cy));
            }
            return best;
        }
        case PatternFamily::TwoClusters:
            return std::min(std::hypot(x - s.c1x, y - s.c1y),
                            std::hypot(x - s.c2x, y - s.c2y));
        case PatternFamily::Ring:
            return std::abs(std::hypot(x - s.center_x, y - s.center_y) - s.radius);
        case PatternFamily::Checkerboard: {
            double best = 1e9;
            const double cell = 1.0 / s.grid_k;
            for (int32_t i = 0; i < s.grid_k; ++i) {
                for (int32_t j = 0; j < s.grid_k; ++j) {
                    if (!is_black_cell(s, i, j)) continue;
                    const double dx =
                        std::max({0.0, i * cell - x, x - (i + 1) * cell});
                    const double dy =
                        std::max({0.0, j * cell - y, y - (j + 1) * cell});
                    best = std::min(best, std::hypot(dx, dy));
                }
            }
            return best;
        }
    }
    return 0.0;
}

void sample_pattern_point(const PatternSpec& s, Rng& rng, double& x, double& y) {
    switch (s.family) {
        case PatternFamily::LinearBand:
            x = rng.uniform(0.05, 0.95);
            y = s.slope * x + s.intercept + rng.truncated_normal(0.0, s.noise_width, kNoiseCut);
            break;
        case PatternFamily::SineCurve:
            x = rng.uniform(0.05, 0.95);
            y = 0.5 + s.amplitude * std::sin(2.0 * M_PI * s.frequency * x + s.phase) +
                rng.truncated_normal(0.0, s.noise_width, kNoiseCut);
            break;
        case PatternFamily::TwoClusters: {
            const bool first = rng.uniform() < 0.5;
            const double cx = first ? s.c1x : s.c2x;
            const double cy = first ? s.c1y : s.c2y;
            // radial truncation keeps every point within 2 sigma of a center
            double dx, dy;
            do {
                dx = rng.normal(0.0, s.noise_width);
                dy = rng.normal(0.0, s.noise_width);
            } while (std::hypot(dx, dy) > kNoiseCut * s.noise_width);
            x = cx + dx;
            y = cy + dy;
            break;
        }
        case PatternFamily::Ring: {
            const double theta = rng.uniform(0.0, 2.0 * M_PI);
            const double rad = s.radius + rng.truncated_normal(0.0, s.noise_width, kNoiseCut);
            x = s.center_x + rad * std::cos(theta);
            y = s.center_y + rad * std::sin(theta);
            break;
        }
        case PatternFamily::Checkerboard: {
            const double cell = 1.0 / s.grid_k;
            int32_t i, j;
            do {
                i = static_cast<int32_t>(rng.uniform_int(s.grid_k));
                j = static_cast<int32_t>(rng.uniform_int(s.grid_k));
            } while (!is_black_cell(s, i, j));
            x = (i + rng.uniform()) * cell;
            y = (j + rng.uniform()) * cell;
            break;
        }
    }
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
}

Dataset gen_synth_c(const BenchConfig& cfg, const PatternSpec& spec) {
    if (!(cfg.contamination > 0.0 && cfg.contamination < 0.5))
        throw std::invalid_argument("contamination must be in (0, 0.5)");
    Rng rng(cfg.seed);
    const int64_t n = cfg.n_instances;
    const auto n_anom = static_cast<int64_t>(std::llround(cfg.contamination * n));
    const int64_t n_norm = n - n_anom;

    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    for (int64_t i = 0; i < n_norm; ++i) {
        double x, y;
        sample_pattern_point(spec, rng, x, y);
        xs.push_back(x);
        ys.push_back(y);
    }
    const MarginalFilter filter(xs, ys);
    std::vector<uint8_t> labels(n_norm, 0);
    for (int64_t i = 0; i < n_anom; ++i) {
        double x, y;
        place_anomaly(spec, rng, xs, ys, filter, x, y);
        xs.push_back(x);
        ys.push_back(y);
        labels.push_back(1);
    }
    return assemble({"x0", "x1"}, {std::move(xs), std::move(ys)}, std::move(labels), rng);
}

Dataset gen_synth_cs(const BenchConfig& cfg) {
    if (cfg.dims < 10) throw std::invalid_argument("synth-cs needs dims >= 10");
    if (!(cfg.contamination > 0.0 && cfg.contamination < 0.5))
        throw std::invalid_argument("contamination must be in (0, 0.5)");
    Rng rng(cfg.seed);
    const int64_t n = cfg.n_instances;
    const auto n_anom = static_cast<int64_t>(std::llround(cfg.contamination * n));
    const int64_t n_norm = n - n_anom;
    const auto& catalog = pattern_catalog();

    std::vector<PatternSpec> specs(5);
    for (int s = 0; s < 5; ++s)
        specs[s] = catalog[(cfg.seed * 5 + s) % catalog.size()];

    std::vector<std::vector<double>> cols(cfg.dims, std::vector<double>());
    for (auto& c : cols) c.reserve(n);

    // Conforming points everywhere first; anomalies then overwrite exactly
    // one subspace each, round-robin.
    for (int64_t i = 0; i < n; ++i) {
        for (int s = 0; s < 5; ++s) {
            double x, y;
            sample_pattern_point(specs[s], rng, x, y);
            cols[2 * s].push_back(x);
            cols[2 * s + 1].push_back(y);
        }
        for (int32_t c = 10; c < cfg.dims; ++c) cols[c].push_back(rng.uniform());
    }

    std::vector<uint8_t> labels(n, 0);
    for (int64_t a = 0; a < n_anom; ++a) {
        const int s = static_cast<int>(a % 5);
        const int64_t row = n_norm + a;
        std::vector<double> norm_x(cols[2 * s].begin(), cols[2 * s].begin() + n_norm);
        std::vector<double> norm_y(cols[2 * s + 1].begin(), cols[2 * s + 1].begin() + n_norm);
        const MarginalFilter filter(norm_x, norm_y);
        double x, y;
        place_anomaly(specs[s], rng, norm_x, norm_y, filter, x, y);
        cols[2 * s][row] = x;
        cols[2 * s + 1][row] = y;
        labels[row] = 1;
    }

    std::vector<std::string> names(cfg.dims);
    for (int32_t c = 0; c < cfg.dims; ++c) names[c] = "x" + std::to_string(c);
    return assemble(std::move(names), std::move(cols), std::move(labels), rng);
}

namespace {

// Cluster layouts with pairwise-distinct coordinates on both axes, so a
// single-attribute split can separate any cluster from the rest.
const std::vector<std::vector<std::pair<double, double>>>& cluster_layouts() {
    static const std::vector<std::vector<std::pair<double, double>>> layouts = {
        {{0.2, 0.35}, {0.5, 0.7}, {0.8, 0.15}},
        {{0.15, 0.3}, {0.4, 0.65}, {0.65, 0.15}, {0.85, 0.8}},
        {{0.15, 0.3}, {0.35, 0.65}, {0.5, 0.1}, {0.7, 0.85}, {0.88, 0.45}},
    };
    return layouts;
}

}  // namespace

Dataset gen_synth_i(const BenchConfig& cfg, SynthIInfo* info) {
    if (!(cfg.contamination > 0.0 && cfg.contamination < 0.5))
        throw std::invalid_argument("contamination must be in (0, 0.5)");
    Rng rng(cfg.seed);
    const int64_t n = cfg.n_instances;
    const auto n_anom = static_cast<int64_t>(std::llround(cfg.contamination * n));
    const auto n_inlier = static_cast<int64_t>(std::llround(0.2 * n_anom));
    const int64_t n_outlier = n_anom - n_inlier;
    const int64_t n_norm = n - n_anom;

    const auto& catalog = pattern_catalog();
    const PatternSpec spec = catalog[cfg.seed % catalog.size()];
    const auto& layouts = cluster_layouts();
    const auto& centers = layouts[cfg.seed % layouts.size()];
    const auto k = static_cast<int32_t>(centers.size());
    const auto anomalous_cluster = static_cast<int32_t>(cfg.seed % k);
    const double cluster_sigma = 0.04;

    std::vector<double> x0, x1, x2, x3;
    std::vector<uint8_t> labels;
    std::vector<uint8_t> inlier_flag;  // parallel to rows before shuffling

    auto push_cluster_point = [&](int32_t cluster) {
        x2.push_back(centers[cluster].first +
                     rng.truncated_normal(0.0, cluster_sigma, kNoiseCut));
        x3.push_back(centers[cluster].second +
                     rng.truncated_normal(0.0, cluster_sigma, kNoiseCut));
    };

    // Normals: on-pattern, spread over the normal clusters.
    int32_t normal_cluster = 0;
    for (int64_t i = 0; i < n_norm; ++i) {
        double px, py;
        sample_pattern_point(spec, rng, px, py);
        x0.push_back(px);
        x1.push_back(py);
        if (normal_cluster == anomalous_cluster) normal_cluster = (normal_cluster + 1) % k;
        push_cluster_point(normal_cluster);
        normal_cluster = (normal_cluster + 1) % k;
        labels.push_back(0);
        inlier_flag.push_back(0);
    }

    const MarginalFilter filter(x0, x1);
    const std::vector<double> norm_x(x0), norm_y(x1);

    // The anomalous cluster: mostly pattern breakers plus a few accidental
    // inliers that only their cluster membership betrays.
    for (int64_t i = 0; i < n_outlier; ++i) {
        double px, py;
        place_anomaly(spec, rng, norm_x, norm_y, filter, px, py);
        x0.push_back(px);
        x1.push_back(py);
        push_cluster_point(anomalous_cluster);
        labels.push_back(1);
        inlier_flag.push_back(0);
    }
    for (int64_t i = 0; i < n_inlier; ++i) {
        double px, py;
        sample_pattern_point(spec, rng, px, py);
        x0.push_back(px);
        x1.push_back(py);
        push_cluster_point(anomalous_cluster);
        labels.push_back(1);
        inlier_flag.push_back(1);
    }

    // Assemble with an explicit shuffle so inlier rows can be tracked.
    const int64_t total = static_cast<int64_t>(labels.size());
    std::vector<int64_t> order(total);
    for (int64_t i = 0; i < total; ++i) order[i] = i;
    rng.shuffle(order);

    Dataset d;
    d.n_rows = total;
    const char* names[4] = {"x0", "x1", "x2", "x3"};
    for (int32_t c = 0; c < 4; ++c) {
        AttributeMeta meta;
        meta.name = names[c];
        meta.kind = AttributeKind::Numeric;
        meta.index = c;
        d.attributes.push_back(std::move(meta));
    }
    d.values.resize(total * 4);
    std::vector<uint8_t> shuffled_labels(total);
    std::vector<int64_t> inlier_rows;
    const std::vector<double>* cols[4] = {&x0, &x1, &x2, &x3};
    for (int64_t r = 0; r < total; ++r) {
        for (int32_t c = 0; c < 4; ++c) d.cell(r, c) = (*cols[c])[order[r]];
        shuffled_labels[r] = labels[order[r]];
        if (inlier_flag[order[r]]) inlier_rows.push_back(r);
    }
    d.labels = std::move(shuffled_labels);

    if (info) {
        info->accidental_inliers = std::move(inlier_rows);
        info->n_clusters = k;
        info->pattern = spec.name;
        info->anomalous_cluster = anomalous_cluster;
    }
    return d;
}

Dataset augment_hd(const Dataset& d, int32_t factor, uint64_t seed) {
    if (factor < 0) throw std::invalid_argument("factor must be >= 0");
    if (factor == 0) return d;
    Rng rng(seed);
    const int32_t m = d.n_cols();
    const int32_t extra = factor * m;

    Dataset out;
    out.n_rows = d.n_rows;
    out.attributes = d.attributes;
    for (int32_t c = 0; c < extra; ++c) {
        AttributeMeta meta;
        meta.name = "u" + std::to_string(c);
        meta.kind = AttributeKind::Numeric;
        meta.index = m + c;
        out.attributes.push_back(std::move(meta));
    }
    out.values.resize(d.n_rows * (m + extra));
    for (int64_t r = 0; r < d.n_rows; ++r) {
        for (int32_t c = 0; c < m; ++c) out.cell(r, c) = d.cell(r, c);
        for (int32_t c = 0; c < extra; ++c) out.cell(r, m + c) = rng.uniform();
    }
    out.labels = d.labels;
    return out;
}

std::vector<double> marginal_histogram_probe(const Dataset& d, int32_t bins) {
    std::vector<double> scores(d.n_rows, 0.0);
    const double n = static_cast<double>(d.n_rows);
    for (int32_t c = 0; c < d.n_cols(); ++c) {
        if (d.is_numeric(c)) {
            auto [lo, hi] = d.column_range(c);
            const double span = hi - lo;
            std::vector<int64_t> counts(bins, 0);
            auto bin_of = [&](double v) {
                if (span <= 0.0) return int64_t{0};
                return std::clamp<int64_t>(
                    static_cast<int64_t>((v - lo) / span * bins), 0, bins - 1);
            };
            for (int64_t r = 0; r < d.n_rows; ++r) counts[bin_of(d.cell(r, c))]++;
            for (int64_t r = 0; r < d.n_rows; ++r) {
                const double p =
                    std::max(static_cast<double>(counts[bin_of(d.cell(r, c))]), 0.5) / n;
                scores[r] -= std::log(p);
            }
        } else {
            const auto n_cats = d.attributes[c].categories.size();
            std::vector<int64_t> counts(n_cats, 0);
            for (int64_t r = 0; r < d.n_rows; ++r)
                counts[static_cast<size_t>(d.cell(r, c))]++;
            for (int64_t r = 0; r < d.n_rows; ++r) {
                const double p =
                    std::max(static_cast<double>(counts[static_cast<size_t>(d.cell(r, c))]),
                             0.5) /
                    n;
                scores[r] -= std::log(p);
            }
        }
    }
    return scores;
}

namespace {

std::string dataset_file_name(BenchFamily family, int32_t i, int32_t dims) {
    char buf[64];
    switch (family) {
        case BenchFamily::SynthC:
            snprintf(buf, sizeof(buf), "synth-c-%03d.csv", i + 1);
            break;
        case BenchFamily::SynthCS:
            snprintf(buf, sizeof(buf), "synth-cs-%03d-d%03d.csv", i + 1, dims);
            break;
        case BenchFamily::SynthI:
            snprintf(buf, sizeof(buf), "synth-i-%03d.csv", i + 1);
            break;
    }
    return buf;
}

}  // namespace

std::vector<std::string> gen_suite(BenchFamily family, int32_t count, uint64_t base_seed,
                                   const std::string& out_dir, int32_t threads) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> paths(count);

    parallel_for(count, threads, [&](int64_t i) {
        BenchConfig cfg;
        cfg.seed = base_seed + static_cast<uint64_t>(i);
        const auto& catalog = pattern_catalog();
        nlohmann::json meta;
        meta["seed"] = cfg.seed;
        meta["n_instances"] = cfg.n_instances;
        meta["contamination"] = cfg.contamination;
        meta["noise_cut"] = kNoiseCut;
        meta["anomaly_margin"] = kAnomalyMargin;

        Dataset d;
        int32_t dims = 0;
        switch (family) {
            case BenchFamily::SynthC: {
                const PatternSpec& spec = catalog[i % catalog.size()];
                d = gen_synth_c(cfg, spec);
                meta["family"] = "synth-c";
                meta["pattern"] = spec.name;
                meta["noise_width"] = spec.noise_width;
                break;
            }
            case BenchFamily::SynthCS: {
                dims = 10 * (static_cast<int32_t>(i) / 3 % 10 + 1);
                cfg.dims = dims;
                d = gen_synth_cs(cfg);
                meta["family"] = "synth-cs";
                meta["dims"] = dims;
                nlohmann::json names = nlohmann::json::array();
                for (int s = 0; s < 5; ++s)
                    names.push_back(catalog[(cfg.seed * 5 + s) % catalog.size()].name);
                meta["patterns"] = std::move(names);
                break;
            }
            case BenchFamily::SynthI: {
                SynthIInfo info;
                d = gen_synth_i(cfg, &info);
                meta["family"] = "synth-i";
                meta["pattern"] = info.pattern;
                meta["n_clusters"] = info.n_clusters;
                meta["anomalous_cluster"] = info.anomalous_cluster;
                meta["accidental_inliers"] = info.accidental_inliers;
                break;
            }
        }

        const std::string name = dataset_file_name(family, static_cast<int32_t>(i), dims);
        const std::string csv_path = (fs::path(out_dir) / name).string();
        save_csv(d, csv_path);
        std::ofstream meta_out(csv_path.substr(0, csv_path.size() - 4) + ".meta.json",
                               std::ios::binary);
        meta_out << meta.dump(2) << '\n';
        paths[i] = csv_path;
    });
    return paths;
}

}  // namespace admercs
