#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "admercs/dataset.hpp"
#include "admercs/rng.hpp"

namespace admercs {

enum class PatternFamily { LinearBand, SineCurve, TwoClusters, Ring, Checkerboard };

// A 2D pattern with support inside the unit square. Normal points sit within
// 2 * noise_width of the noiseless pattern set; anomalies are kept at least
// 3 * noise_width away from it while matching both marginals, which keeps
// them invisible to any single-attribute view.
struct PatternSpec {
    PatternFamily family = PatternFamily::LinearBand;
    std::string name;
    double noise_width = 0.02;
    // LinearBand: y = slope * x + intercept over x in [0.05, 0.95]
    double slope = 0.0, intercept = 0.0;
    // SineCurve: y = 0.5 + amplitude * sin(2 pi frequency x + phase)
    double amplitude = 0.0, frequency = 0.0, phase = 0.0;
    // TwoClusters: isotropic Gaussians of sigma = noise_width
    double c1x = 0.0, c1y = 0.0, c2x = 0.0, c2y = 0.0;
    // Ring: radius around (center_x, center_y)
    double center_x = 0.0, center_y = 0.0, radius = 0.0;
    // Checkerboard: k x k grid, black cells where (i + j + grid_phase) % 2 == 0
    int32_t grid_k = 2, grid_phase = 0;
};

// 30 fixed patterns: 6 parameterizations of each of the 5 families.
const std::vector<PatternSpec>& pattern_catalog();

struct BenchConfig {
    uint64_t seed = 1;
    int64_t n_instances = 1000;
    double contamination = 0.05;
    int32_t dims = 10;  // Synth-C&S only, in {10, ..., 100}
};

// Euclidean distance from (x, y) to the noiseless pattern set.
double pattern_distance(const PatternSpec& spec, double x, double y);

// A pattern-conforming point (manifold plus truncated noise).
void sample_pattern_point(const PatternSpec& spec, Rng& rng, double& x, double& y);

// 2 numeric attributes, labeled; anomalies off-pattern but marginally typical.
Dataset gen_synth_c(const BenchConfig& cfg, const PatternSpec& spec);

// dims attributes: 5 disjoint pattern subspaces on attributes 0..9 plus
// dims - 10 uniform noise attributes. Each anomaly violates exactly one
// subspace, round-robin.
Dataset gen_synth_cs(const BenchConfig& cfg);

struct SynthIInfo {
    std::vector<int64_t> accidental_inliers;  // rows labeled anomalous yet on-pattern
    int32_t n_clusters = 0;
    std::string pattern;
    int32_t anomalous_cluster = 0;
};

// 4 numeric attributes: a pattern subspace (x0, x1) and a clustered subspace
// (x2, x3) with one anomalous cluster; ~80% of its members break the pattern,
// the rest are accidental inliers (on-pattern, labeled anomalous).
Dataset gen_synth_i(const BenchConfig& cfg, SynthIInfo* info = nullptr);

// Appends factor * M i.i.d. uniform [0,1] attributes; labels unchanged.
Dataset augment_hd(const Dataset& d, int32_t factor, uint64_t seed);

// 10-bin marginal histogram score (sum of negative log bin frequencies):
// a sanity probe that sees only single-attribute distributions.
std::vector<double> marginal_histogram_probe(const Dataset& d, int32_t bins = 10);

enum class BenchFamily { SynthC, SynthCS, SynthI };

// Writes `count` labeled CSVs plus JSON sidecars into out_dir and returns the
// CSV paths. Deterministic per (family, base_seed); same seed gives
// byte-identical files.
std::vector<std::string> gen_suite(BenchFamily family, int32_t count, uint64_t base_seed,
                                   const std::string& out_dir, int32_t threads = 1);

}  // namespace admercs
