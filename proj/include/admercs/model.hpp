#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "admercs/dataset.hpp"
#include "admercs/density.hpp"
#include "admercs/scoring.hpp"
#include "admercs/tree.hpp"

namespace admercs {

struct FitParams {
    TreeParams tree;
    ScoringParams scoring;
    uint64_t seed = 0;
    int32_t threads = 1;
};

// A fitted detector: one tree per attribute, a likelihood model per distinct
// scoring node, and per-context anomaly scores. context ids are tree-major:
// id = context_offsets[tree] + leaf_id.
struct Model {
    std::vector<AttributeMeta> attributes;
    std::vector<Tree> trees;
    std::vector<std::map<int32_t, LikelihoodModel>> densities;  // per tree, by node index
    std::vector<int32_t> context_offsets;
    std::vector<double> context_lambda;        // frozen snapshot used for scoring
    std::vector<double> context_lambda_final;  // last lambda of the fit iteration
    FitParams params;

    int32_t n_contexts() const;
    int32_t context_id(int32_t tree, int32_t leaf) const {
        return context_offsets[tree] + leaf;
    }
    const LikelihoodModel& leaf_model(int32_t tree, int32_t leaf) const;
    int32_t scoring_node(int32_t tree, int32_t leaf) const {
        return trees[tree].scoring_nodes[leaf];
    }
};

struct FitResult {
    Model model;
    ScoreState state;  // training delta, final and scoring-snapshot lambdas
};

// Learns the ensemble, fits scoring-node densities, precomputes the omega
// matrix and runs the score iteration on the training data.
FitResult fit(const Dataset& d, const FitParams& p);

// Exposed for tests: the context/omega view of a fitted ensemble.
ContextIndex build_context_index(const Dataset& d, const std::vector<Tree>& trees,
                                 const std::vector<std::map<int32_t, LikelihoodModel>>& densities);

// Routes the instance through every tree and combines per-context evidence
// against the frozen lambdas. `cells` must already be in model category
// encoding (see DatasetAdapter).
double score_instance(const Model& m, std::span<const double> cells);

// Re-encodes rows of a dataset into the model's category indices; categories
// the model never saw map to a sentinel that routes to the "rest" branch and
// carries zero likelihood.
class DatasetAdapter {
public:
    DatasetAdapter(const Model& m, const Dataset& d);
    std::vector<double> translate(int64_t row) const;

private:
    const Dataset& data_;
    std::vector<std::vector<int32_t>> category_remap_;  // per attr, data idx -> model idx
};

std::vector<double> score_dataset(const Model& m, const Dataset& d, int32_t threads = 1);

// Versioned JSON persistence; loading then saving is byte-identical and a
// saved model reproduces training scores exactly.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace admercs
