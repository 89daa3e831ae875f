#pragma once

#include <string>
#include <vector>

#include "admercs/model.hpp"

namespace admercs {

enum class Relation { LessEq, Greater, Equal, NotEqual };

struct Condition {
    std::string attribute;
    Relation relation = Relation::LessEq;
    double threshold = 0.0;  // numeric relations
    std::string category;    // nominal relations
    bool numeric = true;
};

// The target values a context's likelihood model considers fully typical
// (omega = 1): maximal intervals for KDEs, category lists for histograms.
struct TypicalValues {
    std::vector<std::pair<double, double>> intervals;
    std::vector<std::string> categories;
    bool unconstrained = false;  // zero-contrast model: every value is typical
};

struct Explanation {
    enum class Kind { Deviation, AnomalousContext };
    Kind kind = Kind::Deviation;
    int32_t tree = -1;
    std::string target;
    std::vector<Condition> conditions;  // root to scoring node (Deviation) or
                                        // to the leaf (AnomalousContext)
    double observed = 0.0;
    std::string observed_text;
    TypicalValues typical;       // Deviation only
    double omega_observed = 1.0; // Deviation only, < 1
    double lambda = 0.0;         // AnomalousContext only
    double strength = 0.0;       // v = lambda + (1-lambda)(1-omega)
};

// One condition per edge on the root -> node path.
std::vector<Condition> describe_node(const Tree& t, int32_t node,
                                     std::span<const AttributeMeta> attrs);

// Collapses repeated numeric conditions on one attribute into the tightest
// bound pair; keeps first-seen attribute order.
std::vector<Condition> merge_conditions(const std::vector<Condition>& raw);

TypicalValues typical_values(const LikelihoodModel& m, const AttributeMeta& attr);

// Per tree: anomalous-context explanation when the context's lambda passes
// the threshold, otherwise a deviation explanation when omega < 1. Sorted by
// strength, truncated to top_k (<= 0 keeps all).
std::vector<Explanation> explain_instance(const Model& m, std::span<const double> cells,
                                          int32_t top_k, double lambda_threshold = 0.5);

struct ContextReport {
    int32_t context_id = -1;
    int32_t tree = -1;
    int32_t leaf = -1;
    double lambda = 0.0;
    std::string target;
    std::vector<Condition> conditions;
    std::vector<int32_t> members;
};

// Contexts with lambda >= threshold, highest first.
std::vector<ContextReport> list_anomalous_contexts(const Model& m, double lambda_threshold);

std::string render_condition(const Condition& c);
std::string render_typical(const TypicalValues& t);
std::string render_text(const Explanation& e);

}  // namespace admercs
