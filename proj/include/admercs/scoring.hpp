#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace admercs {

struct ScoringParams {
    double gamma_delta = 0.9;   // trust in per-context evidence, in (0, 1]
    double gamma_lambda = 0.5;  // trust in per-member evidence, in (0, 1]
    int32_t iterations = 10;
    double rho = 0.9;           // likelihood normalization fraction, in (0, 1]
    bool freeze_lambda = false; // diagnostic: keep every context score at 0
    double tolerance = 1e-6;    // early-exit threshold on max score change
};

// Flat view of the ensemble's contexts: one context per (tree, leaf), with
// each training instance belonging to exactly one context per tree, plus the
// precomputed squashed likelihood of each instance in its context.
struct ContextIndex {
    std::vector<std::pair<int32_t, int32_t>> contexts;  // id -> (tree, leaf)
    std::vector<std::vector<int32_t>> context_members;  // id -> training rows
    std::vector<int32_t> membership;                    // row-major N x T: context id
    std::vector<double> omega;                          // row-major N x T
    int64_t n_instances = 0;
    int32_t n_trees = 0;

    int32_t context_of(int64_t row, int32_t tree) const {
        return membership[row * n_trees + tree];
    }
    double omega_of(int64_t row, int32_t tree) const {
        return omega[row * n_trees + tree];
    }
    int32_t n_contexts() const { return static_cast<int32_t>(contexts.size()); }
};

struct ScoreState {
    std::vector<double> delta;           // per-instance anomaly score
    std::vector<double> lambda;          // per-context anomaly score (final)
    std::vector<double> lambda_scoring;  // snapshot that produced `delta`;
                                         // freezing this one lets re-scoring
                                         // reproduce `delta` exactly
    int32_t iterations_run = 0;
};

// 1 - prod(1 - gamma * p_i), evaluated in log space with the factors clamped
// to [1e-300, 1]. Empty input gives 0.
double noisy_or(std::span<const double> ps, double gamma);

// v = lambda + (1 - lambda) * (1 - omega): evidence that an instance is
// anomalous in one context, blending the context's own anomaly score with
// the instance's deviation inside it.
double context_evidence(double lambda, double omega);

// delta_i = noisy_or({v_ij : contexts j containing i}; gamma_delta)
void update_delta(const ContextIndex& index, std::span<const double> lambda,
                  double gamma_delta, std::span<double> delta_out);

// lambda_j = 1 - noisy_or({1 - delta_i : i in c_j}; gamma_lambda), i.e. a
// noisy-AND: a context is anomalous when all its members are.
void update_lambda(const ContextIndex& index, std::span<const double> delta,
                   double gamma_lambda, std::span<double> lambda_out);

// Starts from lambda = 0 and repeats (evidence, delta, lambda) up to
// p.iterations times, exiting early when both score vectors move less than
// p.tolerance.
ScoreState run_iterations(const ContextIndex& index, const ScoringParams& p);

}  // namespace admercs
