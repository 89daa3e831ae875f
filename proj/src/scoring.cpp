#include "admercs/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace admercs {

namespace {

constexpr double kFactorFloor = 1e-300;

double clamped_log1m(double gamma_p) {
    const double factor = std::clamp(1.0 - gamma_p, kFactorFloor, 1.0);
    return std::log(factor);
}

void check_gamma(double gamma, const char* name) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument(std::string(name) + " must be in (0, 1]");
}

}  // namespace

double noisy_or(std::span<const double> ps, double gamma) {
    check_gamma(gamma, "gamma");
    if (ps.empty()) return 0.0;
    double log_prod = 0.0;
    for (double p : ps) log_prod += clamped_log1m(gamma * p);
    return 1.0 - std::exp(log_prod);
}

double context_evidence(double lambda, double omega) {
    return lambda + (1.0 - lambda) * (1.0 - omega);
}

void update_delta(const ContextIndex& index, std::span<const double> lambda,
                  double gamma_delta, std::span<double> delta_out) {
    for (int64_t i = 0; i < index.n_instances; ++i) {
        double log_prod = 0.0;
        for (int32_t t = 0; t < index.n_trees; ++t) {
            const int32_t ctx = index.context_of(i, t);
            const double v = context_evidence(lambda[ctx], index.omega_of(i, t));
            log_prod += clamped_log1m(gamma_delta * v);
        }
        delta_out[i] = 1.0 - std::exp(log_prod);
    }
}

void update_lambda(const ContextIndex& index, std::span<const double> delta,
                   double gamma_lambda, std::span<double> lambda_out) {
    for (int32_t j = 0; j < index.n_contexts(); ++j) {
        // 1 - noisy_or({1 - delta_i}) collapses to the plain product; factors
        // live in [0,1] so it only ever shrinks and underflow means 0.
        double prod = 1.0;
        for (int32_t i : index.context_members[j]) {
            prod *= 1.0 - gamma_lambda * (1.0 - delta[i]);
        }
        lambda_out[j] = prod;
    }
}

ScoreState run_iterations(const ContextIndex& index, const ScoringParams& p) {
    check_gamma(p.gamma_delta, "gamma_delta");
    check_gamma(p.gamma_lambda, "gamma_lambda");
    if (p.iterations < 1) throw std::invalid_argument("iterations must be >= 1");

    ScoreState state;
    state.delta.assign(index.n_instances, 0.0);
    state.lambda.assign(index.n_contexts(), 0.0);
    state.lambda_scoring.assign(index.n_contexts(), 0.0);

    std::vector<double> new_delta(index.n_instances, 0.0);
    std::vector<double> new_lambda(index.n_contexts(), 0.0);

    for (int32_t it = 0; it < p.iterations; ++it) {
        update_delta(index, state.lambda, p.gamma_delta, new_delta);
        if (p.freeze_lambda) {
            new_lambda.assign(index.n_contexts(), 0.0);
        } else {
            update_lambda(index, new_delta, p.gamma_lambda, new_lambda);
        }

        double max_change = 0.0;
        for (int64_t i = 0; i < index.n_instances; ++i)
            max_change = std::max(max_change, std::abs(new_delta[i] - state.delta[i]));
        for (int32_t j = 0; j < index.n_contexts(); ++j)
            max_change = std::max(max_change, std::abs(new_lambda[j] - state.lambda[j]));

        state.lambda_scoring = state.lambda;  // snapshot that fed this delta
        state.delta = new_delta;
        state.lambda = new_lambda;
        state.iterations_run = it + 1;
        if (max_change < p.tolerance) break;
    }
    return state;
}

}  // namespace admercs
