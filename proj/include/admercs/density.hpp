#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "admercs/dataset.hpp"

namespace admercs {

// Improved Sheather-Jones plug-in bandwidth (diffusion fixed point on a
// 1024-bin DCT grid padded by range/10). Falls back to Silverman's rule
// with sigma = min(std, IQR/1.349) when the fixed point cannot be bracketed
// or fails to converge. Throws std::invalid_argument when fewer than 2
// distinct values are given.
double botev_bandwidth(std::span<const double> values);

// h = 1.06 * min(std, IQR/1.349) * n^(-1/5), floored at 1e-9 * range.
double silverman_bandwidth(std::span<const double> values);

// Empirical q-quantile with lower interpolation: sorted[floor(q * (n-1))].
double lower_quantile(std::vector<double> xs, double q);

struct KdeModel {
    std::vector<double> samples;
    double bandwidth = 0.0;
    double tau = 0.0;

    // Gaussian KDE: (1 / (n h)) * sum(phi((v - s_i) / h)).
    double kappa(double v) const;
};

struct HistModel {
    std::vector<int64_t> counts;  // indexed by category
    int64_t total = 0;
    double tau = 0.0;

    // Relative frequency; 0 for unseen categories.
    double kappa(double category) const;
};

// Per-context likelihood of a target value. tau is the (1-rho) lower
// quantile of kappa over the fitted node's own training values, so at least
// a rho fraction of them squash to omega = 1.
struct LikelihoodModel {
    std::variant<KdeModel, HistModel> density;
    double rho = 0.7;

    double kappa(double v) const;
    double tau() const;

    // Eq-style squashing: 1 when kappa >= tau, else kappa/tau; a zero tau
    // means the context has no density contrast and everything maps to 1.
    double omega(double v) const;
};

// Fits a KDE (numeric) or histogram (nominal) over a scoring node's training
// target values. A numeric node with < 2 distinct values becomes a spike
// with h = max(1e-9 * attribute_range, 1e-12).
LikelihoodModel fit_model(std::span<const double> values, AttributeKind kind, double rho,
                          double attribute_range, int32_t n_categories);

}  // namespace admercs
