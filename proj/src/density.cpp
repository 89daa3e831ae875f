#include "admercs/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace admercs {

namespace {

constexpr int kGridBins = 1 << 10;
constexpr int kMaxRootIterations = 50;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// In-place radix-2 complex FFT, decimation in time.
void fft(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Unnormalized DCT-II: out[k] = 2 * sum_j in[j] * cos(pi k (2j+1) / (2n)),
// computed by even/odd reordering plus a complex FFT (Makhoul).
std::vector<double> dct2(const std::vector<double>& in) {
    const size_t n = in.size();
    std::vector<std::complex<double>> v(n);
    for (size_t j = 0; j < n / 2; ++j) {
        v[j] = in[2 * j];
        v[n - 1 - j] = in[2 * j + 1];
    }
    fft(v);
    std::vector<double> out(n);
    for (size_t k = 0; k < n; ++k) {
        const double ang = -M_PI * static_cast<double>(k) / (2.0 * static_cast<double>(n));
        out[k] = 2.0 * (v[k] * std::complex<double>(std::cos(ang), std::sin(ang))).real();
    }
    return out;
}

// Fixed-point functional for the diffusion bandwidth: gamma^[l] iterated
// down from l = 7, evaluated on squared DCT coefficients.
double isj_fixed_point(double t, double n_points, const std::vector<double>& i_sq,
                       const std::vector<double>& a2) {
    const int ell = 7;
    double f = 0.0;
    for (size_t i = 0; i < i_sq.size(); ++i) {
        f += std::pow(i_sq[i], ell) * a2[i] * std::exp(-i_sq[i] * M_PI * M_PI * t);
    }
    f *= 2.0 * std::pow(M_PI, 2 * ell);
    for (int s = ell - 1; s >= 2; --s) {
        double odd_prod = 1.0;
        for (int k = 3; k < 2 * s; k += 2) odd_prod *= k;
        const double k0 = odd_prod * kInvSqrt2Pi;
        const double c = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
        const double time = std::pow(2.0 * c * k0 / (n_points * f), 2.0 / (3.0 + 2.0 * s));
        f = 0.0;
        for (size_t i = 0; i < i_sq.size(); ++i) {
            f += std::pow(i_sq[i], s) * a2[i] * std::exp(-i_sq[i] * M_PI * M_PI * time);
        }
        f *= 2.0 * std::pow(M_PI, 2 * s);
    }
    return t - std::pow(2.0 * n_points * std::sqrt(M_PI) * f, -0.4);
}

size_t count_distinct(std::vector<double> sorted) {
    std::sort(sorted.begin(), sorted.end());
    return std::unique(sorted.begin(), sorted.end()) - sorted.begin();
}

double gaussian_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

}  // namespace

double silverman_bandwidth(std::span<const double> values) {
    const int64_t n = static_cast<int64_t>(values.size());
    std::vector<double> xs(values.begin(), values.end());
    std::sort(xs.begin(), xs.end());
    const double range = xs.back() - xs.front();

    double sum = 0.0, sumsq = 0.0;
    for (double v : xs) {
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, sumsq / n - mean * mean));
    const double q1 = lower_quantile(xs, 0.25);
    const double q3 = lower_quantile(xs, 0.75);
    const double iqr = q3 - q1;
    double sigma = sd;
    if (iqr > 0.0) sigma = std::min(sigma, iqr / 1.349);
    const double h = 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
    return std::max(h, 1e-9 * range);
}

double botev_bandwidth(std::span<const double> values) {
    const int64_t n = static_cast<int64_t>(values.size());
    if (n < 2) throw std::invalid_argument("bandwidth needs >= 2 distinct values");
    std::vector<double> xs(values.begin(), values.end());
    const size_t n_distinct = count_distinct(xs);
    if (n_distinct < 2) throw std::invalid_argument("bandwidth needs >= 2 distinct values");

    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double data_range = *hi_it - *lo_it;
    const double grid_lo = *lo_it - data_range / 10.0;
    const double grid_hi = *hi_it + data_range / 10.0;
    const double r = grid_hi - grid_lo;

    std::vector<double> binned(kGridBins, 0.0);
    for (double v : xs) {
        auto b = static_cast<int64_t>((v - grid_lo) / r * kGridBins);
        b = std::clamp<int64_t>(b, 0, kGridBins - 1);
        binned[b] += 1.0;
    }
    for (double& b : binned) b /= static_cast<double>(n);

    const std::vector<double> a = dct2(binned);
    std::vector<double> i_sq(kGridBins - 1), a2(kGridBins - 1);
    for (int i = 1; i < kGridBins; ++i) {
        i_sq[i - 1] = static_cast<double>(i) * i;
        a2[i - 1] = (a[i] / 2.0) * (a[i] / 2.0);
    }

    const double n_eff =
        std::clamp(static_cast<double>(n_distinct), 50.0, 1050.0);
    auto f = [&](double t) { return isj_fixed_point(t, static_cast<double>(n_distinct), i_sq, a2); };

    // Expand the bracket from a data-size-dependent guess; bisect once a
    // sign change appears. No bracket below 0.1 means the plug-in estimate
    // is unusable for this sample.
    double tol = 1e-11 + 0.01 * (n_eff - 50.0) / 1000.0;
    double t_star = -1.0;
    const double f0 = f(0.0);
    while (tol <= 0.1) {
        const double f_hi = f(tol);
        if (std::isfinite(f_hi) && f0 * f_hi <= 0.0) {
            double a_lo = 0.0, a_hi = tol;
            double fa = f0;
            for (int it = 0; it < kMaxRootIterations; ++it) {
                const double mid = 0.5 * (a_lo + a_hi);
                const double fm = f(mid);
                if (!std::isfinite(fm)) break;
                if (fa * fm <= 0.0) {
                    a_hi = mid;
                } else {
                    a_lo = mid;
                    fa = fm;
                }
            }
            t_star = 0.5 * (a_lo + a_hi);
            break;
        }
        tol *= 2.0;
    }

    double h;
    if (t_star > 0.0 && std::isfinite(t_star)) {
        h = std::sqrt(t_star) * r;
    } else {
        h = silverman_bandwidth(values);
    }
    return std::max(h, 1e-9 * data_range);
}

double lower_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const auto idx = static_cast<size_t>(
        std::floor(q * static_cast<double>(xs.size() - 1)));
    return xs[std::min(idx, xs.size() - 1)];
}

double KdeModel::kappa(double v) const {
    const double inv_h = 1.0 / bandwidth;
    double acc = 0.0;
    for (double s : samples) acc += gaussian_pdf((v - s) * inv_h);
    return acc * inv_h / static_cast<double>(samples.size());
}

double HistModel::kappa(double category) const {
    const auto c = static_cast<int64_t>(category);
    if (c < 0 || c >= static_cast<int64_t>(counts.size())) return 0.0;
    return static_cast<double>(counts[c]) / static_cast<double>(total);
}

double LikelihoodModel::kappa(double v) const {
    return std::visit([v](const auto& m) { return m.kappa(v); }, density);
}

double LikelihoodModel::tau() const {
    return std::visit([](const auto& m) { return m.tau; }, density);
}

double LikelihoodModel::omega(double v) const {
    const double t = tau();
    if (t <= 0.0) return 1.0;
    const double k = kappa(v);
    return k >= t ? 1.0 : k / t;
}

LikelihoodModel fit_model(std::span<const double> values, AttributeKind kind, double rho,
                          double attribute_range, int32_t n_categories) {
    if (values.empty()) throw std::invalid_argument("fit_model needs >= 1 value");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in (0, 1]");

    LikelihoodModel model;
    model.rho = rho;
    if (kind == AttributeKind::Numeric) {
        KdeModel kde;
        kde.samples.assign(values.begin(), values.end());
        if (count_distinct(kde.samples) < 2) {
            kde.bandwidth = std::max(1e-9 * attribute_range, 1e-12);
        } else {
            kde.bandwidth = botev_bandwidth(values);
        }
        std::vector<double> kappas(kde.samples.size());
        for (size_t i = 0; i < kde.samples.size(); ++i) kappas[i] = kde.kappa(kde.samples[i]);
        kde.tau = lower_quantile(std::move(kappas), 1.0 - rho);
        model.density = std::move(kde);
    } else {
        HistModel hist;
        hist.counts.assign(n_categories, 0);
        for (double v : values) hist.counts[static_cast<int64_t>(v)]++;
        hist.total = static_cast<int64_t>(values.size());
        std::vector<double> kappas(values.size());
        for (size_t i = 0; i < values.size(); ++i) kappas[i] = hist.kappa(values[i]);
        hist.tau = lower_quantile(std::move(kappas), 1.0 - rho);
        model.density = std::move(hist);
    }
    return model;
}

}  // namespace admercs
