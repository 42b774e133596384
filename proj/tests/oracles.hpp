#pragma once

// Test-only oracles, independent of the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "swardcast/nn/matrix.hpp"
#include "swardcast/pipeline.hpp"
#include "swardcast/rng.hpp"

namespace oracles {

inline swardcast::WindowedDataset random_windows(swardcast::Rng& rng, int lag, std::size_t n,
                                                 double lo = -1.0, double hi = 1.0) {
    swardcast::WindowedDataset ds;
    ds.lag = lag;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(lag));
        for (int j = 0; j < lag; ++j) {
            row.push_back(rng.uniform(lo, hi));
        }
        ds.inputs.push_back(std::move(row));
        ds.targets.push_back(rng.uniform(lo, hi));
    }
    return ds;
}

/// Replaces exactly-zero parameters (freshly initialized biases) with small
/// random values. Keeps relu preactivations away from the kink at 0, where
/// central differences are undefined; pure noise for smooth activations.
template <typename Model>
void randomize_zero_parameters(Model& model, swardcast::Rng& rng) {
    std::vector<double> params = model.parameters();
    for (double& v : params) {
        if (v == 0.0) {
            const double magnitude = rng.uniform(0.05, 0.35);
            v = rng.uniform() < 0.5 ? -magnitude : magnitude;
        }
    }
    model.set_parameters(params);
}

/// Central finite differences against the model's analytic batch gradient.
/// Relative error uses a floored denominator so near-zero gradients compare
/// on an absolute scale.
template <typename Model>
double max_gradient_rel_error(Model& model, const swardcast::WindowedDataset& ds,
                              double eps = 1e-5) {
    const std::vector<double> params = model.parameters();
    const std::vector<double> analytic = model.batch_gradient(ds, 0, ds.size());
    double worst = 0.0;
    std::vector<double> p = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        p[i] = params[i] + eps;
        model.set_parameters(p);
        const double fp = model.batch_loss(ds, 0, ds.size());
        p[i] = params[i] - eps;
        model.set_parameters(p);
        const double fm = model.batch_loss(ds, 0, ds.size());
        p[i] = params[i];
        const double fd = (fp - fm) / (2.0 * eps);
        const double rel =
            std::abs(fd - analytic[i]) / std::max(std::abs(fd) + std::abs(analytic[i]), 1e-3);
        worst = std::max(worst, rel);
    }
    model.set_parameters(params);
    return worst;
}

/// Independent least-squares fit of y_t = c + sum_i coef[i] * y_{t-1-i},
/// solved by plain normal equations (not the library's estimation path).
inline std::vector<double> ols_ar_oracle(std::span<const double> series, int order) {
    const std::size_t p = static_cast<std::size_t>(order);
    const std::size_t cols = p + 1;
    std::vector<std::vector<double>> a(cols, std::vector<double>(cols, 0.0));
    std::vector<double> b(cols, 0.0);
    std::vector<double> x(cols, 1.0);
    for (std::size_t t = p; t < series.size(); ++t) {
        for (std::size_t i = 0; i < p; ++i) {
            x[i + 1] = series[t - 1 - i];
        }
        for (std::size_t r = 0; r < cols; ++r) {
            b[r] += x[r] * series[t];
            for (std::size_t c = 0; c < cols; ++c) {
                a[r][c] += x[r] * x[c];
            }
        }
    }
    for (std::size_t col = 0; col < cols; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < cols; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = 0; r < cols; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = 0; c < cols; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < cols; ++i) {
        b[i] /= a[i][i];
    }
    return b;  // [c, coef_1, ..., coef_p]
}

/// Seeded AR(p) series with standard-normal innovations and burn-in.
inline std::vector<double> generate_ar(std::span<const double> phi, double c, double sigma,
                                       std::size_t n, std::uint64_t seed) {
    swardcast::Rng rng(seed);
    const std::size_t p = phi.size();
    std::vector<double> series;
    series.reserve(n + 200);
    for (std::size_t t = 0; t < n + 200; ++t) {
        double v = c + sigma * rng.gaussian();
        for (std::size_t i = 0; i < p && i < t; ++i) {
            v += phi[i] * series[t - 1 - i];
        }
        series.push_back(v);
    }
    series.erase(series.begin(), series.begin() + 200);
    return series;
}

/// Values on a dyadic grid (multiples of 2^-20) so differencing roundtrips
/// are exact in IEEE arithmetic.
inline std::vector<double> random_dyadic_series(swardcast::Rng& rng, std::size_t n,
                                                double scale = 146.0) {
    std::vector<double> out;
    out.reserve(n);
    const double grid = 1048576.0;  // 2^20
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::floor(rng.uniform(0.0, scale) * grid) / grid);
    }
    return out;
}

/// Positions of the final output that each input position influences:
/// mask[t] is true when perturbing input position t changes the sequence
/// output at the last position (any channel).
template <typename ForwardFn>
std::vector<bool> influence_on_last(ForwardFn forward, const swardcast::nn::Matrix& input,
                                    double bump = 1.0) {
    using swardcast::nn::Matrix;
    const Matrix base = forward(input);
    std::vector<bool> mask(input.cols, false);
    for (std::size_t t = 0; t < input.cols; ++t) {
        Matrix perturbed = input;
        perturbed(0, t) += bump;
        const Matrix out = forward(perturbed);
        for (std::size_t c = 0; c < out.rows; ++c) {
            if (out(c, out.cols - 1) != base(c, base.cols - 1)) {
                mask[t] = true;
                break;
            }
        }
    }
    return mask;
}

}  // namespace oracles
