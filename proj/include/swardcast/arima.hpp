#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swardcast/pipeline.hpp"
#include "swardcast/timeseries.hpp"

namespace swardcast {

/// ARIMA(p, d, q) orders. p + q = 0 is permitted (pure random walk / drift).
struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    void validate() const;
};

/// d-fold first differences plus the values dropped at each level, which
/// undifference needs to reconstruct the original series.
struct DifferencedSeries {
    std::vector<double> values;
    std::vector<double> retained_heads;  // one entry per differencing level
};

DifferencedSeries difference(std::span<const double> values, int d);

/// Exact inverse of difference given the retained heads.
/// Throws HeadMismatch when retained_heads.size() != d.
std::vector<double> undifference(std::span<const double> diffed,
                                 std::span<const double> retained_heads, int d);

struct ArimaFitOptions {
    int max_iterations = 2000;
    double tolerance = 1e-8;
};

/**
 * ARIMA model with conditional-sum-of-squares estimation.
 *
 * After differencing d times the model is ARMA(p, q):
 *   w_t = c + sum_i phi_i * w_{t-i} + e_t + sum_j theta_j * e_{t-j}
 * Any mean term of the MA form is folded into c. Pre-sample residuals are
 * zero; point forecasts set the current innovation to zero.
 */
struct ArimaModel {
    ArimaOrder order;
    double c = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    std::vector<double> residuals;  // in-sample, aligned with the differenced train series

    /**
     * Estimates c, phi, theta by minimizing the conditional sum of squared
     * residuals on the d-differenced series via Nelder-Mead, initialized at
     * an ordinary-least-squares fit of the AR part (theta starts at zero).
     *
     * Throws SeriesTooShort when the differenced length is <= p + q + 10 and
     * NonConvergence when the simplex fails to reach tolerance.
     */
    static ArimaModel fit(const TimeSeries& train, const ArimaOrder& order,
                          const ArimaFitOptions& options = {});

    /// All AR characteristic roots outside the unit circle.
    bool stationary() const;
    /// All MA characteristic roots outside the unit circle.
    bool invertible() const;
};

/**
 * One-step ARMA point forecast from trailing history (chronological order;
 * the last element is the most recent). The unknown current innovation is
 * taken as zero.
 *
 * Throws InsufficientHistory when fewer than p values or q residuals are given.
 */
double arma_one_step(const ArimaModel& model, std::span<const double> recent_values,
                     std::span<const double> recent_residuals);

/// Residual recursion over a differenced series with pre-sample residuals zero.
std::vector<double> css_residuals(const ArimaModel& model, std::span<const double> differenced);

/**
 * Walk-forward one-step predictions for original-scale indices
 * [from, from + count), using true observed lags and recursively updated
 * residuals. Output is in original units.
 */
std::vector<double> walk_forward(const ArimaModel& model, const TimeSeries& full_series,
                                 std::size_t from, std::size_t count);

/// Walk-forward predictions aligned with the test split.
std::vector<double> forecast_test(const ArimaModel& model, const TimeSeries& full_series,
                                  const DatasetSplits& splits);

/// Recursive multi-step forecast beyond the end of `history` (predictions fed
/// back as inputs, future innovations zero), in original units.
std::vector<double> forecast_recursive(const ArimaModel& model, const TimeSeries& history,
                                       int steps);

}  // namespace swardcast
