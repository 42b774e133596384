#include "swardcast/arima.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

#include "swardcast/errors.hpp"
#include "swardcast/nelder_mead.hpp"

namespace swardcast {

void ArimaOrder::validate() const {
    if (p < 0 || d < 0 || q < 0) {
        throw ConfigError("ARIMA orders must be non-negative");
    }
}

DifferencedSeries difference(std::span<const double> values, int d) {
    if (d < 0) {
        throw ConfigError("differencing order must be non-negative");
    }
    if (values.size() <= static_cast<std::size_t>(d)) {
        throw SeriesTooShort("series of length " + std::to_string(values.size()) +
                             " cannot be differenced " + std::to_string(d) + " times");
    }
    DifferencedSeries out;
    out.values.assign(values.begin(), values.end());
    out.retained_heads.reserve(static_cast<std::size_t>(d));
    for (int level = 0; level < d; ++level) {
        out.retained_heads.push_back(out.values.front());
        for (std::size_t i = out.values.size() - 1; i >= 1; --i) {
            out.values[i] -= out.values[i - 1];
        }
        out.values.erase(out.values.begin());
    }
    return out;
}

std::vector<double> undifference(std::span<const double> diffed,
                                 std::span<const double> retained_heads, int d) {
    if (d < 0 || retained_heads.size() != static_cast<std::size_t>(d)) {
        throw HeadMismatch("expected " + std::to_string(d) + " retained heads, got " +
                           std::to_string(retained_heads.size()));
    }
    std::vector<double> out(diffed.begin(), diffed.end());
    for (int level = d - 1; level >= 0; --level) {
        out.insert(out.begin(), retained_heads[static_cast<std::size_t>(level)]);
        for (std::size_t i = 1; i < out.size(); ++i) {
            out[i] += out[i - 1];
        }
    }
    return out;
}

namespace {

// ARMA one-step mean given trailing differenced values and residuals.
// History shorter than the coefficient count is padded with pre-sample zeros.
double one_step_mean(double c, std::span<const double> phi, std::span<const double> theta,
                     std::span<const double> values, std::span<const double> residuals) {
    double pred = c;
    for (std::size_t i = 0; i < phi.size() && i < values.size(); ++i) {
        pred += phi[i] * values[values.size() - 1 - i];
    }
    for (std::size_t j = 0; j < theta.size() && j < residuals.size(); ++j) {
        pred += theta[j] * residuals[residuals.size() - 1 - j];
    }
    return pred;
}

std::vector<double> residual_recursion(double c, std::span<const double> phi,
                                       std::span<const double> theta,
                                       std::span<const double> w) {
    const std::size_t p = phi.size();
    std::vector<double> resid(w.size(), 0.0);
    for (std::size_t t = p; t < w.size(); ++t) {
        double pred = one_step_mean(c, phi, theta, w.subspan(t - p, p),
                                    std::span<const double>(resid).subspan(0, t));
        resid[t] = w[t] - pred;
    }
    return resid;
}

double css_objective(double c, std::span<const double> phi, std::span<const double> theta,
                     std::span<const double> w) {
    const std::size_t p = phi.size();
    if (w.size() <= p) {
        return std::numeric_limits<double>::infinity();
    }
    auto resid = residual_recursion(c, phi, theta, w);
    double ssq = 0.0;
    for (std::size_t t = p; t < resid.size(); ++t) {
        ssq += resid[t] * resid[t];
    }
    ssq /= static_cast<double>(w.size() - p);
    // Exploding parameter regions can overflow the recursion; an infinite
    // objective keeps the simplex ordering well defined.
    return std::isfinite(ssq) ? ssq : std::numeric_limits<double>::infinity();
}

// Solves the (small, symmetric) normal equations by Gaussian elimination with
// partial pivoting. Returns false when near-singular.
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (std::abs(a[pivot][col]) < 1e-12) {
            return false;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double factor = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) {
                a[r][k] -= factor * a[col][k];
            }
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        b[i] /= a[i][i];
    }
    return true;
}

// OLS of w_t on [1, w_{t-1}, ..., w_{t-p}]; fills c and phi.
void ols_ar_init(std::span<const double> w, int p, double& c, std::vector<double>& phi) {
    const std::size_t up = static_cast<std::size_t>(p);
    const std::size_t rows = w.size() - up;
    const std::size_t cols = up + 1;
    std::vector<std::vector<double>> xtx(cols, std::vector<double>(cols, 0.0));
    std::vector<double> xty(cols, 0.0);
    std::vector<double> x(cols, 1.0);
    for (std::size_t t = up; t < w.size(); ++t) {
        for (std::size_t i = 0; i < up; ++i) {
            x[i + 1] = w[t - 1 - i];
        }
        for (std::size_t i = 0; i < cols; ++i) {
            xty[i] += x[i] * w[t];
            for (std::size_t j = 0; j < cols; ++j) {
                xtx[i][j] += x[i] * x[j];
            }
        }
    }
    c = 0.0;
    phi.assign(up, 0.0);
    if (rows >= cols && solve_dense(xtx, xty)) {
        c = xty[0];
        for (std::size_t i = 0; i < up; ++i) {
            phi[i] = xty[i + 1];
        }
    } else {
        c = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    }
}

// Durand-Kerner root finding for real-coefficient polynomials
// a[0] + a[1] z + ... + a[n] z^n. Adequate for the low orders used here.
std::vector<std::complex<double>> polynomial_roots(std::vector<double> coeffs) {
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-12) {
        coeffs.pop_back();
    }
    const std::size_t degree = coeffs.size() - 1;
    std::vector<std::complex<double>> roots;
    if (degree == 0) {
        return roots;
    }
    for (auto& a : coeffs) {
        a /= coeffs.back();
    }
    roots.resize(degree);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> acc(1.0, 0.0);
    for (auto& r : roots) {
        acc *= seed;
        r = acc;
    }
    auto eval = [&](std::complex<double> z) {
        std::complex<double> v(0.0, 0.0);
        for (std::size_t i = coeffs.size(); i-- > 0;) {
            v = v * z + coeffs[i];
        }
        return v;
    };
    for (int iter = 0; iter < 200; ++iter) {
        double shift = 0.0;
        for (std::size_t i = 0; i < degree; ++i) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t j = 0; j < degree; ++j) {
                if (j != i) {
                    denom *= roots[i] - roots[j];
                }
            }
            if (std::abs(denom) < 1e-30) {
                continue;
            }
            std::complex<double> delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-12) {
            break;
        }
    }
    return roots;
}

bool roots_outside_unit_circle(const std::vector<double>& poly) {
    for (const auto& root : polynomial_roots(poly)) {
        if (std::abs(root) <= 1.0) {
            return false;
        }
    }
    return true;
}

}  // namespace

ArimaModel ArimaModel::fit(const TimeSeries& train, const ArimaOrder& order,
                           const ArimaFitOptions& options) {
    order.validate();
    train.validate();
    auto diffed = difference(train.values, order.d);
    const auto& w = diffed.values;
    const std::size_t p = static_cast<std::size_t>(order.p);
    const std::size_t q = static_cast<std::size_t>(order.q);
    if (w.size() <= p + q + 10) {
        throw SeriesTooShort("differenced series of length " + std::to_string(w.size()) +
                             " is too short to fit ARMA(" + std::to_string(order.p) + "," +
                             std::to_string(order.q) + ")");
    }

    std::vector<double> start(1 + p + q, 0.0);
    {
        double c0 = 0.0;
        std::vector<double> phi0;
        ols_ar_init(w, order.p, c0, phi0);
        start[0] = c0;
        std::copy(phi0.begin(), phi0.end(), start.begin() + 1);
    }

    auto objective = [&](const std::vector<double>& params) {
        std::span<const double> all(params);
        return css_objective(params[0], all.subspan(1, p), all.subspan(1 + p, q), w);
    };

    NelderMeadOptions nm;
    nm.max_iterations = options.max_iterations;
    nm.f_tolerance = options.tolerance;
    auto result = nelder_mead(objective, start, nm);
    if (!result.converged || !std::isfinite(result.fx)) {
        throw NonConvergence("CSS minimization did not converge within " +
                             std::to_string(options.max_iterations) + " iterations");
    }

    ArimaModel model;
    model.order = order;
    model.c = result.x[0];
    model.phi.assign(result.x.begin() + 1, result.x.begin() + 1 + static_cast<std::ptrdiff_t>(p));
    model.theta.assign(result.x.begin() + 1 + static_cast<std::ptrdiff_t>(p), result.x.end());
    model.residuals = residual_recursion(model.c, model.phi, model.theta, w);
    return model;
}

bool ArimaModel::stationary() const {
    // 1 - phi_1 z - ... - phi_p z^p
    std::vector<double> poly(phi.size() + 1, 0.0);
    poly[0] = 1.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        poly[i + 1] = -phi[i];
    }
    return roots_outside_unit_circle(poly);
}

bool ArimaModel::invertible() const {
    // 1 + theta_1 z + ... + theta_q z^q
    std::vector<double> poly(theta.size() + 1, 0.0);
    poly[0] = 1.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        poly[i + 1] = theta[i];
    }
    return roots_outside_unit_circle(poly);
}

double arma_one_step(const ArimaModel& model, std::span<const double> recent_values,
                     std::span<const double> recent_residuals) {
    if (recent_values.size() < model.phi.size() || recent_residuals.size() < model.theta.size()) {
        throw InsufficientHistory("need at least p values and q residuals");
    }
    return one_step_mean(model.c, model.phi, model.theta, recent_values, recent_residuals);
}

std::vector<double> css_residuals(const ArimaModel& model, std::span<const double> differenced) {
    return residual_recursion(model.c, model.phi, model.theta, differenced);
}

std::vector<double> walk_forward(const ArimaModel& model, const TimeSeries& full_series,
                                 std::size_t from, std::size_t count) {
    full_series.validate();
    const int d = model.order.d;
    const std::size_t p = model.phi.size();
    const std::size_t n = full_series.size();
    if (from + count > n) {
        throw InsufficientHistory("prediction range extends past the series end");
    }
    if (from < static_cast<std::size_t>(d) + p) {
        throw InsufficientHistory("prediction range starts before enough history is available");
    }

    // levels[j] is the j-fold differenced series; levels[j][i] sits at original time i + j.
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(d) + 1);
    levels[0] = full_series.values;
    for (int j = 1; j <= d; ++j) {
        const auto& prev = levels[static_cast<std::size_t>(j - 1)];
        auto& cur = levels[static_cast<std::size_t>(j)];
        cur.resize(prev.size() - 1);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            cur[i] = prev[i + 1] - prev[i];
        }
    }
    const auto& w = levels[static_cast<std::size_t>(d)];
    auto resid = residual_recursion(model.c, model.phi, model.theta, w);

    std::vector<double> predictions;
    predictions.reserve(count);
    for (std::size_t tau = from; tau < from + count; ++tau) {
        const std::size_t t = tau - static_cast<std::size_t>(d);
        double pred = one_step_mean(model.c, model.phi, model.theta,
                                    std::span<const double>(w).subspan(t - p, p),
                                    std::span<const double>(resid).subspan(0, t));
        // Undo differencing against true previous values, level by level.
        for (int j = d - 1; j >= 0; --j) {
            pred += levels[static_cast<std::size_t>(j)][tau - static_cast<std::size_t>(j) - 1];
        }
        predictions.push_back(pred);
    }
    return predictions;
}

std::vector<double> forecast_test(const ArimaModel& model, const TimeSeries& full_series,
                                  const DatasetSplits& splits) {
    const std::size_t from = splits.train.size() + splits.val.size();
    return walk_forward(model, full_series, from, splits.test.size());
}

std::vector<double> forecast_recursive(const ArimaModel& model, const TimeSeries& history,
                                       int steps) {
    history.validate();
    if (steps < 1) {
        throw ConfigError("steps must be at least 1");
    }
    const int d = model.order.d;
    const std::size_t p = model.phi.size();
    if (history.size() <= static_cast<std::size_t>(d) + p) {
        throw InsufficientHistory("history of length " + std::to_string(history.size()) +
                                  " is too short for this model");
    }

    std::vector<std::vector<double>> levels(static_cast<std::size_t>(d) + 1);
    levels[0] = history.values;
    for (int j = 1; j <= d; ++j) {
        const auto& prev = levels[static_cast<std::size_t>(j - 1)];
        auto& cur = levels[static_cast<std::size_t>(j)];
        cur.resize(prev.size() - 1);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            cur[i] = prev[i + 1] - prev[i];
        }
    }
    std::vector<double> w = levels[static_cast<std::size_t>(d)];
    std::vector<double> resid = residual_recursion(model.c, model.phi, model.theta, w);

    std::vector<double> last(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        last[static_cast<std::size_t>(j)] = levels[static_cast<std::size_t>(j)].back();
    }

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
        double pred_w = one_step_mean(model.c, model.phi, model.theta,
                                      std::span<const double>(w).subspan(w.size() - p, p),
                                      resid);
        w.push_back(pred_w);
        resid.push_back(0.0);  // future innovations unknown
        double v = pred_w;
        for (int j = d - 1; j >= 0; --j) {
            v += last[static_cast<std::size_t>(j)];
            last[static_cast<std::size_t>(j)] = v;
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace swardcast
