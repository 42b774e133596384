#include "swardcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "swardcast/errors.hpp"

namespace swardcast {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) {
        throw ConfigError("nelder_mead requires at least one dimension");
    }

    // NaN objective values would break the simplex ordering; map them to +inf.
    auto eval = [&objective](const std::vector<double>& x) {
        const double f = objective(x);
        return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
    };

    std::vector<std::vector<double>> verts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        double step = std::abs(start[i]) > 0.0 ? options.initial_step * std::abs(start[i])
                                               : options.initial_step;
        verts[i + 1][i] += step;
    }
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fvals[i] = eval(verts[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), reflected(n), expanded(n), contracted(n);

    NelderMeadResult result;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];

        const double spread = fvals[worst] - fvals[best];
        if (!std::isfinite(fvals[best])) {
            break;
        }
        if (spread <= options.f_tolerance * (std::abs(fvals[best]) + options.f_floor)) {
            // Equal f-values can also mean vertices straddling the minimum;
            // require the simplex itself to have collapsed.
            double diameter = 0.0;
            double scale = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    diameter = std::max(diameter, std::abs(verts[k][i] - verts[best][i]));
                    scale = std::max(scale, std::abs(verts[best][i]));
                }
            }
            if (diameter <= 1e-6 * (1.0 + scale)) {
                result.converged = true;
                break;
            }
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += verts[k][i];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(n);
        }

        for (std::size_t i = 0; i < n; ++i) {
            reflected[i] = centroid[i] + (centroid[i] - verts[worst][i]);
        }
        const double f_reflected = eval(reflected);

        if (f_reflected < fvals[best]) {
            for (std::size_t i = 0; i < n; ++i) {
                expanded[i] = centroid[i] + 2.0 * (reflected[i] - centroid[i]);
            }
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                verts[worst] = expanded;
                fvals[worst] = f_expanded;
            } else {
                verts[worst] = reflected;
                fvals[worst] = f_reflected;
            }
        } else if (f_reflected < fvals[second_worst]) {
            verts[worst] = reflected;
            fvals[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < fvals[worst];
            const std::vector<double>& toward = outside ? reflected : verts[worst];
            for (std::size_t i = 0; i < n; ++i) {
                contracted[i] = centroid[i] + 0.5 * (toward[i] - centroid[i]);
            }
            const double f_contracted = eval(contracted);
            if (f_contracted < (outside ? f_reflected : fvals[worst])) {
                verts[worst] = contracted;
                fvals[worst] = f_contracted;
            } else {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i) {
                        verts[k][i] = verts[best][i] + 0.5 * (verts[k][i] - verts[best][i]);
                    }
                    fvals[k] = eval(verts[k]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (fvals[k] < fvals[best]) {
            best = k;
        }
    }
    result.x = verts[best];
    result.fx = fvals[best];
    result.iterations = iter;
    return result;
}

}  // namespace swardcast
