#pragma once

#include <functional>
#include <vector>

namespace swardcast {

struct NelderMeadOptions {
    int max_iterations = 2000;
    /// Stop when the simplex f-spread falls below f_tolerance * (|f_best| + f_floor).
    double f_tolerance = 1e-8;
    double f_floor = 1e-12;
    /// Per-coordinate offset for the initial simplex: 0.1 * |x_i|, or 0.1 when x_i is 0.
    double initial_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Derivative-free simplex minimization (reflection 1, expansion 2,
 * contraction 0.5, shrink 0.5).
 */
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace swardcast
