#include <doctest.h>

#include <cmath>

#include "swardcast/nelder_mead.hpp"

using namespace swardcast;

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 3.0) * (x[0] - 3.0) + (x[1] + 1.0) * (x[1] + 1.0);
    };
    NelderMeadResult r = nelder_mead(f, {0.0, 0.0});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 3.0) < 1e-5);
    CHECK(std::abs(r.x[1] + 1.0) < 1e-5);
}

TEST_CASE("nelder_mead solves rosenbrock from the classic start") {
    auto rosenbrock = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    NelderMeadResult r = nelder_mead(rosenbrock, {-1.2, 1.0});
    CHECK(r.converged);
    CHECK(r.fx < 1e-6);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-3);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-3);
}

TEST_CASE("nelder_mead reports non-convergence at the iteration cap") {
    auto rosenbrock = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    NelderMeadOptions opts;
    opts.max_iterations = 2;
    NelderMeadResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, opts);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
}

TEST_CASE("nelder_mead survives NaN objective regions") {
    auto f = [](const std::vector<double>& x) {
        if (x[0] < 0.0) {
            return std::nan("");
        }
        return (x[0] - 2.0) * (x[0] - 2.0) + x[1] * x[1];
    };
    NelderMeadResult r = nelder_mead(f, {5.0, 1.0});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 2.0) < 1e-4);
    CHECK(std::abs(r.x[1]) < 1e-4);
}

TEST_CASE("nelder_mead one-dimensional") {
    auto f = [](const std::vector<double>& x) { return std::cosh(x[0] - 0.5); };
    NelderMeadResult r = nelder_mead(f, {4.0});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 0.5) < 1e-4);
}
