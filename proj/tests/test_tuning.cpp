#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "swardcast/errors.hpp"
#include "swardcast/timeseries.hpp"
#include "swardcast/tuning.hpp"

using namespace swardcast;
using nlohmann::json;

TEST_CASE("paper grid cardinalities") {
    CHECK(enumerate(paper_grid(ModelFamily::tcn)).size() == 486);
    CHECK(enumerate(paper_grid(ModelFamily::arima)).size() == 27);
    CHECK(enumerate(paper_grid(ModelFamily::mlp)).size() == 84);
    CHECK(enumerate(paper_grid(ModelFamily::lstm)).size() == 84);
    CHECK(enumerate(paper_grid(ModelFamily::gru)).size() == 84);
    CHECK(enumerate(arima_grid64()).size() == 64);
}

TEST_CASE("enumerate covers the cartesian product without duplicates") {
    for (ModelFamily family : {ModelFamily::arima, ModelFamily::tcn, ModelFamily::mlp}) {
        GridSpec grid = paper_grid(family);
        std::vector<json> configs = enumerate(grid);
        CHECK(configs.size() == grid.size());
        std::set<std::string> seen;
        for (const auto& c : configs) {
            seen.insert(c.dump());
        }
        CHECK(seen.size() == configs.size());
    }
}

TEST_CASE("enumerate is deterministic and lexicographic") {
    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", {json(1), json(2)}});
    grid.axes.push_back({"q", {json(0), json(1)}});
    std::vector<json> configs = enumerate(grid);
    REQUIRE(configs.size() == 4);
    CHECK(configs[0] == json({{"p", 1}, {"q", 0}}));
    CHECK(configs[1] == json({{"p", 1}, {"q", 1}}));
    CHECK(configs[2] == json({{"p", 2}, {"q", 0}}));
    CHECK(configs[3] == json({{"p", 2}, {"q", 1}}));

    CHECK(enumerate(paper_grid(ModelFamily::tcn)) == enumerate(paper_grid(ModelFamily::tcn)));
}

TEST_CASE("single-axis grid enumerates one config per value") {
    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", {json(3)}});
    CHECK(enumerate(grid).size() == 1);
}

TEST_CASE("grid_from_json") {
    json doc = {{"family", "mlp"},
                {"axes", {{"lag", {2, 3}}, {"layers", {json::array({5}), json::array({10})}}}}};
    GridSpec grid = grid_from_json(doc);
    CHECK(grid.family == ModelFamily::mlp);
    CHECK(grid.size() == 4);
    CHECK_THROWS_AS(grid_from_json(json{{"family", "mlp"}}), ConfigError);
    CHECK_THROWS_AS(grid_from_json(json{{"family", "mlp"}, {"axes", json::object()}}), ConfigError);
}

TEST_CASE("aggregate means and failures") {
    std::vector<GridRun> runs(4);
    runs[0].status = "ok";
    runs[0].val_rmse = 4.0;
    runs[0].layers = 1;
    runs[0].lag = 2;
    runs[1].status = "ok";
    runs[1].val_rmse = 6.0;
    runs[1].layers = 1;
    runs[1].lag = 3;
    runs[2].status = "ok";
    runs[2].val_rmse = 10.0;
    runs[2].layers = 2;
    runs[2].lag = 2;
    runs[3].status = "diverged";
    runs[3].layers = 3;
    runs[3].lag = 3;

    auto by_layers = aggregate_mean_val_rmse(runs, AggregateAxis::layers);
    CHECK(by_layers.at(1) == doctest::Approx(5.0));
    CHECK(by_layers.at(2) == doctest::Approx(10.0));
    CHECK(by_layers.count(3) == 0);  // failed-only group is absent

    auto failures = aggregate_failures(runs, AggregateAxis::layers);
    CHECK(failures.at(3) == 1);
    CHECK(failures.count(1) == 0);

    auto by_lag = aggregate_mean_val_rmse(runs, AggregateAxis::lag);
    CHECK(by_lag.at(2) == doctest::Approx(7.0));
    CHECK(by_lag.at(3) == doctest::Approx(6.0));
}

TEST_CASE("group means recombine to the overall mean when weighted by size") {
    SyntheticSpec spec;
    spec.length = 300;
    spec.seed = 3;
    TimeSeries series = generate_synthetic(spec);

    GridSpec grid;
    grid.family = ModelFamily::mlp;
    grid.axes.push_back({"layers", {json::array({3}), json::array({3, 3})}});
    grid.axes.push_back({"lag", {json(2), json(3), json(4)}});
    grid.axes.push_back({"epochs", {json(3)}});

    GridRunOptions options;
    options.seed = 11;
    GridSearchResult result = run_grid(grid, series, options);
    REQUIRE(result.runs.size() == 6);

    double overall = 0.0;
    std::size_t n = 0;
    for (const auto& run : result.runs) {
        REQUIRE(run.ok());
        overall += run.val_rmse;
        ++n;
    }
    overall /= static_cast<double>(n);

    double weighted = 0.0;
    for (const auto& [layers, mean] : result.mean_val_rmse_by_layers) {
        std::size_t count = 0;
        for (const auto& run : result.runs) {
            if (run.ok() && run.layers == layers) ++count;
        }
        weighted += mean * static_cast<double>(count);
    }
    weighted /= static_cast<double>(n);
    CHECK(weighted == doctest::Approx(overall).epsilon(1e-12));
}

TEST_CASE("run_grid selects the argmin of validation RMSE") {
    std::vector<double> ar = [] {
        SyntheticSpec spec;
        spec.length = 400;
        spec.seed = 10;
        spec.noise = 3.0;
        return generate_synthetic(spec).values;
    }();
    TimeSeries series;
    series.values = ar;

    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", {json(1), json(2)}});
    grid.axes.push_back({"d", {json(0), json(1)}});
    grid.axes.push_back({"q", {json(0), json(1)}});

    GridRunOptions options;
    GridSearchResult result = run_grid(grid, series, options);
    REQUIRE(result.best_index.has_value());
    const GridRun& best = result.runs[*result.best_index];
    for (const auto& run : result.runs) {
        if (run.ok()) {
            CHECK(best.val_rmse <= run.val_rmse);
        }
    }
    CHECK(std::isfinite(result.best_test.rmse));
}

TEST_CASE("scaling the series leaves the winning arima config unchanged") {
    SyntheticSpec spec;
    spec.length = 350;
    spec.seed = 29;
    TimeSeries series = generate_synthetic(spec);
    TimeSeries scaled = series;
    for (double& v : scaled.values) v *= 3.0;

    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", {json(1), json(2)}});
    grid.axes.push_back({"d", {json(1)}});
    grid.axes.push_back({"q", {json(0), json(1)}});

    GridRunOptions options;
    GridSearchResult a = run_grid(grid, series, options);
    GridSearchResult b = run_grid(grid, scaled, options);
    REQUIRE(a.best_index.has_value());
    REQUIRE(b.best_index.has_value());
    CHECK(*a.best_index == *b.best_index);
}

TEST_CASE("run_grid is reproducible and independent of worker count") {
    SyntheticSpec spec;
    spec.length = 260;
    spec.seed = 31;
    TimeSeries series = generate_synthetic(spec);

    GridSpec grid;
    grid.family = ModelFamily::mlp;
    grid.axes.push_back({"layers", {json::array({4})}});
    grid.axes.push_back({"lag", {json(2), json(3)}});
    grid.axes.push_back({"epochs", {json(3)}});

    GridRunOptions serial;
    serial.seed = 5;
    serial.workers = 1;
    GridRunOptions parallel;
    parallel.seed = 5;
    parallel.workers = 4;

    GridSearchResult a = run_grid(grid, series, serial);
    GridSearchResult b = run_grid(grid, series, parallel);
    GridSearchResult c = run_grid(grid, series, serial);
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].val_rmse == b.runs[i].val_rmse);  // bitwise
        CHECK(a.runs[i].val_mae == b.runs[i].val_mae);
        CHECK(a.runs[i].config == b.runs[i].config);
        CHECK(a.runs[i].val_rmse == c.runs[i].val_rmse);
    }
    CHECK(*a.best_index == *b.best_index);
}

TEST_CASE("failed runs are recorded and AllRunsFailed raised when nothing converges") {
    SyntheticSpec spec;
    spec.length = 40;  // differenced train split is too short for ARMA(8,8)
    spec.seed = 9;
    TimeSeries series = generate_synthetic(spec);

    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", {json(8)}});
    grid.axes.push_back({"d", {json(1)}});
    grid.axes.push_back({"q", {json(8)}});

    GridRunOptions options;
    CHECK_THROWS_AS(run_grid(grid, series, options), AllRunsFailed);
}

TEST_CASE("mixed grids keep failures in the report") {
    SyntheticSpec spec;
    spec.length = 39;
    spec.seed = 9;
    TimeSeries series = generate_synthetic(spec);

    GridSpec grid;
    grid.family = ModelFamily::arima;
    grid.axes.push_back({"p", {json(1), json(12)}});  // 12 cannot fit on 22 differenced points
    grid.axes.push_back({"d", {json(1)}});
    grid.axes.push_back({"q", {json(0)}});

    GridRunOptions options;
    GridSearchResult result = run_grid(grid, series, options);
    REQUIRE(result.runs.size() == 2);
    CHECK(result.runs[0].ok());
    CHECK_FALSE(result.runs[1].ok());
    CHECK(result.runs[1].status.find("short") != std::string::npos);
    CHECK(*result.best_index == 0);
}
