#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "tiltkde/density.hpp"
#include "tiltkde/errors.hpp"
#include "tiltkde/estimator.hpp"
#include "tiltkde/parallel.hpp"
#include "tiltkde/rate_lab.hpp"
#include "support/oracles.hpp"

using namespace tiltkde;

namespace {

TiltConfig oracle_tilt(double c, double clip = 50.0) {
    TiltConfig config;
    config.mode = TiltMode::Oracle;
    config.lead_constant = c;
    config.clip_bound = clip;
    return config;
}

ExperimentPlan small_plan() {
    ExperimentPlan plan;
    plan.density = ReferenceDensity::normal();
    plan.spec.kernel = Kernel::epanechnikov();
    plan.spec.r = 2;
    plan.spec.s = 0;
    plan.spec.bandwidth = BandwidthRule::rate();
    plan.spec.tilt = TiltConfig{};
    plan.n_grid = {64, 128, 256, 512};
    plan.replications = 50;
    plan.eval_points = {0.0, 0.5, 1.0};
    plan.base_seed = 7;
    return plan;
}

bool reports_identical(const RateReport& a, const RateReport& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].n != b.rows[i].n || a.rows[i].x != b.rows[i].x ||
            a.rows[i].h != b.rows[i].h || a.rows[i].error != b.rows[i].error ||
            a.rows[i].std_error != b.rows[i].std_error ||
            a.rows[i].excluded != b.rows[i].excluded)
            return false;
    }
    return a.fitted_slope == b.fitted_slope && a.slope_std_error == b.slope_std_error &&
           a.theoretical_slope == b.theoretical_slope && a.pass == b.pass;
}

} // namespace

TEST_SUITE("rate_lab") {

TEST_CASE("theoretical slope from exact integers") {
    CHECK(theoretical_slope(2, 0) == -0.4);
    CHECK(theoretical_slope(2, 1) == -0.2);
    CHECK(theoretical_slope(2, 2) == 0.0);
    CHECK(theoretical_slope(4, 1) == -(3.0 / 9.0));
    CHECK(theoretical_slope(6, 2) == -(4.0 / 13.0));
    for (int r = 2; r <= 8; r += 2)
        for (int s = 0; s <= r; ++s)
            CHECK(theoretical_slope(r, s) ==
                  -static_cast<double>(r - s) / static_cast<double>(2 * r + 1));
    CHECK_THROWS_AS(theoretical_slope(3, 0), InvalidConfig);
    CHECK_THROWS_AS(theoretical_slope(2, 3), InvalidConfig);
}

TEST_CASE("log-log fit recovers exact power laws") {
    std::vector<std::pair<double, double>> points;
    for (double n : {128.0, 256.0, 512.0, 1024.0, 4096.0})
        points.emplace_back(n, 3.7 * std::pow(n, -0.4));
    const SlopeFit fit = fit_loglog_slope(points);
    CHECK(fit.slope == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(fit.std_error <= 1e-8);
}

TEST_CASE("log-log fit degenerate inputs") {
    std::vector<std::pair<double, double>> constant{{100.0, 2.0}, {200.0, 2.0}, {400.0, 2.0}};
    const SlopeFit flat = fit_loglog_slope(constant);
    CHECK(flat.slope == 0.0);
    CHECK(flat.std_error <= 1e-12);

    std::vector<std::pair<double, double>> two{{100.0, 1.0}, {1000.0, 0.1}};
    const SlopeFit pair_fit = fit_loglog_slope(two);
    CHECK(pair_fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pair_fit.std_error == 0.0);

    CHECK_THROWS_AS(fit_loglog_slope(std::vector<std::pair<double, double>>{{100.0, 1.0}}),
                    InvalidInput);
    CHECK_THROWS_AS(
        fit_loglog_slope(std::vector<std::pair<double, double>>{{100.0, 1.0}, {100.0, 2.0}}),
        InvalidInput);
    CHECK_THROWS_AS(
        fit_loglog_slope(std::vector<std::pair<double, double>>{{100.0, 0.0}, {200.0, 1.0}}),
        InvalidInput);
    CHECK_THROWS_AS(
        fit_loglog_slope(std::vector<std::pair<double, double>>{{100.0, 1.0}, {200.0, -1.0}}),
        InvalidInput);
}

TEST_CASE("untilted bias matches the second-order expansion") {
    const auto normal = ReferenceDensity::normal();
    const Kernel kernel = Kernel::epanechnikov();
    const BiasReport r =
        expectation_quadrature(normal, kernel, TiltConfig{}, 0.1, 0, 0.0);
    // (h^2/2) * m2 * f''(0) = -3.98942e-4
    const double predicted = 0.5 * 0.01 * kernel.moment(2) * normal.derivative(2, 0.0);
    CHECK(std::abs(r.bias - predicted) <= 0.1 * std::abs(predicted));
    CHECK(r.bias == r.expected_value - r.truth);
    CHECK(r.bias_over_h2 == r.bias / (0.1 * 0.1));
    CHECK(r.truth == normal.derivative(0, 0.0));
}

TEST_CASE("bias shrinks monotonically as h decreases") {
    const auto normal = ReferenceDensity::normal();
    const Kernel kernel = Kernel::epanechnikov();
    double previous = std::numeric_limits<double>::infinity();
    for (double h : {0.2, 0.1, 0.05}) {
        const BiasReport r = expectation_quadrature(normal, kernel, TiltConfig{}, h, 0, 0.0);
        CHECK(std::abs(r.bias) < previous);
        previous = std::abs(r.bias);
    }
}

TEST_CASE("bias-cancelling constant halves the h^2 coefficient") {
    const auto normal = ReferenceDensity::normal();
    const Kernel kernel = Kernel::epanechnikov();
    const TiltConfig tilt = oracle_tilt(TiltConfig::kernel_default_lead(kernel));
    const BiasReport coarse = expectation_quadrature(normal, kernel, tilt, 0.2, 0, 0.0);
    const BiasReport fine = expectation_quadrature(normal, kernel, tilt, 0.1, 0, 0.0);
    CHECK(std::abs(fine.bias_over_h2) < 0.5 * std::abs(coarse.bias_over_h2));

    // the flipped sign must NOT cancel: the coefficient roughly doubles instead
    const TiltConfig wrong = oracle_tilt(-TiltConfig::kernel_default_lead(kernel));
    const BiasReport coarse_wrong = expectation_quadrature(normal, kernel, wrong, 0.2, 0, 0.0);
    const BiasReport fine_wrong = expectation_quadrature(normal, kernel, wrong, 0.1, 0, 0.0);
    CHECK(std::abs(fine_wrong.bias_over_h2) > 0.5 * std::abs(coarse_wrong.bias_over_h2));
}

TEST_CASE("expectation oracle covers the unbounded kernel") {
    const auto normal = ReferenceDensity::normal();
    const BiasReport r =
        expectation_quadrature(normal, Kernel::gaussian(), TiltConfig{}, 0.1, 1, 0.5);
    // E fhat'(x) ~ f'(x) + (h^2/2) m2 f'''(x)
    const double predicted = 0.5 * 0.01 * 1.0 * normal.derivative(3, 0.5);
    CHECK(std::abs(r.bias - predicted) <= 0.15 * std::abs(predicted));
}

TEST_CASE("expectation oracle validation") {
    const auto normal = ReferenceDensity::normal();
    CHECK_THROWS_AS(
        expectation_quadrature(normal, Kernel::epanechnikov(), TiltConfig{}, -0.1, 0, 0.0),
        InvalidConfig);
    CHECK_THROWS_AS(
        expectation_quadrature(normal, Kernel::epanechnikov(), TiltConfig{}, 0.1, 1, 0.0),
        UnsupportedDerivative);
    TiltConfig plugin;
    plugin.mode = TiltMode::Plugin;
    plugin.pilot_bandwidth = 0.3;
    CHECK_THROWS_AS(
        expectation_quadrature(normal, Kernel::epanechnikov(), plugin, 0.1, 0, 0.0),
        InvalidConfig);
}

TEST_CASE("plan validation") {
    ExperimentPlan plan = small_plan();
    CHECK_NOTHROW(plan.validate());

    plan.n_grid = {64};
    plan.replications = 1;
    CHECK_THROWS_AS(plan.validate(), InvalidPlan);

    plan = small_plan();
    plan.n_grid = {64, 128, 128, 256};
    CHECK_THROWS_AS(plan.validate(), InvalidPlan);

    plan = small_plan();
    plan.replications = 49;
    CHECK_THROWS_AS(plan.validate(), InvalidPlan);

    plan = small_plan();
    plan.eval_points.clear();
    CHECK_THROWS_AS(plan.validate(), InvalidPlan);

    CHECK_THROWS_AS(error_statistic_from_string("mode"), InvalidConfig);
}

TEST_CASE("small experiment runs, is deterministic, and is thread-invariant") {
    const ExperimentPlan plan = small_plan();
    const RateReport a = run_experiment(plan, 1);
    const RateReport b = run_experiment(plan, 1);
    const RateReport c = run_experiment(plan, 2);
    const RateReport d = run_experiment(plan, 4);
    CHECK(reports_identical(a, b));
    CHECK(reports_identical(a, c));
    CHECK(reports_identical(a, d));

    CHECK(a.rows.size() == plan.n_grid.size() * plan.eval_points.size());
    CHECK(a.theoretical_slope == -0.4);
    CHECK(a.fitted_slope < -0.1);
    CHECK(a.fitted_slope > -0.7);
    for (const auto& row : a.rows) {
        CHECK(row.error > 0.0);
        CHECK(row.std_error > 0.0);
        CHECK(row.excluded == 0);
    }
    CHECK(a.point_slopes.size() == plan.eval_points.size());
}

TEST_CASE("error statistics aggregate as documented") {
    ExperimentPlan plan = small_plan();
    plan.statistic = ErrorStatistic::MeanAbs;
    const RateReport mean_report = run_experiment(plan, 2);
    plan.statistic = ErrorStatistic::Rmse;
    const RateReport rmse_report = run_experiment(plan, 2);
    plan.statistic = ErrorStatistic::MedianAbs;
    const RateReport median_report = run_experiment(plan, 2);
    for (std::size_t i = 0; i < mean_report.rows.size(); ++i) {
        CHECK(rmse_report.rows[i].error >= mean_report.rows[i].error); // rmse >= mean
        CHECK(median_report.rows[i].error > 0.0);
    }
}

TEST_CASE("plugin tilt runs through the experiment loop") {
    ExperimentPlan plan = small_plan();
    plan.spec.tilt.mode = TiltMode::Plugin;
    plan.spec.tilt.lead_constant = TiltConfig::kernel_default_lead(plan.spec.kernel);
    plan.spec.tilt.pilot_bandwidth = 0.45;
    plan.spec.tilt.pilot_kernel = "triweight";
    const RateReport a = run_experiment(plan, 2);
    const RateReport b = run_experiment(plan, 1);
    CHECK(reports_identical(a, b));
    CHECK(a.rows.size() == plan.n_grid.size() * plan.eval_points.size());
    CHECK(a.fitted_slope < -0.1);
    CHECK(a.fitted_slope > -0.7);
}

TEST_CASE("tilt overflow beyond the cap fails the run") {
    ExperimentPlan plan = small_plan();
    plan.spec.tilt = oracle_tilt(1e6, 50.0); // clipped g makes |delta| >= 1 at these n
    CHECK_THROWS_AS(run_experiment(plan, 2), TiltOverflow);
}

TEST_CASE("untilted full-scale run recovers the -0.4 exponent") {
    ExperimentPlan plan;
    plan.density = ReferenceDensity::normal();
    plan.spec.kernel = Kernel::epanechnikov();
    plan.spec.r = 2;
    plan.spec.s = 0;
    plan.spec.bandwidth = BandwidthRule::rate(1.0);
    plan.spec.tilt = TiltConfig{}; // mode none
    plan.n_grid = {512, 1024, 2048, 4096, 8192, 16384};
    plan.replications = 200;
    plan.eval_points = {0.0, 0.5, 1.0};
    plan.base_seed = 424242;
    const RateReport report = run_experiment(plan);
    CHECK(std::abs(report.fitted_slope - (-0.4)) <= 0.12);
}

TEST_CASE("mixture densities run through the experiment loop") {
    ExperimentPlan plan = small_plan();
    plan.density = ReferenceDensity::bimodal();
    plan.spec.tilt = oracle_tilt(TiltConfig::kernel_default_lead(plan.spec.kernel));
    const RateReport bimodal = run_experiment(plan, 2);
    CHECK(bimodal.rows.size() == 12);
    CHECK(bimodal.fitted_slope < 0.0);

    plan.density = ReferenceDensity::claw();
    const RateReport claw = run_experiment(plan, 2);
    CHECK(claw.rows.size() == 12);
    for (const auto& row : claw.rows) CHECK(row.excluded == 0);
}

TEST_CASE("monte carlo mean of the raw estimator matches the quadrature oracle") {
    const auto normal = ReferenceDensity::normal();
    const Kernel kernel = Kernel::triweight();
    const TiltConfig tilt = oracle_tilt(TiltConfig::kernel_default_lead(kernel));
    const TiltSource source = oracle_source(normal);
    const double h = 0.15;
    const int s = 1;
    const double x = 0.3;
    const std::size_t n = 1000;
    const std::size_t reps = 400;

    std::vector<double> values(reps);
    parallel_for(reps, 2, [&](std::size_t k) {
        const auto sample = SeededSampler(normal, 555, k).sample(n);
        const auto g = tilt_values(source, tilt, sample);
        const TiltWeights w = compute_weights(sample, g, h, WeightPolicy::Signed);
        values[k] = weighted_derivative_value(sample, w.raw, kernel, h, s, x);
    });
    const double mean = testkit::precise_sum(values) / static_cast<double>(reps);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(reps - 1);
    const double se = std::sqrt(var / static_cast<double>(reps));

    const BiasReport oracle = expectation_quadrature(normal, kernel, tilt, h, s, x);
    CHECK(std::abs(mean - oracle.expected_value) <= 4.0 * se);
}

} // TEST_SUITE
