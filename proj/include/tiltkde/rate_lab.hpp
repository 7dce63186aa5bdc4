#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tiltkde/density.hpp"
#include "tiltkde/estimator.hpp"
#include "tiltkde/kernel.hpp"
#include "tiltkde/tilt.hpp"

namespace tiltkde {

//! Quadrature expectation of the non-standardised tilted estimator at one
//! point, against the analytic truth. bias = expected_value - truth.
struct BiasReport {
    double h = 0.0;
    double x = 0.0;
    double expected_value = 0.0;
    double truth = 0.0;
    double bias = 0.0;
    double bias_over_h2 = 0.0;
};

//! E ftilde_n^{(s)}(x) = h^{-s} int K^{(s)}(u) (1 + h^2 g(x-hu)) f(x-hu) du
//! by adaptive quadrature over the kernel window, absolute tolerance 1e-10.
//! Tilt mode must be none or oracle (the expectation is a population
//! quantity; there is no sample for a plugin pilot).
BiasReport expectation_quadrature(const ReferenceDensity& density, const Kernel& kernel,
                                  const TiltConfig& tilt, double h, int s, double x);

enum class ErrorStatistic { MedianAbs, MeanAbs, Rmse };

std::string to_string(ErrorStatistic statistic);
ErrorStatistic error_statistic_from_string(std::string_view text);

struct ExperimentPlan {
    ReferenceDensity density = ReferenceDensity::normal();
    EstimatorSpec spec;
    std::vector<std::size_t> n_grid;
    std::size_t replications = 200;
    std::vector<double> eval_points = {0.0, 0.5, 1.0};
    std::uint64_t base_seed = 0;
    ErrorStatistic statistic = ErrorStatistic::MedianAbs;
    double tolerance = 0.12;

    //! n_grid strictly increasing with >= 4 entries, replications >= 50,
    //! eval_points nonempty; throws InvalidPlan otherwise.
    void validate() const;
};

struct RateRow {
    std::size_t n = 0;
    double x = 0.0;
    double h = 0.0;
    double error = 0.0;     //!< aggregated |fhat^(s)(x) - f^(s)(x)| per the plan statistic
    double std_error = 0.0; //!< Monte Carlo standard error of that statistic
    std::size_t excluded = 0; //!< replications dropped at this n (tilt overflow)
};

struct PointSlope {
    double x = 0.0;
    double slope = 0.0;
    double std_error = 0.0;
};

struct RateReport {
    std::vector<RateRow> rows;
    std::vector<PointSlope> point_slopes;
    double fitted_slope = 0.0;      //!< per-point slopes pooled by averaging
    double slope_std_error = 0.0;
    double theoretical_slope = 0.0; //!< -(r-s)/(2r+1)
    double tolerance = 0.0;
    bool pass = false;
};

//! -(r-s)/(2r+1) from exact integer arithmetic, converted once.
double theoretical_slope(int r, int s);

//! Ordinary least squares of log(error) on log(n). Needs >= 2 distinct n and
//! strictly positive errors; std_error is 0 for a two-point fit.
struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
};
SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

//! Seeded Monte Carlo sweep over plan.n_grid: replication k draws with
//! stream_id k, builds weights, evaluates errors at plan.eval_points, and
//! aggregates per (n, point). Tilt overflows are excluded per replication and
//! counted; more than 1% of replications excluded at any n fails the run.
//! Deterministic given base_seed regardless of `threads` (0 = auto).
RateReport run_experiment(const ExperimentPlan& plan, unsigned threads = 0);

} // namespace tiltkde
