#include "tiltkde/rate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tiltkde/errors.hpp"
#include "tiltkde/parallel.hpp"
#include "tiltkde/quadrature.hpp"
#include "tiltkde/summation.hpp"

namespace tiltkde {

std::string to_string(ErrorStatistic statistic) {
    switch (statistic) {
        case ErrorStatistic::MedianAbs: return "median";
        case ErrorStatistic::MeanAbs: return "mean";
        case ErrorStatistic::Rmse: return "rmse";
    }
    return "median";
}

ErrorStatistic error_statistic_from_string(std::string_view text) {
    if (text == "median") return ErrorStatistic::MedianAbs;
    if (text == "mean") return ErrorStatistic::MeanAbs;
    if (text == "rmse") return ErrorStatistic::Rmse;
    throw InvalidConfig("unknown error statistic '" + std::string(text) +
                        "' (expected median|mean|rmse)");
}

BiasReport expectation_quadrature(const ReferenceDensity& density, const Kernel& kernel,
                                  const TiltConfig& tilt, double h, int s, double x) {
    if (!(h > 0.0)) throw InvalidConfig("bandwidth must be positive");
    if (s < 0) throw InvalidInput("derivative order must be nonnegative");
    if (s > kernel.smoothness())
        throw UnsupportedDerivative("s exceeds kernel smoothness (s=" + std::to_string(s) +
                                    ", " + kernel.name() + ")");
    if (tilt.mode == TiltMode::Plugin)
        throw InvalidConfig("expectation oracle supports tilt mode none or oracle only");
    tilt.validate();

    const TiltSource source = make_tilt_source(tilt, &density, {});
    const double h2 = h * h;
    const auto integrand = [&](double u) {
        const double y = x - h * u;
        return kernel.derivative(s, u) * (1.0 + h2 * tilt_g(source, tilt, y)) * density.pdf(y);
    };
    const double halfwidth = kernel.window_halfwidth();
    const double tol = 1e-10 * std::pow(h, s);
    const double integral = quadrature::adaptive_simpson(integrand, -halfwidth, halfwidth, tol);

    BiasReport report;
    report.h = h;
    report.x = x;
    report.expected_value = integral * std::pow(h, -s);
    report.truth = density.derivative(s, x);
    report.bias = report.expected_value - report.truth;
    report.bias_over_h2 = report.bias / h2;
    return report;
}

void ExperimentPlan::validate() const {
    if (n_grid.size() < 4)
        throw InvalidPlan("n_grid needs at least 4 entries, got " +
                          std::to_string(n_grid.size()));
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
        if (n_grid[i] >= n_grid[i + 1]) throw InvalidPlan("n_grid must be strictly increasing");
    if (n_grid.front() == 0) throw InvalidPlan("n_grid entries must be positive");
    if (replications < 50)
        throw InvalidPlan("slope fits need at least 50 replications, got " +
                          std::to_string(replications));
    if (eval_points.empty()) throw InvalidPlan("eval_points must be nonempty");
    if (!(tolerance > 0.0)) throw InvalidPlan("tolerance must be positive");
}

double theoretical_slope(int r, int s) {
    if (r < 2 || r % 2 != 0) throw InvalidConfig("theoretical slope requires even r >= 2");
    if (s < 0 || s > r) throw InvalidConfig("theoretical slope requires 0 <= s <= r");
    const long long numerator = static_cast<long long>(r) - static_cast<long long>(s);
    const long long denominator = 2LL * static_cast<long long>(r) + 1LL;
    return -static_cast<double>(numerator) / static_cast<double>(denominator);
}

SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
    const std::size_t m = points.size();
    if (m < 2) throw InvalidInput("slope fit needs at least 2 points");
    std::vector<double> xs(m);
    std::vector<double> ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(points[i].first > 0.0)) throw InvalidInput("slope fit needs positive n");
        if (!(points[i].second > 0.0))
            throw InvalidInput("slope fit saw a nonpositive error; perturb the eval points");
        xs[i] = std::log(points[i].first);
        ys[i] = std::log(points[i].second);
    }
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < m; ++i)
        if (xs[i] != xs[0]) {
            distinct = 2;
            break;
        }
    if (distinct < 2) throw InvalidInput("slope fit needs at least 2 distinct n values");

    const double xbar = compensated_total(xs) / static_cast<double>(m);
    const double ybar = compensated_total(ys) / static_cast<double>(m);
    CompensatedSum sxx;
    CompensatedSum sxy;
    for (std::size_t i = 0; i < m; ++i) {
        sxx.add((xs[i] - xbar) * (xs[i] - xbar));
        sxy.add((xs[i] - xbar) * (ys[i] - ybar));
    }
    SlopeFit fit;
    fit.slope = sxy.value() / sxx.value();
    if (m > 2) {
        const double intercept = ybar - fit.slope * xbar;
        CompensatedSum rss;
        for (std::size_t i = 0; i < m; ++i) {
            const double resid = ys[i] - intercept - fit.slope * xs[i];
            rss.add(resid * resid);
        }
        fit.std_error = std::sqrt(rss.value() / (static_cast<double>(m - 2) * sxx.value()));
    }
    return fit;
}

namespace {

struct Aggregate {
    double value = 0.0;
    double std_error = 0.0;
};

Aggregate aggregate_errors(std::vector<double> errors, ErrorStatistic statistic) {
    const std::size_t m = errors.size();
    if (m == 0) throw InvalidInput("no replications survived aggregation");
    const double dm = static_cast<double>(m);
    const double mean = compensated_total(errors) / dm;
    double sd = 0.0;
    if (m > 1) {
        CompensatedSum ss;
        for (double e : errors) ss.add((e - mean) * (e - mean));
        sd = std::sqrt(ss.value() / (dm - 1.0));
    }
    Aggregate out;
    switch (statistic) {
        case ErrorStatistic::MeanAbs:
            out.value = mean;
            out.std_error = sd / std::sqrt(dm);
            break;
        case ErrorStatistic::MedianAbs: {
            std::sort(errors.begin(), errors.end());
            out.value = (m % 2 == 1) ? errors[m / 2]
                                     : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);
            // asymptotic efficiency factor of the sample median
            out.std_error = 1.2533141373155003 * sd / std::sqrt(dm);
            break;
        }
        case ErrorStatistic::Rmse: {
            CompensatedSum sq;
            for (double e : errors) sq.add(e * e);
            const double msq = sq.value() / dm;
            out.value = std::sqrt(msq);
            if (out.value > 0.0 && m > 1) {
                const double mean_sq = msq;
                CompensatedSum var_sq;
                for (double e : errors) var_sq.add((e * e - mean_sq) * (e * e - mean_sq));
                const double sd_sq = std::sqrt(var_sq.value() / (dm - 1.0));
                out.std_error = sd_sq / (2.0 * out.value * std::sqrt(dm));
            }
            break;
        }
    }
    return out;
}

} // namespace

RateReport run_experiment(const ExperimentPlan& plan, unsigned threads) {
    plan.validate();
    plan.spec.validate();
    const EstimatorSpec& spec = plan.spec;
    const std::size_t point_count = plan.eval_points.size();
    const std::size_t reps = plan.replications;

    std::vector<double> truth(point_count);
    for (std::size_t p = 0; p < point_count; ++p)
        truth[p] = plan.density.derivative(spec.s, plan.eval_points[p]);

    RateReport report;
    report.theoretical_slope = theoretical_slope(spec.r, spec.s);
    report.tolerance = plan.tolerance;

    std::vector<std::vector<std::pair<double, double>>> curves(point_count);

    for (const std::size_t n : plan.n_grid) {
        const double h = spec.bandwidth.resolve(n, spec.r);
        std::vector<double> errors(point_count * reps,
                                   std::numeric_limits<double>::quiet_NaN());
        std::vector<char> excluded(reps, 0);

        parallel_for(reps, threads, [&](std::size_t k) {
            const auto sample = SeededSampler(plan.density, plan.base_seed, k).sample(n);
            std::vector<double> g;
            if (spec.tilt.mode == TiltMode::None) {
                g.assign(n, 0.0);
            } else {
                const TiltSource source = make_tilt_source(spec.tilt, &plan.density, sample);
                g = tilt_values(source, spec.tilt, sample);
            }
            TiltWeights weights;
            try {
                weights = compute_weights(sample, g, h, spec.tilt.policy);
            } catch (const TiltOverflow&) {
                excluded[k] = 1;
                return;
            }
            for (std::size_t p = 0; p < point_count; ++p) {
                const double value = weighted_derivative_value(sample, weights.p, spec.kernel,
                                                               h, spec.s, plan.eval_points[p]);
                errors[p * reps + k] = std::abs(value - truth[p]);
            }
        });

        std::size_t excluded_count = 0;
        for (char flag : excluded) excluded_count += static_cast<std::size_t>(flag);
        if (excluded_count * 100 > reps)
            throw TiltOverflow("tilt overflow excluded " + std::to_string(excluded_count) +
                               " of " + std::to_string(reps) + " replications at n=" +
                               std::to_string(n) + " (cap is 1%)");

        for (std::size_t p = 0; p < point_count; ++p) {
            std::vector<double> included;
            included.reserve(reps - excluded_count);
            for (std::size_t k = 0; k < reps; ++k)
                if (!excluded[k]) included.push_back(errors[p * reps + k]);
            const Aggregate agg = aggregate_errors(std::move(included), plan.statistic);
            RateRow row;
            row.n = n;
            row.x = plan.eval_points[p];
            row.h = h;
            row.error = agg.value;
            row.std_error = agg.std_error;
            row.excluded = excluded_count;
            report.rows.push_back(row);
            curves[p].emplace_back(static_cast<double>(n), agg.value);
        }
    }

    CompensatedSum slope_sum;
    CompensatedSum var_sum;
    for (std::size_t p = 0; p < point_count; ++p) {
        const SlopeFit fit = fit_loglog_slope(curves[p]);
        report.point_slopes.push_back({plan.eval_points[p], fit.slope, fit.std_error});
        slope_sum.add(fit.slope);
        var_sum.add(fit.std_error * fit.std_error);
    }
    const double dp = static_cast<double>(point_count);
    report.fitted_slope = slope_sum.value() / dp;
    report.slope_std_error = std::sqrt(var_sum.value()) / dp;
    report.pass = std::abs(report.fitted_slope - report.theoretical_slope) <= report.tolerance;
    return report;
}

} // namespace tiltkde
