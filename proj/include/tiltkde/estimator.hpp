#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tiltkde/kernel.hpp"
#include "tiltkde/tilt.hpp"

namespace tiltkde {

//! h = c0 * n^{-1/(2r+1)}, the bandwidth the convergence-rate analysis asks
//! for. Requires even r >= 2, c0 > 0, n >= 1.
double bandwidth_rate(std::size_t n, int r, double c0 = 1.0);

struct BandwidthRule {
    enum class Kind { Explicit, Rate };
    Kind kind = Kind::Rate;
    double value = 0.0; //!< explicit bandwidth (Explicit) or c0 (Rate)

    static BandwidthRule fixed(double h) { return {Kind::Explicit, h}; }
    static BandwidthRule rate(double c0 = 1.0) { return {Kind::Rate, c0}; }
    double resolve(std::size_t n, int r) const;
};

//! Everything needed to evaluate the s-th derivative estimate: kernel, the
//! assumed smoothness r of f (even), target derivative order s, bandwidth
//! rule, and the tilt configuration.
struct EstimatorSpec {
    Kernel kernel = Kernel::epanechnikov();
    int r = 2;
    int s = 0;
    BandwidthRule bandwidth = BandwidthRule::rate();
    TiltConfig tilt;

    void validate() const;
};

struct WeightsSummary {
    double min = 0.0;
    double max = 0.0;
    std::size_t negative_count = 0;
};

struct EstimateResult {
    std::vector<double> points;
    std::vector<double> values;
    double h_used = 0.0;
    double delta = 0.0;
    WeightsSummary weights_summary;
};

//! Core weighted sum: h^{-(s+1)} * sum_i w_i K^{(s)}((x - X_i)/h) at one
//! query point. The sample must be sorted ascending; compact kernels are
//! evaluated over the support window located by binary search, and terms are
//! added in ascending index order so results are reproducible.
double weighted_derivative_value(std::span<const double> sample, std::span<const double> weights,
                                 const Kernel& kernel, double h, int s, double x);

std::vector<double> weighted_derivative_sum(std::span<const double> sample,
                                            std::span<const double> weights,
                                            const Kernel& kernel, double h, int s,
                                            std::span<const double> queries);

//! Conventional (equal-weight) value at one point without materialising a
//! weight vector.
double conventional_value(std::span<const double> sample, const Kernel& kernel, double h,
                          int s, double x);

//! Tilted estimate at the query points. Resolves h from spec.bandwidth; the
//! weights must have been built for the same sample.
EstimateResult estimate(const EstimatorSpec& spec, std::span<const double> sample,
                        const TiltWeights& weights, std::span<const double> queries);

//! Conventional kernel estimate: estimate with uniform 1/n weights.
EstimateResult conventional_estimate(std::span<const double> sample, const Kernel& kernel,
                                     double h, int s, std::span<const double> queries);

} // namespace tiltkde
