#include "tiltkde/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "tiltkde/errors.hpp"

namespace tiltkde {

double bandwidth_rate(std::size_t n, int r, double c0) {
    if (n == 0) throw InvalidInput("bandwidth rule needs n >= 1");
    if (r < 2 || r % 2 != 0)
        throw InvalidConfig("bandwidth rule requires even r >= 2, got r=" + std::to_string(r));
    if (!(c0 > 0.0)) throw InvalidConfig("bandwidth constant c0 must be positive");
    return c0 * std::pow(static_cast<double>(n), -1.0 / static_cast<double>(2LL * r + 1));
}

double BandwidthRule::resolve(std::size_t n, int r) const {
    if (kind == Kind::Explicit) {
        if (!(value > 0.0)) throw InvalidConfig("explicit bandwidth must be positive");
        return value;
    }
    return bandwidth_rate(n, r, value);
}

void EstimatorSpec::validate() const {
    if (r < 2 || r % 2 != 0)
        throw InvalidConfig("r must be an even integer >= 2, got r=" + std::to_string(r));
    if (s < 0 || s > r)
        throw InvalidConfig("s must satisfy 0 <= s <= r, got s=" + std::to_string(s));
    if (s > kernel.smoothness())
        throw UnsupportedDerivative("s exceeds kernel smoothness (s=" + std::to_string(s) +
                                    ", " + kernel.name() + " smoothness=" +
                                    std::to_string(kernel.smoothness()) + ")");
    if (bandwidth.kind == BandwidthRule::Kind::Explicit && !(bandwidth.value > 0.0))
        throw InvalidConfig("explicit bandwidth must be positive");
    if (bandwidth.kind == BandwidthRule::Kind::Rate && !(bandwidth.value > 0.0))
        throw InvalidConfig("bandwidth constant c0 must be positive");
    tilt.validate();
}

double weighted_derivative_value(std::span<const double> sample, std::span<const double> weights,
                                 const Kernel& kernel, double h, int s, double x) {
    std::size_t begin = 0;
    std::size_t end = sample.size();
    if (kernel.compact()) {
        const double reach = h * kernel.support_halfwidth();
        begin = static_cast<std::size_t>(
            std::lower_bound(sample.begin(), sample.end(), x - reach) - sample.begin());
        end = static_cast<std::size_t>(
            std::upper_bound(sample.begin(), sample.end(), x + reach) - sample.begin());
    }
    // Terms are added in ascending index order and the argument is formed as
    // (x - X_i)/h, so the windowed sum is bit-identical to the full sum (the
    // skipped terms are exact zeros).
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        sum += weights[i] * kernel.derivative(s, (x - sample[i]) / h);
    return sum * std::pow(h, -(s + 1));
}

std::vector<double> weighted_derivative_sum(std::span<const double> sample,
                                            std::span<const double> weights,
                                            const Kernel& kernel, double h, int s,
                                            std::span<const double> queries) {
    if (sample.empty()) throw InvalidInput("estimate needs a nonempty sample");
    if (sample.size() != weights.size())
        throw InvalidInput("weights length must match sample length");
    if (!(h > 0.0)) throw InvalidConfig("bandwidth must be positive");
    if (s > kernel.smoothness())
        throw UnsupportedDerivative("s exceeds kernel smoothness (s=" + std::to_string(s) +
                                    ", " + kernel.name() + " smoothness=" +
                                    std::to_string(kernel.smoothness()) + ")");
    std::vector<double> values(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q)
        values[q] = weighted_derivative_value(sample, weights, kernel, h, s, queries[q]);
    return values;
}

double conventional_value(std::span<const double> sample, const Kernel& kernel, double h,
                          int s, double x) {
    std::size_t begin = 0;
    std::size_t end = sample.size();
    if (kernel.compact()) {
        const double reach = h * kernel.support_halfwidth();
        begin = static_cast<std::size_t>(
            std::lower_bound(sample.begin(), sample.end(), x - reach) - sample.begin());
        end = static_cast<std::size_t>(
            std::upper_bound(sample.begin(), sample.end(), x + reach) - sample.begin());
    }
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        sum += kernel.derivative(s, (x - sample[i]) / h);
    const double n = static_cast<double>(sample.size());
    return sum / n * std::pow(h, -(s + 1));
}

namespace {

WeightsSummary summarize(std::span<const double> weights) {
    WeightsSummary out;
    if (weights.empty()) return out;
    out.min = weights[0];
    out.max = weights[0];
    for (double w : weights) {
        out.min = std::min(out.min, w);
        out.max = std::max(out.max, w);
        if (w < 0.0) ++out.negative_count;
    }
    return out;
}

} // namespace

EstimateResult estimate(const EstimatorSpec& spec, std::span<const double> sample,
                        const TiltWeights& weights, std::span<const double> queries) {
    spec.validate();
    const double h = spec.bandwidth.resolve(sample.size(), spec.r);
    EstimateResult result;
    result.points.assign(queries.begin(), queries.end());
    result.values = weighted_derivative_sum(sample, weights.p, spec.kernel, h, spec.s, queries);
    result.h_used = h;
    result.delta = weights.delta;
    result.weights_summary = summarize(weights.p);
    return result;
}

EstimateResult conventional_estimate(std::span<const double> sample, const Kernel& kernel,
                                     double h, int s, std::span<const double> queries) {
    EstimatorSpec spec;
    spec.kernel = kernel;
    spec.r = std::max(2, s % 2 == 0 ? s : s + 1);
    spec.s = s;
    spec.bandwidth = BandwidthRule::fixed(h);
    return estimate(spec, sample, uniform_weights(sample.size()), queries);
}

} // namespace tiltkde
