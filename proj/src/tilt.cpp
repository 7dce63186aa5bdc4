#include "tiltkde/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "tiltkde/errors.hpp"
#include "tiltkde/estimator.hpp"
#include "tiltkde/summation.hpp"

namespace tiltkde {

std::string to_string(TiltMode mode) {
    switch (mode) {
        case TiltMode::None: return "none";
        case TiltMode::Oracle: return "oracle";
        case TiltMode::Plugin: return "plugin";
    }
    return "none";
}

std::string to_string(WeightPolicy policy) {
    return policy == WeightPolicy::Signed ? "signed" : "clamp";
}

TiltMode tilt_mode_from_string(std::string_view text) {
    if (text == "none") return TiltMode::None;
    if (text == "oracle") return TiltMode::Oracle;
    if (text == "plugin") return TiltMode::Plugin;
    throw InvalidConfig("unknown tilt mode '" + std::string(text) +
                        "' (expected none|oracle|plugin)");
}

WeightPolicy weight_policy_from_string(std::string_view text) {
    if (text == "signed") return WeightPolicy::Signed;
    if (text == "clamp") return WeightPolicy::ClampRenormalize;
    throw InvalidConfig("unknown weight policy '" + std::string(text) +
                        "' (expected signed|clamp)");
}

double TiltConfig::kernel_default_lead(const Kernel& kernel) {
    return -0.5 * kernel.moment(2);
}

void TiltConfig::validate() const {
    if (!(clip_bound > 0.0)) throw InvalidConfig("clip bound must be positive");
    if (!std::isfinite(lead_constant)) throw InvalidConfig("tilt constant must be finite");
    if (mode == TiltMode::Plugin && !(pilot_bandwidth > 0.0))
        throw InvalidConfig("plugin tilt requires a positive pilot bandwidth");
}

TiltSource oracle_source(const ReferenceDensity& density) {
    return TiltSource{
        [density](double x) { return density.pdf(x); },
        [density](double x) { return density.derivative(2, x); },
    };
}

TiltSource pilot_estimates(std::vector<double> sample, double pilot_bandwidth,
                           const Kernel& kernel) {
    if (kernel.smoothness() < 2)
        throw UnsupportedDerivative("pilot estimates need a kernel with smoothness >= 2, got '" +
                                    kernel.name() + "'");
    if (!(pilot_bandwidth > 0.0)) throw InvalidConfig("pilot bandwidth must be positive");
    if (sample.empty()) throw InvalidInput("pilot estimates need a nonempty sample");
    if (!std::is_sorted(sample.begin(), sample.end()))
        throw InvalidInput("pilot estimates need a sorted sample");

    auto shared = std::make_shared<const std::vector<double>>(std::move(sample));
    return TiltSource{
        [shared, kernel, pilot_bandwidth](double x) {
            return conventional_value(*shared, kernel, pilot_bandwidth, 0, x);
        },
        [shared, kernel, pilot_bandwidth](double x) {
            return conventional_value(*shared, kernel, pilot_bandwidth, 2, x);
        },
    };
}

TiltSource make_tilt_source(const TiltConfig& config, const ReferenceDensity* truth,
                            std::span<const double> sample) {
    switch (config.mode) {
        case TiltMode::None:
            return TiltSource{};
        case TiltMode::Oracle:
            if (truth == nullptr)
                throw InvalidConfig("oracle tilt requires a reference density as ground truth");
            return oracle_source(*truth);
        case TiltMode::Plugin:
            return pilot_estimates(std::vector<double>(sample.begin(), sample.end()),
                                   config.pilot_bandwidth, Kernel::by_name(config.pilot_kernel));
    }
    return TiltSource{};
}

double tilt_g(const TiltSource& source, const TiltConfig& config, double x) {
    if (config.mode == TiltMode::None) return 0.0;
    const double curvature = source.second_derivative(x);
    const double density = source.pdf(x);
    double value;
    if (density == 0.0) {
        const double numerator = config.lead_constant * curvature;
        value = numerator > 0.0 ? config.clip_bound : (numerator < 0.0 ? -config.clip_bound : 0.0);
    } else {
        value = config.lead_constant * curvature / density;
    }
    if (config.extra_terms) value += config.extra_terms(x);
    return std::clamp(value, -config.clip_bound, config.clip_bound);
}

std::vector<double> tilt_values(const TiltSource& source, const TiltConfig& config,
                                std::span<const double> sample) {
    std::vector<double> out(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) out[i] = tilt_g(source, config, sample[i]);
    return out;
}

double compute_delta(std::span<const double> sample, std::span<const double> g_values,
                     double h) {
    if (sample.empty()) throw InvalidInput("delta needs a nonempty sample");
    if (sample.size() != g_values.size())
        throw InvalidInput("g values must align with the sample");
    const double n = static_cast<double>(sample.size());
    return (h * h) * compensated_total(g_values) / n;
}

TiltWeights uniform_weights(std::size_t n) {
    if (n == 0) throw InvalidInput("weights need n >= 1");
    TiltWeights w;
    w.p.assign(n, 1.0 / static_cast<double>(n));
    w.raw = w.p;
    w.delta = 0.0;
    w.policy_applied = WeightPolicy::Signed;
    return w;
}

TiltWeights compute_weights(std::span<const double> sample, std::span<const double> g_values,
                            double h, WeightPolicy policy) {
    const double delta = compute_delta(sample, g_values, h);
    if (!(std::abs(delta) < 1.0))
        throw TiltOverflow("|delta| = " + std::to_string(std::abs(delta)) +
                           " >= 1; standardisation unstable (check bandwidth and clip bound)");

    const std::size_t n = sample.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double h2 = h * h;
    const double denom = 1.0 + delta;

    TiltWeights w;
    w.delta = delta;
    w.policy_applied = policy;
    w.raw.resize(n);
    w.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.raw[i] = inv_n * (1.0 + h2 * g_values[i]);
        w.p[i] = w.raw[i] / denom;
    }

    if (policy == WeightPolicy::ClampRenormalize) {
        bool any_negative = false;
        for (double& v : w.p) {
            if (v < 0.0) {
                v = 0.0;
                any_negative = true;
            }
        }
        if (any_negative) {
            const double kept = compensated_total(w.p);
            if (!(kept > 0.0))
                throw TiltOverflow("all weights clamped to zero; tilt is degenerate");
            for (double& v : w.p) v /= kept;
        }
    }
    return w;
}

} // namespace tiltkde
