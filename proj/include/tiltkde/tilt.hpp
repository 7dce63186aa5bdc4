#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tiltkde/density.hpp"
#include "tiltkde/kernel.hpp"

namespace tiltkde {

enum class TiltMode { None, Oracle, Plugin };
enum class WeightPolicy { Signed, ClampRenormalize };

std::string to_string(TiltMode mode);
std::string to_string(WeightPolicy policy);
TiltMode tilt_mode_from_string(std::string_view text);
WeightPolicy weight_policy_from_string(std::string_view text);

//! Configuration of the tilt function g and of the weight construction.
//! g(x) = clip(lead_constant * f''(x)/f(x) + extra_terms(x), +-clip_bound).
struct TiltConfig {
    TiltMode mode = TiltMode::None;
    double lead_constant = 0.0; //!< coefficient c of f''/f
    double clip_bound = 50.0;
    WeightPolicy policy = WeightPolicy::Signed;
    double pilot_bandwidth = 0.0; //!< required > 0 in plugin mode
    std::string pilot_kernel = "triweight"; //!< pilot kernel name, smoothness >= 2
    //! Optional higher-order correction added to c*f''/f before clipping
    //! (extension point; no built-in recursion for those terms).
    std::function<double(double)> extra_terms;

    //! Coefficient that cancels the h^2 bias term for this kernel: -moment(K,2)/2.
    static double kernel_default_lead(const Kernel& kernel);

    void validate() const;
};

//! The source of density knowledge the tilt function reads: the true f and f''
//! in oracle mode, pilot kernel estimates in plugin mode.
struct TiltSource {
    std::function<double(double)> pdf;
    std::function<double(double)> second_derivative;
};

TiltSource oracle_source(const ReferenceDensity& density);

//! Pilot source: conventional equal-weight kernel estimates of f and f'' at
//! the pilot bandwidth, evaluated lazily at query points. Requires a kernel
//! with smoothness >= 2.
TiltSource pilot_estimates(std::vector<double> sample, double pilot_bandwidth,
                           const Kernel& kernel);

//! Source matching the configured mode: empty for none, analytic for oracle
//! (requires truth), pilot estimates built from the sample for plugin.
TiltSource make_tilt_source(const TiltConfig& config, const ReferenceDensity* truth,
                            std::span<const double> sample);

//! g at one point: clip(c * f''(x)/f(x) [+ extra], +-clip_bound). Mode none
//! returns 0. A zero denominator yields the clipped extreme of matching sign.
double tilt_g(const TiltSource& source, const TiltConfig& config, double x);

std::vector<double> tilt_values(const TiltSource& source, const TiltConfig& config,
                                std::span<const double> sample);

//! Delta_n = (h^2 / n) * sum g(X_i).
double compute_delta(std::span<const double> sample, std::span<const double> g_values,
                     double h);

struct TiltWeights {
    std::vector<double> p;    //!< standardised weights, sum exactly 1
    std::vector<double> raw;  //!< non-standardised weights (1 + h^2 g(X_i))/n
    double delta = 0.0;       //!< Delta_n
    WeightPolicy policy_applied = WeightPolicy::Signed;
};

//! Uniform 1/n weights (the conventional estimator's weights).
TiltWeights uniform_weights(std::size_t n);

//! Builds p_i = raw_i / (1 + Delta_n) and applies the weight policy.
//! Throws TiltOverflow when |Delta_n| >= 1.
TiltWeights compute_weights(std::span<const double> sample, std::span<const double> g_values,
                            double h, WeightPolicy policy);

} // namespace tiltkde
