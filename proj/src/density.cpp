#include "tiltkde/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tiltkde/errors.hpp"
#include "tiltkde/rng.hpp"

namespace tiltkde {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double standard_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double hermite(int s, double z) {
    double prev = 1.0;
    if (s == 0) return prev;
    double cur = z;
    for (int k = 1; k < s; ++k) {
        const double next = z * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

} // namespace

ReferenceDensity::ReferenceDensity(std::string name, std::vector<MixtureComponent> components)
    : name_(std::move(name)), components_(std::move(components)) {
    if (components_.empty()) throw InvalidConfig("density needs at least one mixture component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (c.weight < 0.0) throw InvalidConfig("mixture weights must be nonnegative");
        if (!(c.stddev > 0.0)) throw InvalidConfig("mixture stddev must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw InvalidConfig("mixture weights must sum to 1");
}

ReferenceDensity ReferenceDensity::normal() {
    return ReferenceDensity("normal", {{1.0, 0.0, 1.0}});
}

ReferenceDensity ReferenceDensity::bimodal() {
    return ReferenceDensity("bimodal", {{0.5, -1.5, 0.75}, {0.5, 1.5, 0.75}});
}

ReferenceDensity ReferenceDensity::claw() {
    return ReferenceDensity("claw", {{0.5, 0.0, 1.0}, {0.25, -1.0, 0.3}, {0.25, 1.0, 0.3}});
}

ReferenceDensity ReferenceDensity::by_name(std::string_view name) {
    if (name == "normal") return normal();
    if (name == "bimodal") return bimodal();
    if (name == "claw") return claw();
    throw InvalidConfig("unknown density '" + std::string(name) +
                        "' (expected normal|bimodal|claw)");
}

const std::vector<std::string>& ReferenceDensity::names() {
    static const std::vector<std::string> list = {"normal", "bimodal", "claw"};
    return list;
}

double ReferenceDensity::pdf(double x) const {
    double sum = 0.0;
    for (const auto& c : components_) {
        const double z = (x - c.mean) / c.stddev;
        sum += c.weight * standard_normal_pdf(z) / c.stddev;
    }
    return sum;
}

double ReferenceDensity::derivative(int s, double x) const {
    if (s < 0) throw InvalidInput("derivative order must be nonnegative");
    const double sign = (s % 2 == 0) ? 1.0 : -1.0;
    double sum = 0.0;
    for (const auto& c : components_) {
        const double z = (x - c.mean) / c.stddev;
        const double term = sign * hermite(s, z) * standard_normal_pdf(z);
        sum += c.weight * term / (c.stddev * std::pow(c.stddev, s));
    }
    return sum;
}

double ReferenceDensity::cdf(double x) const {
    double sum = 0.0;
    for (const auto& c : components_)
        sum += c.weight * standard_normal_cdf((x - c.mean) / c.stddev);
    return sum;
}

std::vector<double> SeededSampler::sample(std::size_t n) const {
    if (n == 0) throw InvalidInput("sample size must be at least 1");
    const auto& comps = density_.components();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u_comp = rng::uniform_co(seed_, stream_id_, i, 0);
        std::size_t pick = comps.size() - 1;
        double acc = 0.0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            acc += comps[c].weight;
            if (u_comp < acc) {
                pick = c;
                break;
            }
        }
        // Box-Muller: consumes a fixed pair of uniforms per draw, which keeps
        // the draw a pure function of its counter.
        const double u1 = rng::uniform_oc(seed_, stream_id_, i, 1);
        const double u2 = rng::uniform_co(seed_, stream_id_, i, 2);
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        out[i] = comps[pick].mean + comps[pick].stddev * z;
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace tiltkde
