#include "tiltkde/kernel.hpp"

#include <cmath>

#include "tiltkde/errors.hpp"
#include "tiltkde/quadrature.hpp"

namespace tiltkde {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr int kMomentCacheMax = 8;

double standard_normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

// Probabilists' Hermite polynomial He_s(u).
double hermite(int s, double u) {
    double prev = 1.0;
    if (s == 0) return prev;
    double cur = u;
    for (int k = 1; k < s; ++k) {
        const double next = u * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> differentiate(const std::vector<double>& coeffs) {
    std::vector<double> out;
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        out.push_back(coeffs[k] * static_cast<double>(k));
    if (out.empty()) out.push_back(0.0);
    return out;
}

double horner(const std::vector<double>& coeffs, double u) {
    double value = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) value = value * u + coeffs[k];
    return value;
}

} // namespace

Kernel::Kernel(std::string name, Family family, int smoothness, double halfwidth,
               std::vector<double> coefficients)
    : name_(std::move(name)), family_(family), smoothness_(smoothness), halfwidth_(halfwidth) {
    if (family_ == Family::Polynomial) {
        derivative_polys_.push_back(std::move(coefficients));
        const int table_depth = smoothness_;
        for (int s = 0; s < table_depth; ++s)
            derivative_polys_.push_back(differentiate(derivative_polys_.back()));
    }
    moments_.resize(kMomentCacheMax + 1, 0.0);
    for (int j = 0; j <= kMomentCacheMax; j += 2) moments_[j] = moment_by_quadrature(j);
}

Kernel Kernel::epanechnikov() {
    return Kernel("epanechnikov", Family::Polynomial, 0, 1.0, {0.75, 0.0, -0.75});
}

Kernel Kernel::biweight() {
    return Kernel("biweight", Family::Polynomial, 1, 1.0,
                  {15.0 / 16.0, 0.0, -15.0 / 8.0, 0.0, 15.0 / 16.0});
}

Kernel Kernel::triweight() {
    return Kernel("triweight", Family::Polynomial, 2, 1.0,
                  {35.0 / 32.0, 0.0, -105.0 / 32.0, 0.0, 105.0 / 32.0, 0.0, -35.0 / 32.0});
}

Kernel Kernel::gaussian() {
    return Kernel("gaussian", Family::Gaussian, kUnboundedSmoothness,
                  std::numeric_limits<double>::infinity(), {});
}

Kernel Kernel::by_name(std::string_view name) {
    if (name == "epanechnikov") return epanechnikov();
    if (name == "biweight") return biweight();
    if (name == "triweight") return triweight();
    if (name == "gaussian") return gaussian();
    throw InvalidConfig("unknown kernel '" + std::string(name) +
                        "' (expected epanechnikov|biweight|triweight|gaussian)");
}

const std::vector<std::string>& Kernel::names() {
    static const std::vector<std::string> list = {"epanechnikov", "biweight", "triweight",
                                                  "gaussian"};
    return list;
}

double Kernel::window_halfwidth() const { return compact() ? halfwidth_ : 12.0; }

double Kernel::eval(double u) const {
    if (family_ == Family::Gaussian) return standard_normal_pdf(u);
    if (std::abs(u) > halfwidth_) return 0.0;
    return horner(derivative_polys_[0], u);
}

double Kernel::polynomial_derivative_value(int s, double u) const {
    if (std::abs(u) > halfwidth_) return 0.0;
    return horner(derivative_polys_[static_cast<std::size_t>(s)], u);
}

double Kernel::derivative(int s, double u) const {
    if (s < 0) throw InvalidInput("derivative order must be nonnegative");
    if (s > smoothness_)
        throw UnsupportedDerivative("kernel '" + name_ + "' has smoothness " +
                                    std::to_string(smoothness_) +
                                    "; K^(" + std::to_string(s) + ") is not continuous");
    if (family_ == Family::Gaussian) {
        const double sign = (s % 2 == 0) ? 1.0 : -1.0;
        return sign * hermite(s, u) * standard_normal_pdf(u);
    }
    return polynomial_derivative_value(s, u);
}

double Kernel::moment(int j) const {
    if (j < 0) throw InvalidInput("moment order must be nonnegative");
    if (j % 2 == 1) return 0.0; // symmetric kernel
    if (j <= kMomentCacheMax) return moments_[static_cast<std::size_t>(j)];
    return moment_by_quadrature(j);
}

double Kernel::moment_by_quadrature(int j) const {
    const auto integrand = [this, j](double u) { return std::pow(u, j) * eval(u); };
    constexpr double tol = 1e-12;
    if (compact()) return quadrature::adaptive_simpson(integrand, -halfwidth_, halfwidth_, tol);
    return quadrature::adaptive_simpson_real_line(integrand, tol);
}

} // namespace tiltkde
