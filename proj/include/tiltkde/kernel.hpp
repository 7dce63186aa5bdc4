#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace tiltkde {

//! Symmetric smoothing kernel with closed-form derivatives and cached moments.
//!
//! smoothness() is the largest s for which K^{(s)} is continuous on all of R,
//! support endpoints included; estimating a derivative of order s requires a
//! kernel with smoothness() >= s. Instances are immutable after construction
//! (the moment cache is filled eagerly), so concurrent reads are safe.
class Kernel {
public:
    static constexpr int kUnboundedSmoothness = std::numeric_limits<int>::max();

    static Kernel epanechnikov(); //!< 3/4 (1-u^2) on [-1,1], smoothness 0
    static Kernel biweight();     //!< 15/16 (1-u^2)^2 on [-1,1], smoothness 1
    static Kernel triweight();    //!< 35/32 (1-u^2)^3 on [-1,1], smoothness 2
    static Kernel gaussian();     //!< standard normal pdf; unbounded support
    static Kernel by_name(std::string_view name);
    static const std::vector<std::string>& names();

    const std::string& name() const { return name_; }
    int smoothness() const { return smoothness_; }
    bool compact() const { return halfwidth_ != std::numeric_limits<double>::infinity(); }
    //! Support halfwidth a (K vanishes for |u| > a); +inf for the Gaussian.
    double support_halfwidth() const { return halfwidth_; }
    //! Halfwidth beyond which the kernel is negligible at 1e-12 quadrature
    //! scales; equals the support halfwidth for compact kernels.
    double window_halfwidth() const;

    double eval(double u) const;
    //! Closed-form K^{(s)}(u); throws UnsupportedDerivative for s > smoothness().
    double derivative(int s, double u) const;
    //! int u^j K(u) du. Odd moments of these symmetric kernels are exactly 0;
    //! even moments come from adaptive quadrature (cached for j <= 12).
    double moment(int j) const;

private:
    enum class Family { Polynomial, Gaussian };

    Kernel(std::string name, Family family, int smoothness, double halfwidth,
           std::vector<double> coefficients);

    double moment_by_quadrature(int j) const;
    double polynomial_derivative_value(int s, double u) const;

    std::string name_;
    Family family_;
    int smoothness_;
    double halfwidth_;
    // derivative_polys_[s] holds the coefficients of K^(s) in ascending powers
    // of u, valid inside the support (Polynomial family only).
    std::vector<std::vector<double>> derivative_polys_;
    std::vector<double> moments_;
};

} // namespace tiltkde
