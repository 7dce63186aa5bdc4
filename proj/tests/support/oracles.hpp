#pragma once

// Test-side oracles and helpers, kept independent of the library paths they
// check: plain finite differences, a naive O(n*m) reference sum, long-double
// summation for measuring normalization, and a small deterministic rng for
// fuzz cases.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace testkit {

inline double central_diff(const std::function<double(double)>& f, double x, double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

// Reference estimator: literal double loop over all sample points, no window.
inline std::vector<double> naive_weighted_sum(std::span<const double> sample,
                                              std::span<const double> weights,
                                              const std::function<double(double)>& kernel_s,
                                              double h, int s,
                                              std::span<const double> queries) {
    std::vector<double> out(queries.size(), 0.0);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        double sum = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i)
            sum += weights[i] * kernel_s((queries[q] - sample[i]) / h);
        out[q] = sum * std::pow(h, -(s + 1));
    }
    return out;
}

inline double relative_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

// Extended-precision total for measuring |sum(p) - 1| against a 1e-12 bound.
inline double precise_sum(std::span<const double> values) {
    long double acc = 0.0L;
    for (double v : values) acc += static_cast<long double>(v);
    return static_cast<double>(acc);
}

inline double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                        std::size_t points) {
    const double step = (hi - lo) / static_cast<double>(points - 1);
    long double acc = 0.5L * (static_cast<long double>(f(lo)) + static_cast<long double>(f(hi)));
    for (std::size_t i = 1; i + 1 < points; ++i)
        acc += static_cast<long double>(f(lo + step * static_cast<double>(i)));
    return static_cast<double>(acc * static_cast<long double>(step));
}

// splitmix64 stream for fuzz-case generation.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }
    double normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace testkit
