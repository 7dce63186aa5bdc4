#pragma once

#include <cmath>
#include <span>

namespace tiltkde {

// Neumaier compensated accumulator; error stays O(eps) independent of count.
class CompensatedSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            compensation_ += (sum_ - t) + value;
        else
            compensation_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

inline double compensated_total(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

} // namespace tiltkde
