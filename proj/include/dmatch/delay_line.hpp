#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>

#include "dmatch/errors.hpp"

namespace dmatch {

// Bounded history buffer on a uniform time grid, realizing f(t - tau) by
// cubic interpolation of stored samples. Queries before the start time fall
// back to the pre-history value (constant by default, or a user hook).
class DelayLine {
  public:
    DelayLine(double start_time, double step, double initial_value, std::size_t capacity)
        : t0_(start_time), h_(step), prehistory_(initial_value), capacity_(capacity) {
        if (!(step > 0.0)) {
            throw std::invalid_argument("DelayLine step must be positive");
        }
        if (capacity_ < 4) {
            capacity_ = 4;
        }
        samples_.push_back(initial_value); // sample at t0
    }

    // Append the sample at t0 + n*h for the next n; times must advance by
    // exactly one grid step per push.
    void push(double t, double value) {
        const std::size_t n = first_index_ + samples_.size();
        const double expected = t0_ + static_cast<double>(n) * h_;
        if (std::abs(t - expected) > 1e-9 * h_ * std::max<double>(1.0, static_cast<double>(n))) {
            throw std::invalid_argument("DelayLine push off the uniform grid");
        }
        samples_.push_back(value);
        while (samples_.size() > capacity_) {
            samples_.pop_front();
            ++first_index_;
        }
    }

    double newest_time() const {
        return t0_ + static_cast<double>(first_index_ + samples_.size() - 1) * h_;
    }

    double sample(double query_t) const {
        if (query_t <= t0_) {
            return prehistory_;
        }
        const double x = (query_t - t0_) / h_;
        const long first = static_cast<long>(first_index_);
        const long last = first + static_cast<long>(samples_.size()) - 1;
        if (x > static_cast<double>(last) + 1e-9) {
            throw QueryOutOfRange("DelayLine query ahead of stored history");
        }
        if (x < static_cast<double>(first) - 1e-9) {
            throw QueryOutOfRange("DelayLine query predates retained history");
        }
        if (last - first < 3) {
            throw QueryOutOfRange("DelayLine history too short for cubic stencil");
        }
        // 4-point stencil [i-1, i+2] around the bracketing interval, clamped
        // to the retained range.
        long i = static_cast<long>(std::floor(x));
        i = std::max(i, first + 1);
        i = std::min(i, last - 2);
        const double f = x - static_cast<double>(i);
        const double ym1 = at(i - 1);
        const double y0 = at(i);
        const double y1 = at(i + 1);
        const double y2 = at(i + 2);
        // Cubic Lagrange on uniform nodes -1, 0, 1, 2.
        return -ym1 * f * (f - 1.0) * (f - 2.0) / 6.0
             + y0 * (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0
             - y1 * (f + 1.0) * f * (f - 2.0) / 2.0
             + y2 * (f + 1.0) * f * (f - 1.0) / 6.0;
    }

  private:
    double at(long index) const {
        return samples_[static_cast<std::size_t>(index - static_cast<long>(first_index_))];
    }

    double t0_;
    double h_;
    double prehistory_;
    std::size_t capacity_;
    std::size_t first_index_ = 0; // grid index of samples_.front()
    std::deque<double> samples_;
};

// Grid value f(t0 + n*h) lookup used by the simulator: delayed sample with
// tau resolved against a line.
inline double delay_sample(const DelayLine& line, double t, double tau) {
    return line.sample(t - tau);
}

} // namespace dmatch
