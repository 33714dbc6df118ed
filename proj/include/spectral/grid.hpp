#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spectral {

/// Uniform grid on [0,1] with trapezoid weights. The requested step is
/// rounded so that an integer number of intervals covers the domain exactly.
class UniformGrid {
public:
    explicit UniformGrid(double step) {
        if (!(step > 0.0) || step > 0.5) {
            throw std::invalid_argument("grid step must lie in (0, 0.5]");
        }
        intervals_ = static_cast<std::size_t>(std::llround(1.0 / step));
        if (intervals_ < 2) intervals_ = 2;
        step_ = 1.0 / static_cast<double>(intervals_);
    }

    std::size_t size() const { return intervals_ + 1; }
    double step() const { return step_; }
    double point(std::size_t i) const {
        return i == intervals_ ? 1.0 : static_cast<double>(i) * step_;
    }
    double weight(std::size_t i) const {
        return (i == 0 || i == intervals_) ? 0.5 * step_ : step_;
    }

    std::vector<double> points() const {
        std::vector<double> x(size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = point(i);
        return x;
    }

    std::vector<double> weights() const {
        std::vector<double> w(size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = weight(i);
        return w;
    }

    double integrate(std::span<const double> values) const {
        return integrate_prefix(values, size() - 1);
    }

    /// Trapezoid integral over [0, point(last)].
    double integrate_prefix(std::span<const double> values, std::size_t last) const {
        if (values.size() != size()) {
            throw std::invalid_argument("grid/value size mismatch");
        }
        if (last == 0) return 0.0;
        double acc = 0.5 * (values[0] + values[last]);
        for (std::size_t i = 1; i < last; ++i) acc += values[i];
        return acc * step_;
    }

private:
    std::size_t intervals_ = 0;
    double step_ = 0.0;
};

} // namespace spectral
