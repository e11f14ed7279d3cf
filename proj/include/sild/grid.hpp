#pragma once

#include <sild/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sild {

/// Strictly ascending frequency samples in Hz. Only the first sample may be
/// zero (a DC point); everything downstream that divides by f skips it.
class FrequencyGrid {
public:
    FrequencyGrid() = default;

    explicit FrequencyGrid(std::vector<double> hz) : hz_(std::move(hz))
    {
        for (std::size_t i = 0; i < hz_.size(); ++i) {
            const double f = hz_[i];
            if (!std::isfinite(f) || f < 0.0)
                throw Error(ErrorCode::InvalidArgument,
                            "frequency sample " + std::to_string(i) + " is negative or non-finite");
            if (i > 0 && !(f > hz_[i - 1]))
                throw Error(ErrorCode::NonAscendingFrequency,
                            "frequency sample " + std::to_string(i) + " does not exceed its predecessor");
        }
    }

    /// start, start + step, ..., start + (points - 1) * step
    static FrequencyGrid stepped(double start, double step, std::size_t points)
    {
        if (!(step > 0.0))
            throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
        std::vector<double> f(points);
        for (std::size_t i = 0; i < points; ++i)
            f[i] = start + static_cast<double>(i) * step;
        return FrequencyGrid(std::move(f));
    }

    static FrequencyGrid linear(double start, double stop, std::size_t points)
    {
        if (points < 2 || !(stop > start))
            throw Error(ErrorCode::InvalidArgument, "linear grid needs stop > start and >= 2 points");
        std::vector<double> f(points);
        const double step = (stop - start) / static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i)
            f[i] = start + static_cast<double>(i) * step;
        f.back() = stop;
        return FrequencyGrid(std::move(f));
    }

    std::span<const double> hz() const noexcept { return hz_; }
    const std::vector<double>& values() const noexcept { return hz_; }
    std::size_t size() const noexcept { return hz_.size(); }
    bool empty() const noexcept { return hz_.empty(); }
    double operator[](std::size_t i) const { return hz_[i]; }
    double front() const { return hz_.front(); }
    double back() const { return hz_.back(); }

    bool has_dc() const noexcept { return !hz_.empty() && hz_.front() == 0.0; }
    std::size_t first_positive() const noexcept { return has_dc() ? 1 : 0; }

    FrequencyGrid without_dc() const
    {
        if (!has_dc())
            return *this;
        return FrequencyGrid(std::vector<double>(hz_.begin() + 1, hz_.end()));
    }

    double median_step() const
    {
        if (hz_.size() < 2)
            throw Error(ErrorCode::InvalidArgument, "grid has fewer than two samples");
        std::vector<double> steps(hz_.size() - 1);
        for (std::size_t i = 1; i < hz_.size(); ++i)
            steps[i - 1] = hz_[i] - hz_[i - 1];
        auto mid = steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2);
        std::nth_element(steps.begin(), mid, steps.end());
        return *mid;
    }

    /// Every step within rel_tol of the median step.
    bool is_uniform(double rel_tol = 1e-6) const
    {
        if (hz_.size() < 3)
            return true;
        const double step = median_step();
        for (std::size_t i = 1; i < hz_.size(); ++i)
            if (std::abs((hz_[i] - hz_[i - 1]) - step) > rel_tol * step)
                return false;
        return true;
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    std::vector<double> hz_;
};

/// Piecewise-linear interpolation of (xs, ys) at x; clamps outside the range.
inline double interp_linear(std::span<const double> xs, std::span<const double> ys, double x)
{
    if (xs.empty() || xs.size() != ys.size())
        throw Error(ErrorCode::InvalidArgument, "interp_linear: size mismatch");
    if (x <= xs.front())
        return ys.front();
    if (x >= xs.back())
        return ys.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

} // namespace sild
