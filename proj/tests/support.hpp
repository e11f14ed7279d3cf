#pragma once

#include <sild/sild.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace support {

using namespace sild;

/// 10 MHz .. 110 GHz in 10 MHz steps.
inline FrequencyGrid full_grid()
{
    return FrequencyGrid::stepped(10e6, 10e6, 11000);
}

inline FrequencyGrid coarse_grid(std::size_t n = 500)
{
    return FrequencyGrid::linear(110e9 / static_cast<double>(n), 110e9, n);
}

inline SingleEndedNetwork uncoupled(const FrequencyGrid& grid, double base_delay = 0.0)
{
    ChannelSpec spec;
    spec.grid = grid;
    spec.base_delay = base_delay;
    return ideal_diff_channel(spec);
}

inline SingleEndedNetwork with_flat_skew(SingleEndedNetwork net, double tau, Line line = Line::P, Side side = Side::Left)
{
    SkewProfileSpec p;
    p.tau_flat = tau;
    return inject_se_delay(std::move(net), line, side, p);
}

/// Lossy, coupled channel used as the fixed base for sweeps.
inline ChannelSpec twinax_like(const FrequencyGrid& grid)
{
    ChannelSpec spec;
    spec.grid = grid;
    spec.base_delay = 1e-9;
    spec.loss.dc_loss_db = 0.1;
    spec.loss.skin_coeff_db_per_sqrt_hz = 4.3386e-5;
    spec.loss.dielectric_coeff_db_per_hz = 2e-11;
    spec.coupling = 0.1;
    spec.coupling_corner = 20e9;
    return spec;
}

/// Balanced throughs with unequal far-end coupling: skew appears in
/// opposite directions while the network stays exactly reciprocal.
inline ChannelSpec asymmetric_coupling(const FrequencyGrid& grid)
{
    ChannelSpec spec;
    spec.grid = grid;
    spec.base_delay = 200e-12;
    spec.loss.skin_coeff_db_per_sqrt_hz = 4.3386e-5;
    spec.coupling = 0.3;
    spec.coupling_imbalance = 0.6;
    spec.coupling_corner = 20e9;
    return spec;
}

/// Randomised coupled, lossy channel with single-ended delay on a random
/// line and side, flat or damped-oscillatory.
inline SingleEndedNetwork random_skewed_channel(std::mt19937_64& rng, const FrequencyGrid& grid)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ChannelSpec spec;
    spec.grid = grid;
    spec.base_delay = 0.5e-9 + u(rng) * 1.5e-9;
    spec.loss.dc_loss_db = 0.2 * u(rng);
    spec.loss.skin_coeff_db_per_sqrt_hz = (2.0 + 4.0 * u(rng)) * 1e-5;
    spec.loss.dielectric_coeff_db_per_hz = 3e-11 * u(rng);
    spec.coupling = 0.02 + 0.2 * u(rng);
    spec.coupling_corner = 10e9 + 30e9 * u(rng);
    SkewProfileSpec p;
    if (u(rng) < 0.5) {
        p.kind = SkewKind::Flat;
        p.tau_flat = 3e-12 * u(rng);
    } else {
        p.kind = SkewKind::DampedOscillatory;
        p.tau_peak = 8e-12 * u(rng);
        p.osc_freq = 40e9 + 80e9 * u(rng);
        p.damping_freq = 30e9 + 70e9 * u(rng);
    }
    const Line line = u(rng) < 0.5 ? Line::P : Line::N;
    const Side side = u(rng) < 0.5 ? Side::Left : Side::Right;
    return inject_se_delay(ideal_diff_channel(spec), line, side, p);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("sild_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace support
