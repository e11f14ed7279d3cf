#pragma once

#include <sild/metrics.hpp>
#include <sild/network.hpp>
#include <sild/skew.hpp>

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace sild {

enum class DcExtrapolation { Constant, Linear };
enum class SpectralWindow { None, RaisedCosineEdge };

struct PulseConfig {
    double pulse_width = 1.0 / 106.25e9;  // 50% width; one UI at 106.25 GBd
    double rise_time = 0.1 / 106.25e9;
    double time_window = 0.0;  // 0 selects one full period, 1/df
    DcExtrapolation dc_extrapolation = DcExtrapolation::Constant;
    SpectralWindow spectral_window = SpectralWindow::RaisedCosineEdge;
    double taper_fraction = 0.1;  // share of the band rolled off by the edge taper
    int oversample = 8;  // zero-padding factor, sets the output time step
    bool allow_resample = true;

    static PulseConfig for_symbol_rate(double f_b)
    {
        PulseConfig cfg;
        cfg.pulse_width = 1.0 / f_b;
        cfg.rise_time = 0.1 / f_b;
        return cfg;
    }

    void validate() const
    {
        if (!(pulse_width > 0.0))
            throw Error(ErrorCode::InvalidArgument, "pulse_width must be positive");
        if (!(rise_time >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "rise_time must be >= 0");
        if (!(time_window >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "time_window must be >= 0");
        if (!(taper_fraction > 0.0 && taper_fraction <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "taper_fraction must be in (0, 1]");
        if (oversample < 1)
            throw Error(ErrorCode::InvalidArgument, "oversample must be >= 1");
    }
};

/// Spectrum of a unit-height trapezoid starting at t = 0 with 50% width
/// `width` and 0-100% edges of `rise`: a width-long rectangle convolved with
/// a unit-area rise-long rectangle.
inline Complex trapezoid_spectrum(double f, double width, double rise)
{
    const double mag = width * sinc(f * width) * sinc(f * rise);
    return std::polar(1.0, -std::numbers::pi * f * (width + rise)) * mag;
}

/// Time-domain trapezoid matching trapezoid_spectrum.
inline double trapezoid(double t, double width, double rise)
{
    if (rise <= 0.0)
        return (t >= 0.0 && t < width) ? 1.0 : 0.0;
    const double end = width + rise;
    if (t <= 0.0 || t >= end)
        return 0.0;
    if (t < rise)
        return t / rise;
    if (t > width)
        return (end - t) / rise;
    return 1.0;
}

struct PulseResponse {
    std::vector<double> time_s;
    std::vector<double> amplitude;
    double dt = 0.0;
    double max_imag_residue = 0.0;  // relative to peak |real|
    double time_energy = 0.0;  // sum y^2 dt over the full period
    double spectral_energy = 0.0;  // df * sum |X_k|^2 over all bins
    Warnings warnings;
};

namespace detail {

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace detail

/// Response of `transfer` to a trapezoidal pulse. The one-sided spectrum is
/// placed on bins k*df (df = grid step), the missing low bins are filled
/// from DC by magnitude/phase interpolation, the band edge is optionally
/// tapered, Hermitian symmetry is imposed and an inverse FFT gives the
/// real waveform, scaled so an all-pass channel reproduces a unit pulse.
inline PulseResponse pulse_response(std::span<const Complex> transfer, const FrequencyGrid& grid,
                                    const PulseConfig& cfg)
{
    cfg.validate();
    if (transfer.size() != grid.size())
        throw Error(ErrorCode::GridMismatch, "transfer length differs from grid length");
    for (const Complex& h : transfer)
        if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
            throw Error(ErrorCode::NumericOverflow, "transfer function has non-finite samples");

    PulseResponse out;
    const std::size_t offset = grid.first_positive();
    const std::size_t m = grid.size() - offset;
    if (m < 2)
        throw Error(ErrorCode::InvalidArgument, "pulse response needs at least two non-DC samples");
    std::vector<double> f(grid.values().begin() + static_cast<std::ptrdiff_t>(offset), grid.values().end());
    std::vector<Complex> h(transfer.begin() + static_cast<std::ptrdiff_t>(offset), transfer.end());

    // Bin alignment: every sample must sit on an integer multiple of df.
    const double df = FrequencyGrid(f).median_step();
    bool aligned = true;
    for (std::size_t i = 0; i < m && aligned; ++i) {
        const double k = f[i] / df;
        aligned = std::abs(k - std::round(k)) <= 1e-6 &&
                  (i == 0 || std::llround(k) == std::llround(f[i - 1] / df) + 1);
    }

    std::vector<double> mag;
    std::vector<double> phase;
    std::size_t k0 = 0;
    std::size_t kmax = 0;
    if (aligned) {
        k0 = static_cast<std::size_t>(std::llround(f.front() / df));
        kmax = k0 + m - 1;
        mag.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            mag[i] = std::abs(h[i]);
        phase = detail::unwrap_bridging_nulls(h, f, out.warnings, "transfer");
    } else {
        if (!cfg.allow_resample)
            throw Error(ErrorCode::NonUniformGrid, "grid is not uniform and resampling is disabled");
        const std::vector<double> raw_phase = detail::unwrap_bridging_nulls(h, f, out.warnings, "transfer");
        std::vector<double> raw_mag(m);
        for (std::size_t i = 0; i < m; ++i)
            raw_mag[i] = std::abs(h[i]);
        k0 = static_cast<std::size_t>(std::ceil(f.front() / df - 1e-9));
        kmax = static_cast<std::size_t>(std::floor(f.back() / df + 1e-9));
        if (k0 == 0)
            k0 = 1;
        if (kmax <= k0)
            throw Error(ErrorCode::NonUniformGrid, "grid too sparse to resample");
        for (std::size_t k = k0; k <= kmax; ++k) {
            const double fk = static_cast<double>(k) * df;
            mag.push_back(interp_linear(f, raw_mag, fk));
            phase.push_back(interp_linear(f, raw_phase, fk));
        }
        out.warnings.push_back("transfer resampled onto a uniform " + std::to_string(df) + " Hz grid");
    }
    if (k0 == 0)
        throw Error(ErrorCode::InvalidArgument, "first non-DC sample maps to bin 0");
    {
        std::vector<double> fk(phase.size());
        for (std::size_t i = 0; i < fk.size(); ++i)
            fk[i] = static_cast<double>(k0 + i) * df;
        detail::anchor_phase_to_dc(phase, fk);
    }

    // DC bin and the gap below the first measured bin.
    std::vector<Complex> spectrum(kmax + 1);
    double dc = 0.0;
    if (grid.has_dc()) {
        dc = transfer[0].real();
    } else {
        const double slope = (phase.size() > 1) ? (phase[1] - phase[0]) : 0.0;
        const double intercept = phase[0] - slope * static_cast<double>(k0);
        const double sign = std::cos(intercept) >= 0.0 ? 1.0 : -1.0;
        double dc_mag = mag[0];
        if (cfg.dc_extrapolation == DcExtrapolation::Linear && mag.size() > 1)
            dc_mag = std::max(0.0, mag[0] - (mag[1] - mag[0]) * static_cast<double>(k0));
        dc = sign * dc_mag;
    }
    spectrum[0] = Complex(dc, 0.0);
    const double dc_phase = dc < 0.0 ? std::numbers::pi * (phase[0] >= 0.0 ? 1.0 : -1.0) : 0.0;
    for (std::size_t k = 1; k < k0; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(k0);
        const double a = std::abs(dc) + t * (mag[0] - std::abs(dc));
        const double p = dc_phase + t * (phase[0] - dc_phase);
        spectrum[k] = std::polar(a, p);
    }
    for (std::size_t i = 0; i < mag.size(); ++i)
        spectrum[k0 + i] = std::polar(mag[i], phase[i]);

    if (cfg.spectral_window == SpectralWindow::RaisedCosineEdge) {
        const double edge = (1.0 - cfg.taper_fraction) * static_cast<double>(kmax);
        for (std::size_t k = 0; k <= kmax; ++k) {
            const double kk = static_cast<double>(k);
            if (kk > edge)
                spectrum[k] *= 0.5 * (1.0 + std::cos(std::numbers::pi * (kk - edge) / (static_cast<double>(kmax) - edge)));
        }
    }

    const std::size_t nfft = detail::next_pow2(2 * (kmax + 1)) * static_cast<std::size_t>(cfg.oversample);
    std::vector<Complex> bins(nfft, Complex(0.0, 0.0));
    for (std::size_t k = 0; k <= kmax; ++k) {
        Complex x = spectrum[k] * trapezoid_spectrum(static_cast<double>(k) * df, cfg.pulse_width, cfg.rise_time);
        if (k == 0)
            x = Complex(x.real(), 0.0);
        bins[k] = x;
        if (k > 0)
            bins[nfft - k] = std::conj(x);
    }

    Eigen::FFT<double> fft;
    std::vector<Complex> wave;
    fft.inv(wave, bins);

    const double n = static_cast<double>(nfft);
    out.dt = 1.0 / (n * df);
    double peak = 0.0;
    double imag_peak = 0.0;
    std::size_t peak_index = 0;
    std::vector<double> y(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        y[i] = wave[i].real() * n * df;
        imag_peak = std::max(imag_peak, std::abs(wave[i].imag() * n * df));
        if (std::abs(y[i]) > peak) {
            peak = std::abs(y[i]);
            peak_index = i;
        }
        out.time_energy += y[i] * y[i] * out.dt;
    }
    for (const Complex& x : bins)
        out.spectral_energy += std::norm(x) * df;
    out.max_imag_residue = peak > 0.0 ? imag_peak / peak : imag_peak;

    const double period = 1.0 / df;
    const double window = cfg.time_window > 0.0 ? cfg.time_window : period;
    if (window > period * (1.0 + 1e-12))
        throw Error(ErrorCode::InvalidArgument, "time_window exceeds the 1/df period of the grid");
    const double delay = std::max(0.0, static_cast<double>(peak_index) * out.dt - 0.5 * (cfg.pulse_width + cfg.rise_time));
    if (window < 4.0 * delay)
        throw Error(ErrorCode::InvalidArgument, "time_window is shorter than 4x the channel delay");

    const auto count = std::min<std::size_t>(nfft, static_cast<std::size_t>(std::ceil(window / out.dt - 1e-9)));
    out.time_s.resize(count);
    out.amplitude.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(count));
    for (std::size_t i = 0; i < count; ++i)
        out.time_s[i] = static_cast<double>(i) * out.dt;
    return out;
}

} // namespace sild
