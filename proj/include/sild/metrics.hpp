#pragma once

#include <sild/mixed_mode.hpp>
#include <sild/skew.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace sild {

enum class FomNormalization {
    /// (1/N) * sum(W_i * SILD_i^2), reported in dB^2.
    MeanSquare,
    /// sqrt(sum(W_i * SILD_i^2) / sum(W_i)), reported in dB.
    WeightedRms,
};

/// Weighting and band limits for FOM_SILD. All frequencies in Hz.
struct FomConfig {
    double f_b = 106.25e9;  // signalling rate
    double f_r = 0.75 * 106.25e9;  // receiver 3 dB bandwidth
    double f_t = 106.25e9;  // transmit filter 3 dB bandwidth
    double f_max = 106.25e9;  // summation cutoff
    FomNormalization normalization = FomNormalization::WeightedRms;

    void validate() const
    {
        for (const auto& [name, value] : {std::pair{"f_b", f_b}, {"f_r", f_r}, {"f_t", f_t}, {"f_max", f_max}})
            if (!(value > 0.0) || !std::isfinite(value))
                throw Error(ErrorCode::InvalidArgument, std::string("FomConfig.") + name + " must be positive");
    }

    /// Named presets; receiver bandwidth 0.75 f_b, transmit bandwidth and
    /// cutoff at f_b.
    static FomConfig preset(std::string_view name)
    {
        double fb = 0.0;
        if (name == "224g-pam4")
            fb = 106.25e9;
        else if (name == "112g-pam4")
            fb = 53.125e9;
        else
            throw Error(ErrorCode::InvalidArgument, "unknown FOM preset '" + std::string(name) + "'");
        return FomConfig{fb, 0.75 * fb, fb, fb, FomNormalization::WeightedRms};
    }
};

inline const char* to_string(FomNormalization n)
{
    return n == FomNormalization::WeightedRms ? "weighted-rms" : "mean-square";
}

/// sin(pi x), exact zero at integers.
inline double sin_pi(double x)
{
    const double r = std::fmod(x, 2.0);
    if (r == 0.0 || std::abs(r) == 1.0)
        return 0.0;
    return std::sin(std::numbers::pi * r);
}

inline double sinc(double x)
{
    return x == 0.0 ? 1.0 : sin_pi(x) / (std::numbers::pi * x);
}

/// Frequency weighting: sinc^2(f/f_b) with a 4th-order receiver and a
/// 2nd-order transmit roll-off (power-domain Butterworth shapes).
inline double weight(double f, const FomConfig& cfg)
{
    const double s = sinc(f / cfg.f_b);
    const double xr = f / cfg.f_r;
    const double xt = f / cfg.f_t;
    const double xr2 = xr * xr;
    const double xr4 = xr2 * xr2;
    return s * s / (1.0 + xr4 * xr4) / (1.0 + xt * xt * xt * xt);
}

struct DeskewedMagnitude {
    std::vector<double> mag_21;  // linear
    std::vector<double> mag_12;  // linear
};

/// Differential through magnitude with the P/N skew removed from both the
/// phase and the amplitude of the differential-to-single-ended terms:
///
///   |S0dd21| = (|S21 r1 - S23| + |S43 - S41 r1|) / 2,  r1 = exp(+i 2 pi f t_skew,1)
///   |S0dd12| = (|S12 r2 - S14| + |S34 - S32 r2|) / 2,  r2 = exp(+i 2 pi f t_skew,2)
///
/// The exponent is positive because skews here are positive for a late P
/// line; rotating by +2 pi f t undoes that lag.
inline DeskewedMagnitude deskewed_magnitude(const SingleEndedNetwork& net, const SkewProfile& skew1,
                                            const SkewProfile& skew2)
{
    if (skew1.port != SkewPort::AtPort1 || skew2.port != SkewPort::AtPort2)
        throw Error(ErrorCode::InvalidArgument, "deskewed_magnitude expects (port-1 skew, port-2 skew)");
    const FrequencyGrid grid = net.grid.without_dc();
    if (skew1.grid != grid || skew2.grid != grid || skew1.t_skew.size() != grid.size() ||
        skew2.t_skew.size() != grid.size())
        throw Error(ErrorCode::GridMismatch, "skew profiles are not on the network's non-DC grid");

    const std::size_t offset = net.grid.first_positive();
    DeskewedMagnitude out;
    out.mag_21.resize(grid.size());
    out.mag_12.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const ThroughEntries s = through_entries(net, i + offset);
        const double w = kTwoPi * grid[i];
        const Complex r1 = std::polar(1.0, w * skew1.t_skew[i]);
        const Complex r2 = std::polar(1.0, w * skew2.t_skew[i]);
        out.mag_21[i] = 0.5 * (std::abs(s.s21 * r1 - s.s23) + std::abs(s.s43 - s.s41 * r1));
        out.mag_12[i] = 0.5 * (std::abs(s.s12 * r2 - s.s14) + std::abs(s.s34 - s.s32 * r2));
    }
    return out;
}

/// Per-frequency curves in dB on the non-DC grid. Index 1 is the
/// right-to-left direction (Sdd12, skew seen at port 1); index 2 is
/// left-to-right (Sdd21, skew at port 2). sild_d = original_d - deskewed_d.
struct SildResult {
    FrequencyGrid grid;
    std::vector<double> sild_1;
    std::vector<double> sild_2;
    std::vector<double> deskewed_mag_21;
    std::vector<double> deskewed_mag_12;
    std::vector<double> original_mag_21;
    std::vector<double> original_mag_12;
    std::vector<double> t_skew_1;
    std::vector<double> t_skew_2;
    Warnings warnings;
};

inline SildResult compute_sild(const SingleEndedNetwork& net)
{
    net.validate();
    const MixedModeSet mm = to_mixed_mode(net);
    SkewProfile skew1 = pn_skew(mm, SkewPort::AtPort1);
    SkewProfile skew2 = pn_skew(mm, SkewPort::AtPort2);
    const DeskewedMagnitude deskewed = deskewed_magnitude(net, skew1, skew2);

    const std::size_t offset = net.grid.first_positive();
    SildResult r;
    r.grid = skew1.grid;
    const std::size_t n = r.grid.size();
    r.sild_1.resize(n);
    r.sild_2.resize(n);
    r.deskewed_mag_21.resize(n);
    r.deskewed_mag_12.resize(n);
    r.original_mag_21.resize(n);
    r.original_mag_12.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.original_mag_21[i] = to_db(std::abs(mm.sdd21[i + offset]));
        r.original_mag_12[i] = to_db(std::abs(mm.sdd12[i + offset]));
        r.deskewed_mag_21[i] = to_db(deskewed.mag_21[i]);
        r.deskewed_mag_12[i] = to_db(deskewed.mag_12[i]);
        r.sild_2[i] = r.original_mag_21[i] - r.deskewed_mag_21[i];
        r.sild_1[i] = r.original_mag_12[i] - r.deskewed_mag_12[i];
    }
    r.t_skew_1 = std::move(skew1.t_skew);
    r.t_skew_2 = std::move(skew2.t_skew);
    append(r.warnings, skew1.warnings);
    append(r.warnings, skew2.warnings);
    return r;
}

struct FomResult {
    double fom_1 = 0.0;  // right to left
    double fom_2 = 0.0;  // left to right
    std::size_t samples = 0;  // N after any resampling
    double cutoff_hz = 0.0;  // highest frequency actually summed
    bool resampled = false;
    bool insufficient_bandwidth = false;
    FomNormalization normalization = FomNormalization::WeightedRms;
    Warnings warnings;
};

/// Weighted SILD summary over 0 < f <= f_max. Non-uniform grids are first
/// resampled (linear interpolation) to the median step, since the sum
/// assumes uniform spacing. A grid ending below f_max is summed up to its
/// last sample and flagged.
inline FomResult fom_sild(const SildResult& result, const FomConfig& cfg)
{
    cfg.validate();
    const double cutoff = cfg.f_max * (1.0 + 1e-12);

    std::vector<double> f;
    std::vector<double> s1;
    std::vector<double> s2;
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
        const double fi = result.grid[i];
        if (fi > 0.0 && fi <= cutoff) {
            f.push_back(fi);
            s1.push_back(result.sild_1[i]);
            s2.push_back(result.sild_2[i]);
        }
    }
    if (f.size() < 2)
        throw Error(ErrorCode::InsufficientBandwidth,
                    "fewer than two samples in (0, " + std::to_string(cfg.f_max) + "] Hz");

    FomResult out;
    out.normalization = cfg.normalization;
    if (result.grid.back() < cfg.f_max * (1.0 - 1e-9)) {
        out.insufficient_bandwidth = true;
        out.warnings.push_back("InsufficientBandwidth: grid ends at " + std::to_string(result.grid.back()) +
                               " Hz, below f_max " + std::to_string(cfg.f_max) + " Hz");
    }

    const FrequencyGrid band(f);
    if (!band.is_uniform()) {
        const double step = band.median_step();
        std::vector<double> rf;
        std::vector<double> r1;
        std::vector<double> r2;
        for (double x = f.front(); x <= f.back() * (1.0 + 1e-12); x = f.front() + static_cast<double>(rf.size()) * step) {
            rf.push_back(x);
            r1.push_back(interp_linear(f, s1, x));
            r2.push_back(interp_linear(f, s2, x));
        }
        out.resampled = true;
        out.warnings.push_back("non-uniform grid resampled to " + std::to_string(rf.size()) + " points at " +
                               std::to_string(step) + " Hz spacing");
        f = std::move(rf);
        s1 = std::move(r1);
        s2 = std::move(r2);
    }

    double sum_w = 0.0;
    double acc1 = 0.0;
    double acc2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = weight(f[i], cfg);
        sum_w += w;
        acc1 += w * s1[i] * s1[i];
        acc2 += w * s2[i] * s2[i];
    }
    out.samples = f.size();
    out.cutoff_hz = f.back();
    if (cfg.normalization == FomNormalization::MeanSquare) {
        const double n = static_cast<double>(f.size());
        out.fom_1 = acc1 / n;
        out.fom_2 = acc2 / n;
    } else {
        if (!(sum_w > 0.0))
            throw Error(ErrorCode::InsufficientBandwidth, "weights vanish over the summation band");
        out.fom_1 = std::sqrt(acc1 / sum_w);
        out.fom_2 = std::sqrt(acc2 / sum_w);
    }
    return out;
}

struct MaxAbsSild {
    double value_db = 0.0;  // the larger of the two directions
    double frequency_hz = 0.0;
    int direction = 1;  // 1 or 2, matching sild_1 / sild_2
    double max_1_db = 0.0;
    double max_2_db = 0.0;
    double frequency_1_hz = 0.0;
    double frequency_2_hz = 0.0;
};

inline MaxAbsSild max_abs_sild(const SildResult& result, double band_max)
{
    if (!(band_max > 0.0))
        throw Error(ErrorCode::InvalidArgument, "band_max must be positive");
    MaxAbsSild out;
    bool any = false;
    const double limit = band_max * (1.0 + 1e-12);
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
        const double f = result.grid[i];
        if (!(f > 0.0) || f > limit)
            continue;
        const double a1 = std::abs(result.sild_1[i]);
        const double a2 = std::abs(result.sild_2[i]);
        if (!any || a1 > out.max_1_db) {
            out.max_1_db = a1;
            out.frequency_1_hz = f;
        }
        if (!any || a2 > out.max_2_db) {
            out.max_2_db = a2;
            out.frequency_2_hz = f;
        }
        any = true;
    }
    if (!any)
        throw Error(ErrorCode::EmptyBand, "no samples in (0, " + std::to_string(band_max) + "] Hz");
    if (out.max_2_db > out.max_1_db) {
        out.value_db = out.max_2_db;
        out.frequency_hz = out.frequency_2_hz;
        out.direction = 2;
    } else {
        out.value_db = out.max_1_db;
        out.frequency_hz = out.frequency_1_hz;
        out.direction = 1;
    }
    return out;
}

} // namespace sild
