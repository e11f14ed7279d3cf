#pragma once

#include <sild/mixed_mode.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sild {

/// Samples weaker than this have no meaningful phase.
inline constexpr double kNullMagnitude = 1e-12;

/// Phase steps larger than this between neighbours are flagged as possibly
/// aliased (frequency step too coarse for the delay being tracked).
inline constexpr double kAmbiguousPhaseStep = 0.9 * std::numbers::pi;

struct UnwrappedPhase {
    std::vector<double> radians;
    Warnings warnings;
};

/// Continuous phase along the frequency axis. Each output differs from the
/// principal value arg(z) by an exact multiple of 2*pi and consecutive
/// outputs differ by a value in (-pi, pi]. A step of exactly pi (e.g. an
/// alternating +1/-1 sequence) is taken as +pi and flagged in warnings.
inline UnwrappedPhase unwrap_phase(std::span<const Complex> samples)
{
    if (samples.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "unwrap_phase needs at least two samples");
    UnwrappedPhase out;
    out.radians.resize(samples.size());
    std::size_t ambiguous = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::abs(samples[i]) < kNullMagnitude)
            throw Error(ErrorCode::ZeroMagnitudeSample, "phase undefined at sample " + std::to_string(i));
        const double principal = std::arg(samples[i]);
        if (i == 0) {
            out.radians[0] = principal;
            continue;
        }
        const double prev = out.radians[i - 1];
        double turns = std::round((prev - principal) / kTwoPi);
        double value = principal + kTwoPi * turns;
        if (value - prev > std::numbers::pi)
            value -= kTwoPi;
        else if (value - prev <= -std::numbers::pi)
            value += kTwoPi;
        if (std::abs(value - prev) > kAmbiguousPhaseStep)
            ++ambiguous;
        out.radians[i] = value;
    }
    if (ambiguous > 0)
        out.warnings.push_back(std::to_string(ambiguous) +
                               " phase step(s) near pi; unwrapping may alias (frequency step too coarse)");
    return out;
}

namespace detail {

/// Removes the whole-turn offset left by starting the unwrap above DC: a
/// least-squares line through the lowest samples is extrapolated to f = 0
/// and its intercept rounded to the nearest multiple of 2*pi.
inline void anchor_phase_to_dc(std::vector<double>& phase, std::span<const double> f)
{
    const std::size_t m = std::min<std::size_t>(phase.size(), 8);
    if (m < 2)
        return;
    double sf = 0, sp = 0, sff = 0, sfp = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sf += f[i];
        sp += phase[i];
        sff += f[i] * f[i];
        sfp += f[i] * phase[i];
    }
    const double dm = static_cast<double>(m);
    const double denom = dm * sff - sf * sf;
    if (!(denom > 0.0))
        return;
    const double slope = (dm * sfp - sf * sp) / denom;
    const double intercept = (sp - slope * sf) / dm;
    const double turns = std::round(intercept / kTwoPi);
    if (turns != 0.0)
        for (double& p : phase)
            p -= kTwoPi * turns;
}

inline void require_positive(std::span<const double> f)
{
    for (double x : f)
        if (!(x > 0.0))
            throw Error(ErrorCode::InvalidArgument, "phase delay is undefined at f <= 0 (drop the DC sample first)");
}

inline std::vector<double> delay_from_phase(std::span<const double> phase, std::span<const double> f)
{
    std::vector<double> t(phase.size());
    for (std::size_t i = 0; i < phase.size(); ++i)
        t[i] = -phase[i] / (kTwoPi * f[i]);
    return t;
}

/// Unwrap that tolerates magnitude nulls: null samples are skipped during
/// unwrapping and their phase is linearly interpolated from neighbours.
inline std::vector<double> unwrap_bridging_nulls(std::span<const Complex> z, std::span<const double> f,
                                                 Warnings& warnings, std::string_view label)
{
    std::vector<std::size_t> valid;
    valid.reserve(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        if (std::abs(z[i]) >= kNullMagnitude)
            valid.push_back(i);
    if (valid.size() < 2)
        throw Error(ErrorCode::ZeroMagnitudeSample, std::string(label) + ": fewer than two non-null samples");

    std::vector<Complex> kept(valid.size());
    std::vector<double> kept_f(valid.size());
    for (std::size_t j = 0; j < valid.size(); ++j) {
        kept[j] = z[valid[j]];
        kept_f[j] = f[valid[j]];
    }
    UnwrappedPhase unwrapped = unwrap_phase(kept);
    for (const auto& w : unwrapped.warnings)
        warnings.push_back(std::string(label) + ": " + w);
    if (valid.size() == z.size())
        return std::move(unwrapped.radians);

    std::vector<double> phase(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        phase[i] = interp_linear(kept_f, unwrapped.radians, f[i]);
    for (std::size_t j = 0; j < valid.size(); ++j)
        phase[valid[j]] = unwrapped.radians[j];
    warnings.push_back(std::string(label) + ": " + std::to_string(z.size() - valid.size()) +
                       " magnitude null(s) bridged by phase interpolation");
    return phase;
}

} // namespace detail

struct PhaseDelay {
    std::vector<double> seconds;
    Warnings warnings;
};

/// t(f) = -phase(H)/(2 pi f); a causal pure delay exp(-i 2 pi f tau) gives +tau.
inline PhaseDelay phase_delay(std::span<const Complex> samples, const FrequencyGrid& grid)
{
    if (samples.size() != grid.size())
        throw Error(ErrorCode::GridMismatch, "phase_delay: sample count differs from grid length");
    detail::require_positive(grid.hz());
    UnwrappedPhase unwrapped = unwrap_phase(samples);
    detail::anchor_phase_to_dc(unwrapped.radians, grid.hz());
    return {detail::delay_from_phase(unwrapped.radians, grid.hz()), std::move(unwrapped.warnings)};
}

/// Where the P/N skew is observed: at the left differential port (signal
/// travelling right to left) or at the right one (left to right).
enum class SkewPort { AtPort1, AtPort2 };

struct SkewProfile {
    FrequencyGrid grid;          // DC excluded
    std::vector<double> t_skew;  // seconds, P minus N arrival
    SkewPort port = SkewPort::AtPort2;
    Warnings warnings;
};

inline SkewProfile pn_skew(const MixedModeSet& mm, SkewPort port)
{
    const std::size_t offset = mm.grid.first_positive();
    if (mm.grid.size() < offset + 2)
        throw Error(ErrorCode::InvalidArgument, "skew extraction needs at least two non-DC samples");

    SkewProfile out;
    out.port = port;
    out.grid = mm.grid.without_dc();
    const auto f = out.grid.hz();

    const auto& p_line = port == SkewPort::AtPort2 ? mm.ssd21 : mm.ssd12;
    const auto& n_line = port == SkewPort::AtPort2 ? mm.ssd41 : mm.ssd32;
    const std::span<const Complex> p(p_line.data() + offset, f.size());
    const std::span<const Complex> n(n_line.data() + offset, f.size());

    std::vector<double> phase_p =
        detail::unwrap_bridging_nulls(p, f, out.warnings, port == SkewPort::AtPort2 ? "ssd21" : "ssd12");
    std::vector<double> phase_n =
        detail::unwrap_bridging_nulls(n, f, out.warnings, port == SkewPort::AtPort2 ? "ssd41" : "ssd32");
    detail::anchor_phase_to_dc(phase_p, f);
    detail::anchor_phase_to_dc(phase_n, f);
    const auto tp = detail::delay_from_phase(phase_p, f);
    const auto tn = detail::delay_from_phase(phase_n, f);

    out.t_skew.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out.t_skew[i] = tp[i] - tn[i];
    return out;
}

} // namespace sild
