#pragma once

#include <sild/metrics.hpp>
#include <sild/network.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sild {

/// Everything the analyze report shows for one channel.
struct ChannelAnalysis {
    std::string source;
    FomConfig config;
    double band_max_hz = 0.0;
    PortMap port_map;
    SildResult sild;
    FomResult fom;
    MaxAbsSild max_sild;
    std::vector<double> weights;  // W(f) on sild.grid
    Warnings warnings;

    double fom_delta() const { return std::abs(fom.fom_1 - fom.fom_2); }
};

/// Skew, de-skewed magnitudes, SILD, FOM and max |SILD| in one pass.
/// `band_max` defaults to the FOM cutoff.
inline ChannelAnalysis analyze_channel(const SingleEndedNetwork& net, const FomConfig& cfg,
                                       std::optional<double> band_max = {}, std::string source = {})
{
    cfg.validate();
    ChannelAnalysis a;
    a.source = std::move(source);
    a.config = cfg;
    a.band_max_hz = band_max.value_or(cfg.f_max);
    a.port_map = net.port_map;
    a.sild = compute_sild(net);
    a.fom = fom_sild(a.sild, cfg);
    a.max_sild = max_abs_sild(a.sild, a.band_max_hz);
    a.weights.resize(a.sild.grid.size());
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        a.weights[i] = weight(a.sild.grid[i], cfg);
    append(a.warnings, a.sild.warnings);
    append(a.warnings, a.fom.warnings);
    return a;
}

} // namespace sild
