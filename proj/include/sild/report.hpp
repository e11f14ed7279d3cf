#pragma once

#include <sild/analysis.hpp>
#include <sild/pulse.hpp>
#include <sild/touchstone.hpp>
#include <sild/units.hpp>

#include <json.hpp>

#include <ostream>
#include <string>

namespace sild {

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline const char* fom_units(FomNormalization n)
{
    return n == FomNormalization::WeightedRms ? "dB" : "dB^2";
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline const char* const kAnalysisColumns[] = {
    "frequency_hz", "t_skew_1_s", "t_skew_2_s", "sdd21_db", "sdd12_db", "s0dd21_db",
    "s0dd12_db", "sild_1_db", "sild_2_db", "weight",
};

/// Scalar block as "# key,value" lines followed by the per-frequency table.
inline void write_analysis_csv(std::ostream& out, const ChannelAnalysis& a)
{
    out << "# source," << detail::csv_escape(a.source) << "\n";
    out << "# port_map," << detail::csv_escape(a.port_map.to_string()) << "\n";
    out << "# f_b_hz," << format_shortest(a.config.f_b) << "\n";
    out << "# f_r_hz," << format_shortest(a.config.f_r) << "\n";
    out << "# f_t_hz," << format_shortest(a.config.f_t) << "\n";
    out << "# f_max_hz," << format_shortest(a.config.f_max) << "\n";
    out << "# normalization," << to_string(a.config.normalization) << "\n";
    out << "# fom_units," << detail::fom_units(a.config.normalization) << "\n";
    out << "# fom_1," << format_shortest(a.fom.fom_1) << "\n";
    out << "# fom_2," << format_shortest(a.fom.fom_2) << "\n";
    out << "# fom_delta," << format_shortest(a.fom_delta()) << "\n";
    out << "# fom_samples," << a.fom.samples << "\n";
    out << "# fom_cutoff_hz," << format_shortest(a.fom.cutoff_hz) << "\n";
    out << "# band_max_hz," << format_shortest(a.band_max_hz) << "\n";
    out << "# max_abs_sild_db," << format_shortest(a.max_sild.value_db) << "\n";
    out << "# max_abs_sild_freq_hz," << format_shortest(a.max_sild.frequency_hz) << "\n";
    out << "# max_abs_sild_direction," << a.max_sild.direction << "\n";
    for (const auto& w : a.warnings)
        out << "# warning," << detail::csv_escape(w) << "\n";

    bool first = true;
    for (const char* c : kAnalysisColumns) {
        out << (first ? "" : ",") << c;
        first = false;
    }
    out << "\n";
    const auto& s = a.sild;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        out << format_shortest(s.grid[i]) << ',' << format_shortest(s.t_skew_1[i]) << ','
            << format_shortest(s.t_skew_2[i]) << ',' << format_shortest(s.original_mag_21[i]) << ','
            << format_shortest(s.original_mag_12[i]) << ',' << format_shortest(s.deskewed_mag_21[i]) << ','
            << format_shortest(s.deskewed_mag_12[i]) << ',' << format_shortest(s.sild_1[i]) << ','
            << format_shortest(s.sild_2[i]) << ',' << format_shortest(a.weights[i]) << "\n";
    }
}

inline nlohmann::json analysis_to_json(const ChannelAnalysis& a)
{
    nlohmann::json j;
    j["schema"] = "sild.analyze-report";
    j["schema_version"] = kReportSchemaVersion;
    j["source"] = a.source;
    j["port_map"] = a.port_map.to_string();
    j["config"] = {
        {"f_b_hz", a.config.f_b},
        {"f_r_hz", a.config.f_r},
        {"f_t_hz", a.config.f_t},
        {"f_max_hz", a.config.f_max},
        {"normalization", to_string(a.config.normalization)},
        {"band_max_hz", a.band_max_hz},
    };
    j["scalars"] = {
        {"fom_1", a.fom.fom_1},
        {"fom_2", a.fom.fom_2},
        {"fom_delta", a.fom_delta()},
        {"fom_units", detail::fom_units(a.config.normalization)},
        {"fom_samples", a.fom.samples},
        {"fom_cutoff_hz", a.fom.cutoff_hz},
        {"fom_resampled", a.fom.resampled},
        {"insufficient_bandwidth", a.fom.insufficient_bandwidth},
        {"max_abs_sild_db", a.max_sild.value_db},
        {"max_abs_sild_freq_hz", a.max_sild.frequency_hz},
        {"max_abs_sild_direction", a.max_sild.direction},
    };
    j["warnings"] = a.warnings;
    const auto& s = a.sild;
    j["table"] = {
        {"frequency_hz", s.grid.values()},
        {"t_skew_1_s", s.t_skew_1},
        {"t_skew_2_s", s.t_skew_2},
        {"sdd21_db", s.original_mag_21},
        {"sdd12_db", s.original_mag_12},
        {"s0dd21_db", s.deskewed_mag_21},
        {"s0dd12_db", s.deskewed_mag_12},
        {"sild_1_db", s.sild_1},
        {"sild_2_db", s.sild_2},
        {"weight", a.weights},
    };
    return j;
}

inline void write_pulse_csv(std::ostream& out, const PulseResponse& r)
{
    out << "time_s,amplitude\n";
    for (std::size_t i = 0; i < r.time_s.size(); ++i)
        out << format_shortest(r.time_s[i]) << ',' << format_shortest(r.amplitude[i]) << "\n";
}

} // namespace sild
