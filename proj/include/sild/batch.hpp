#pragma once

#include <sild/analysis.hpp>
#include <sild/report.hpp>
#include <sild/touchstone.hpp>
#include <sild/units.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace sild {

enum class ErrorPolicy { Continue, FailFast };

inline ErrorPolicy parse_error_policy(std::string_view s)
{
    if (s == "continue")
        return ErrorPolicy::Continue;
    if (s == "fail-fast")
        return ErrorPolicy::FailFast;
    throw Error(ErrorCode::InvalidArgument, "unknown error policy '" + std::string(s) + "'");
}

struct ChannelRecord {
    std::string source_id;
    double fom_1 = 0.0;
    double fom_2 = 0.0;
    double delta = 0.0;
    double max_abs_sild = 0.0;
    double max_abs_sild_freq_hz = 0.0;
    Warnings warnings;
};

struct BatchFailure {
    std::string source_id;
    std::string error;
};

struct Histogram {
    double bin_width = 0.0;
    std::vector<double> edges;  // size counts.size() + 1, edges[0] == 0
    std::vector<std::size_t> counts;
};

namespace detail {

inline std::size_t bin_index(double v, double width)
{
    return static_cast<std::size_t>(std::floor(std::max(0.0, v) / width));
}

inline void finish_edges(Histogram& h)
{
    h.edges.resize(h.counts.size() + 1);
    for (std::size_t i = 0; i < h.edges.size(); ++i)
        h.edges[i] = static_cast<double>(i) * h.bin_width;
}

} // namespace detail

/// Left-closed, right-open bins of `bin_width` starting at 0 and extending
/// to cover the largest value (and at least `min_range` when any value is
/// present). Negative values land in the first bin.
inline Histogram histogram(std::span<const double> values, double bin_width, double min_range = 0.0)
{
    if (!(bin_width > 0.0))
        throw Error(ErrorCode::InvalidArgument, "histogram bin width must be positive");
    Histogram h;
    h.bin_width = bin_width;
    if (values.empty())
        return h;
    std::size_t bins = static_cast<std::size_t>(std::ceil(min_range / bin_width - 1e-9));
    for (double v : values)
        bins = std::max(bins, detail::bin_index(v, bin_width) + 1);
    h.counts.assign(bins, 0);
    for (double v : values)
        ++h.counts[detail::bin_index(v, bin_width)];
    detail::finish_edges(h);
    return h;
}

struct BatchOptions {
    FomConfig fom = FomConfig::preset("224g-pam4");
    std::optional<double> band_max;
    TouchstoneOverrides overrides;
    ErrorPolicy policy = ErrorPolicy::Continue;
    std::vector<double> thresholds = {0.01, 0.025, 0.05};
    double bin_width = 0.025;
    double histogram_range = 0.5;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::size_t chunk_size = 64;
};

struct BatchSummary {
    std::size_t count = 0;  // inputs attempted
    std::size_t successes = 0;
    Histogram histogram;  // of max(fom_1, fom_2) per successful channel
    std::vector<std::pair<double, double>> fraction_delta_exceeding;  // threshold -> fraction of successes
    double max_delta = 0.0;
    double max_fom = 0.0;
    std::vector<BatchFailure> failures;
    bool aborted = false;  // FailFast stopped early
    FomNormalization normalization = FomNormalization::WeightedRms;
};

using ChannelOutcome = std::variant<ChannelRecord, BatchFailure>;

/// Analyzes one file into a record; any error becomes a failure.
inline ChannelOutcome analyze_file(const std::filesystem::path& path, const BatchOptions& opt)
{
    const std::string id = path.generic_string();
    try {
        const SingleEndedNetwork net = read_touchstone_file(path, opt.overrides);
        const ChannelAnalysis a = analyze_channel(net, opt.fom, opt.band_max, id);
        ChannelRecord r;
        r.source_id = id;
        r.fom_1 = a.fom.fom_1;
        r.fom_2 = a.fom.fom_2;
        r.delta = a.fom_delta();
        r.max_abs_sild = a.max_sild.value_db;
        r.max_abs_sild_freq_hz = a.max_sild.frequency_hz;
        r.warnings = a.warnings;
        for (double v : {r.fom_1, r.fom_2, r.delta, r.max_abs_sild})
            if (!std::isfinite(v))
                return BatchFailure{id, "NumericOverflow: non-finite metric"};
        return r;
    } catch (const std::exception& e) {
        return BatchFailure{id, e.what()};
    }
}

/// Streaming batch: inputs are sorted by source id and analyzed in chunks
/// on worker threads; records reach `sink` in sorted order and only the
/// current chunk is held in memory.
inline BatchSummary analyze_batch_streaming(std::vector<std::filesystem::path> inputs, const BatchOptions& opt,
                                            const std::function<void(const ChannelRecord&)>& sink)
{
    if (inputs.empty())
        throw Error(ErrorCode::EmptyInput, "no inputs");
    opt.fom.validate();
    if (!(opt.bin_width > 0.0))
        throw Error(ErrorCode::InvalidArgument, "histogram bin width must be positive");
    std::sort(inputs.begin(), inputs.end(),
              [](const auto& a, const auto& b) { return a.generic_string() < b.generic_string(); });

    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunk = std::max<std::size_t>(1, opt.chunk_size);

    BatchSummary s;
    s.normalization = opt.fom.normalization;
    s.histogram.bin_width = opt.bin_width;
    s.histogram.counts.assign(static_cast<std::size_t>(std::ceil(opt.histogram_range / opt.bin_width - 1e-9)), 0);
    std::vector<std::size_t> exceed(opt.thresholds.size(), 0);

    std::vector<ChannelOutcome> buffer;
    for (std::size_t begin = 0; begin < inputs.size() && !s.aborted; begin += chunk) {
        const std::size_t n = std::min(chunk, inputs.size() - begin);
        buffer.assign(n, ChannelOutcome{});
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;)
                buffer[i] = analyze_file(inputs[begin + i], opt);
        };
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 1; t < std::min<std::size_t>(threads, n); ++t)
                pool.emplace_back(work);
            work();
        }
        for (auto& outcome : buffer) {
            ++s.count;
            if (auto* f = std::get_if<BatchFailure>(&outcome)) {
                s.failures.push_back(std::move(*f));
                if (opt.policy == ErrorPolicy::FailFast) {
                    s.aborted = true;
                    break;
                }
                continue;
            }
            const auto& r = std::get<ChannelRecord>(outcome);
            ++s.successes;
            const double fom = std::max(r.fom_1, r.fom_2);
            const std::size_t bin = detail::bin_index(fom, opt.bin_width);
            if (bin >= s.histogram.counts.size())
                s.histogram.counts.resize(bin + 1, 0);
            ++s.histogram.counts[bin];
            s.max_delta = std::max(s.max_delta, r.delta);
            s.max_fom = std::max(s.max_fom, fom);
            for (std::size_t t = 0; t < opt.thresholds.size(); ++t)
                if (r.delta > opt.thresholds[t])
                    ++exceed[t];
            sink(r);
        }
    }
    detail::finish_edges(s.histogram);
    for (std::size_t t = 0; t < opt.thresholds.size(); ++t)
        s.fraction_delta_exceeding.emplace_back(
            opt.thresholds[t], s.successes ? static_cast<double>(exceed[t]) / static_cast<double>(s.successes) : 0.0);
    return s;
}

struct BatchResult {
    std::vector<ChannelRecord> records;
    BatchSummary summary;
};

inline BatchResult analyze_batch(std::vector<std::filesystem::path> inputs, const BatchOptions& opt)
{
    BatchResult out;
    out.summary = analyze_batch_streaming(std::move(inputs), opt,
                                          [&](const ChannelRecord& r) { out.records.push_back(r); });
    return out;
}

inline constexpr const char* kRecordsHeader =
    "source_id,fom_1_db,fom_2_db,delta_db,max_abs_sild_db,max_abs_sild_freq_hz,warnings";

inline void write_record_csv(std::ostream& out, const ChannelRecord& r)
{
    std::string w;
    for (const auto& s : r.warnings)
        w += (w.empty() ? "" : "; ") + s;
    out << detail::csv_escape(r.source_id) << ',' << format_shortest(r.fom_1) << ',' << format_shortest(r.fom_2)
        << ',' << format_shortest(r.delta) << ',' << format_shortest(r.max_abs_sild) << ','
        << format_shortest(r.max_abs_sild_freq_hz) << ',' << detail::csv_escape(w) << "\n";
}

inline nlohmann::json summary_to_json(const BatchSummary& s)
{
    nlohmann::json j;
    j["schema"] = "sild.batch-summary";
    j["schema_version"] = 1;
    j["count"] = s.count;
    j["successes"] = s.successes;
    j["aborted"] = s.aborted;
    j["fom_units"] = detail::fom_units(s.normalization);
    j["max_delta"] = s.max_delta;
    j["max_fom"] = s.max_fom;
    j["histogram"] = {
        {"value", "max(fom_1, fom_2)"},
        {"bin_width", s.histogram.bin_width},
        {"edges", s.histogram.edges},
        {"counts", s.histogram.counts},
    };
    nlohmann::json fr = nlohmann::json::array();
    for (const auto& [threshold, fraction] : s.fraction_delta_exceeding)
        fr.push_back({{"threshold_db", threshold}, {"fraction", fraction}});
    j["fraction_delta_exceeding"] = fr;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : s.failures)
        failures.push_back({{"source_id", f.source_id}, {"error", f.error}});
    j["failures"] = failures;
    return j;
}

} // namespace sild
