#pragma once

#include <sild/error.hpp>
#include <sild/grid.hpp>
#include <sild/network.hpp>
#include <sild/units.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace sild {

enum class FrequencyUnit { Hz, kHz, MHz, GHz };
enum class DataFormat { RI, MA, DB };
enum class TouchstoneVersion { V1, V2 };

inline double unit_scale(FrequencyUnit unit)
{
    switch (unit) {
    case FrequencyUnit::Hz: return 1.0;
    case FrequencyUnit::kHz: return 1e3;
    case FrequencyUnit::MHz: return 1e6;
    case FrequencyUnit::GHz: return 1e9;
    }
    return 1.0;
}

inline const char* to_string(FrequencyUnit unit)
{
    switch (unit) {
    case FrequencyUnit::Hz: return "HZ";
    case FrequencyUnit::kHz: return "KHZ";
    case FrequencyUnit::MHz: return "MHZ";
    case FrequencyUnit::GHz: return "GHZ";
    }
    return "GHZ";
}

inline const char* to_string(DataFormat format)
{
    switch (format) {
    case DataFormat::RI: return "RI";
    case DataFormat::MA: return "MA";
    case DataFormat::DB: return "DB";
    }
    return "RI";
}

struct TouchstoneOptions {
    FrequencyUnit frequency_unit = FrequencyUnit::GHz;
    DataFormat data_format = DataFormat::RI;
    double reference_impedance = 50.0;
    TouchstoneVersion version = TouchstoneVersion::V1;

    void validate() const
    {
        if (!(reference_impedance > 0.0) || !std::isfinite(reference_impedance))
            throw Error(ErrorCode::InvalidArgument, "reference impedance must be a positive number");
    }
};

/// Values that replace whatever the file declares. `ports` is also how a
/// file name extension (.s2p / .s4p) reaches the parser.
struct TouchstoneOverrides {
    std::optional<FrequencyUnit> frequency_unit;
    std::optional<DataFormat> data_format;
    std::optional<double> reference_impedance;
    std::optional<int> ports;
    std::optional<PortMap> port_map;
};

/// Port-count-agnostic parse result.
struct TouchstoneData {
    int ports = 0;
    TouchstoneOptions options;
    FrequencyGrid grid;
    std::vector<Eigen::MatrixXcd> matrices;
    Warnings warnings;
};

namespace detail {

struct DataLine {
    std::size_t number = 0;
    std::vector<std::string_view> tokens;
};

inline std::string upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        if (i > start)
            out.push_back(s.substr(start, i - start));
    }
    return out;
}

inline std::string where(std::string_view source, std::size_t line)
{
    return std::string(source) + ":" + std::to_string(line) + ": ";
}

inline double parse_number(std::string_view token, std::string_view source, std::size_t line)
{
    std::string_view body = token;
    if (!body.empty() && body.front() == '+')
        body.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw Error(ErrorCode::NumericOverflow, where(source, line) + "value '" + std::string(token) + "' out of range");
    if (ec != std::errc() || ptr != body.data() + body.size())
        throw Error(ErrorCode::MalformedRecord, where(source, line) + "'" + std::string(token) + "' is not a number");
    if (!std::isfinite(value))
        throw Error(ErrorCode::NumericOverflow, where(source, line) + "non-finite value '" + std::string(token) + "'");
    return value;
}

inline Complex to_complex(double a, double b, DataFormat format)
{
    constexpr double deg = std::numbers::pi / 180.0;
    switch (format) {
    case DataFormat::RI: return {a, b};
    case DataFormat::MA: return a >= 0.0 ? std::polar(a, b * deg) : -std::polar(-a, b * deg);
    case DataFormat::DB: return std::polar(from_db(a), b * deg);
    }
    return {a, b};
}

inline std::string format_double(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

enum class MatrixFormat { Full, Lower, Upper };

} // namespace detail

/// Parses Touchstone V1 or V2 text holding 2- or 4-port S-parameters.
/// Frequencies come back in Hz and data in rectangular form whatever the
/// file used. `source` only decorates error messages.
inline TouchstoneData parse_touchstone_data(std::string_view text, const TouchstoneOverrides& overrides = {},
                                            std::string_view source = "<input>")
{
    using detail::where;

    TouchstoneData out;
    bool option_line_seen = false;
    bool v2_network_data = false;
    bool in_information = false;
    bool two_port_12_21 = false;
    bool two_port_order_seen = false;
    std::optional<int> declared_ports;
    std::optional<std::size_t> declared_frequencies;
    detail::MatrixFormat matrix_format = detail::MatrixFormat::Full;
    std::size_t reference_pending = 0;
    std::vector<double> references;
    std::vector<detail::DataLine> data;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool ended = false;
    while (pos <= text.size() && !ended) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto bang = raw.find('!'); bang != std::string_view::npos)
            raw = raw.substr(0, bang);
        const std::string_view line = detail::trim(raw);
        if (line.empty())
            continue;

        if (in_information) {
            if (detail::upper(line).rfind("[END INFORMATION]", 0) == 0)
                in_information = false;
            continue;
        }

        if (line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string_view::npos)
                throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "unterminated keyword");
            const std::string keyword = detail::upper(detail::trim(line.substr(1, close - 1)));
            const std::string_view rest = detail::trim(line.substr(close + 1));
            const auto args = detail::split_ws(rest);

            if (keyword == "VERSION") {
                if (args.empty() || args[0].substr(0, 2) != "2.")
                    throw Error(ErrorCode::UnsupportedFeature, where(source, line_no) + "unsupported version");
                out.options.version = TouchstoneVersion::V2;
            } else if (keyword == "NUMBER OF PORTS") {
                if (args.size() != 1)
                    throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "[Number of Ports] needs one value");
                declared_ports = static_cast<int>(detail::parse_number(args[0], source, line_no));
            } else if (keyword == "TWO-PORT DATA ORDER") {
                const std::string order = args.empty() ? std::string() : detail::upper(args[0]);
                if (order != "12_21" && order != "21_12")
                    throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "bad [Two-Port Data Order]");
                two_port_12_21 = order == "12_21";
                two_port_order_seen = true;
            } else if (keyword == "NUMBER OF FREQUENCIES") {
                if (args.size() != 1)
                    throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "[Number of Frequencies] needs one value");
                declared_frequencies = static_cast<std::size_t>(detail::parse_number(args[0], source, line_no));
            } else if (keyword == "NUMBER OF NOISE FREQUENCIES" || keyword == "NOISE DATA") {
                throw Error(ErrorCode::UnsupportedFeature, where(source, line_no) + "noise parameter data is not supported");
            } else if (keyword == "MIXED-MODE ORDER") {
                throw Error(ErrorCode::UnsupportedFeature, where(source, line_no) + "mixed-mode Touchstone data is not supported");
            } else if (keyword == "REFERENCE") {
                const int n = overrides.ports.value_or(declared_ports.value_or(0));
                if (n <= 0)
                    throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "[Reference] before [Number of Ports]");
                for (auto a : args)
                    references.push_back(detail::parse_number(a, source, line_no));
                reference_pending = references.size() < static_cast<std::size_t>(n)
                                        ? static_cast<std::size_t>(n) - references.size()
                                        : 0;
            } else if (keyword == "MATRIX FORMAT") {
                const std::string fmt = args.empty() ? std::string() : detail::upper(args[0]);
                if (fmt == "FULL")
                    matrix_format = detail::MatrixFormat::Full;
                else if (fmt == "LOWER")
                    matrix_format = detail::MatrixFormat::Lower;
                else if (fmt == "UPPER")
                    matrix_format = detail::MatrixFormat::Upper;
                else
                    throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "bad [Matrix Format]");
            } else if (keyword == "NETWORK DATA") {
                v2_network_data = true;
            } else if (keyword == "END") {
                ended = true;
            } else if (keyword == "BEGIN INFORMATION") {
                in_information = true;
            } else {
                out.warnings.push_back(where(source, line_no) + "ignored keyword [" + keyword + "]");
            }
            continue;
        }

        if (line.front() == '#') {
            if (option_line_seen) {
                out.warnings.push_back(where(source, line_no) + "extra option line ignored");
                continue;
            }
            option_line_seen = true;
            const auto tokens = detail::split_ws(line.substr(1));
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const std::string tok = detail::upper(tokens[i]);
                if (tok == "HZ")
                    out.options.frequency_unit = FrequencyUnit::Hz;
                else if (tok == "KHZ")
                    out.options.frequency_unit = FrequencyUnit::kHz;
                else if (tok == "MHZ")
                    out.options.frequency_unit = FrequencyUnit::MHz;
                else if (tok == "GHZ")
                    out.options.frequency_unit = FrequencyUnit::GHz;
                else if (tok == "S")
                    continue;
                else if (tok == "Y" || tok == "Z" || tok == "H" || tok == "G")
                    throw Error(ErrorCode::UnsupportedFeature, where(source, line_no) + tok + "-parameters are not supported");
                else if (tok == "RI")
                    out.options.data_format = DataFormat::RI;
                else if (tok == "MA")
                    out.options.data_format = DataFormat::MA;
                else if (tok == "DB")
                    out.options.data_format = DataFormat::DB;
                else if (tok == "R") {
                    if (i + 1 >= tokens.size())
                        throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "option 'R' without impedance");
                    out.options.reference_impedance = detail::parse_number(tokens[++i], source, line_no);
                } else
                    throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "unknown option '" + std::string(tokens[i]) + "'");
            }
            continue;
        }

        auto tokens = detail::split_ws(line);
        if (reference_pending > 0) {
            for (auto t : tokens)
                references.push_back(detail::parse_number(t, source, line_no));
            reference_pending = tokens.size() >= reference_pending ? 0 : reference_pending - tokens.size();
            continue;
        }
        if (out.options.version == TouchstoneVersion::V2 && !v2_network_data)
            throw Error(ErrorCode::MalformedRecord, where(source, line_no) + "data before [Network Data]");
        data.push_back({line_no, std::move(tokens)});
    }

    if (!references.empty()) {
        for (double r : references)
            if (r != references.front())
                throw Error(ErrorCode::UnsupportedFeature, std::string(source) + ": per-port reference impedances differ");
        out.options.reference_impedance = references.front();
    }
    if (overrides.frequency_unit)
        out.options.frequency_unit = *overrides.frequency_unit;
    if (overrides.data_format)
        out.options.data_format = *overrides.data_format;
    if (overrides.reference_impedance)
        out.options.reference_impedance = *overrides.reference_impedance;
    out.options.validate();

    if (data.empty())
        throw Error(ErrorCode::MalformedRecord, std::string(source) + ": no network data");

    int ports = overrides.ports.value_or(declared_ports.value_or(0));
    if (ports == 0) {
        // V1 without a hint: 2-port records are single 9-value lines, 4-port
        // records start with 9 values and continue on 8-value lines.
        const std::size_t first = data.front().tokens.size();
        if (first == 9)
            ports = (data.size() > 1 && data[1].tokens.size() == 8) ? 4 : 2;
        else if (first == 33)
            ports = 4;
        else if (first == 3)
            ports = 1;
        else if (first == 7)
            ports = 3;
        else
            throw Error(ErrorCode::UnsupportedPortCount,
                        where(source, data.front().number) + "cannot infer port count from " + std::to_string(first) + " values");
    }
    if (ports != 2 && ports != 4)
        throw Error(ErrorCode::UnsupportedPortCount, std::string(source) + ": " + std::to_string(ports) +
                                                         "-port data (only 2 and 4 ports are supported)");
    if (ports == 2 && out.options.version == TouchstoneVersion::V2 && !two_port_order_seen)
        out.warnings.push_back(std::string(source) + ": [Two-Port Data Order] missing, assuming 21_12");
    out.ports = ports;

    const std::size_t n = static_cast<std::size_t>(ports);
    const std::size_t pairs = matrix_format == detail::MatrixFormat::Full ? n * n : n * (n + 1) / 2;
    const std::size_t per_record = 1 + 2 * pairs;
    const double scale = unit_scale(out.options.frequency_unit);

    std::vector<double> freqs;
    std::vector<double> values;
    values.reserve(per_record);
    std::size_t record_line = 0;

    auto finish_record = [&]() {
        const double f = values[0] * scale;
        if (f < 0.0)
            throw Error(ErrorCode::MalformedRecord, where(source, record_line) + "negative frequency");
        if (!freqs.empty() && !(f > freqs.back()))
            throw Error(ErrorCode::NonAscendingFrequency,
                        where(source, record_line) + "frequency " + format_shortest(f) + " Hz is not above the previous sample");
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ports, ports);
        std::size_t v = 1;
        auto next = [&]() {
            const Complex c = detail::to_complex(values[v], values[v + 1], out.options.data_format);
            v += 2;
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw Error(ErrorCode::NumericOverflow, where(source, record_line) + "value overflows after conversion");
            return c;
        };
        if (matrix_format == detail::MatrixFormat::Full) {
            if (ports == 2) {
                const bool v1_order = out.options.version == TouchstoneVersion::V1 || !two_port_12_21;
                m(0, 0) = next();
                if (v1_order) {
                    m(1, 0) = next();
                    m(0, 1) = next();
                } else {
                    m(0, 1) = next();
                    m(1, 0) = next();
                }
                m(1, 1) = next();
            } else {
                for (int r = 0; r < ports; ++r)
                    for (int c = 0; c < ports; ++c)
                        m(r, c) = next();
            }
        } else {
            const bool lower = matrix_format == detail::MatrixFormat::Lower;
            for (int r = 0; r < ports; ++r)
                for (int c = lower ? 0 : r; c < (lower ? r + 1 : ports); ++c) {
                    m(r, c) = next();
                    m(c, r) = m(r, c);
                }
        }
        freqs.push_back(f);
        out.matrices.push_back(std::move(m));
        values.clear();
    };

    for (const auto& dl : data) {
        if (values.empty()) {
            record_line = dl.number;
            if (ports == 2 && dl.tokens.size() == 5 && out.options.version == TouchstoneVersion::V1) {
                const double f = detail::parse_number(dl.tokens[0], source, dl.number) * scale;
                if (!freqs.empty() && f <= freqs.back())
                    throw Error(ErrorCode::UnsupportedFeature, where(source, dl.number) + "noise parameter data is not supported");
            }
        }
        if (values.size() + dl.tokens.size() > per_record)
            throw Error(ErrorCode::MalformedRecord, where(source, dl.number) + "record has " +
                                                        std::to_string(values.size() + dl.tokens.size()) +
                                                        " values, expected " + std::to_string(per_record));
        for (auto tok : dl.tokens)
            values.push_back(detail::parse_number(tok, source, dl.number));
        if (values.size() == per_record)
            finish_record();
    }
    if (!values.empty())
        throw Error(ErrorCode::MalformedRecord, where(source, record_line) + "truncated record (" +
                                                    std::to_string(values.size()) + " of " +
                                                    std::to_string(per_record) + " values)");
    if (declared_frequencies && *declared_frequencies != freqs.size())
        throw Error(ErrorCode::MalformedRecord, std::string(source) + ": [Number of Frequencies] says " +
                                                    std::to_string(*declared_frequencies) + ", found " +
                                                    std::to_string(freqs.size()));
    out.grid = FrequencyGrid(std::move(freqs));
    if (out.grid.has_dc())
        out.warnings.push_back(std::string(source) + ": DC sample present; excluded from skew analysis");
    return out;
}

template <int Ports>
BasicNetwork<Ports> to_network(const TouchstoneData& data)
{
    if (data.ports != Ports)
        throw Error(ErrorCode::UnsupportedPortCount, "expected " + std::to_string(Ports) + "-port data, got " +
                                                         std::to_string(data.ports) + "-port");
    BasicNetwork<Ports> net;
    net.grid = data.grid;
    net.reference_impedance = data.options.reference_impedance;
    net.matrices.reserve(data.matrices.size());
    for (const auto& m : data.matrices)
        net.matrices.emplace_back(m);
    net.validate();
    return net;
}

inline SingleEndedNetwork parse_touchstone(std::string_view text, const TouchstoneOverrides& overrides = {},
                                           std::string_view source = "<input>")
{
    const TouchstoneData data = parse_touchstone_data(text, overrides, source);
    SingleEndedNetwork net;
    static_cast<BasicNetwork<4>&>(net) = to_network<4>(data);
    net.port_map = overrides.port_map.value_or(PortMap{});
    net.port_map.validate();
    return net;
}

inline TwoPortNetwork parse_touchstone_2port(std::string_view text, const TouchstoneOverrides& overrides = {},
                                             std::string_view source = "<input>")
{
    return to_network<2>(parse_touchstone_data(text, overrides, source));
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Port count from a ".sNp" extension, 0 when the name does not say.
inline int ports_from_extension(const std::filesystem::path& path)
{
    const std::string ext = detail::upper(path.extension().string());
    if (ext.size() < 4 || ext[1] != 'S' || ext.back() != 'P')
        return 0;
    int n = 0;
    const auto [ptr, ec] = std::from_chars(ext.data() + 2, ext.data() + ext.size() - 1, n);
    return (ec == std::errc() && ptr == ext.data() + ext.size() - 1) ? n : 0;
}

inline SingleEndedNetwork read_touchstone_file(const std::filesystem::path& path, TouchstoneOverrides overrides = {})
{
    if (!overrides.ports)
        if (const int n = ports_from_extension(path); n > 0)
            overrides.ports = n;
    return parse_touchstone(read_text_file(path), overrides, path.string());
}

/// Deterministic writer: fixed 17 significant digits, V1 row layout (one
/// matrix row per line for 4-port, S11 S21 S12 S22 for 2-port).
template <int Ports>
std::string write_touchstone(const BasicNetwork<Ports>& net, const TouchstoneOptions& options = {})
{
    static_assert(Ports == 2 || Ports == 4, "Touchstone writer supports 2 and 4 ports");
    net.validate();
    options.validate();
    const double scale = unit_scale(options.frequency_unit);
    const bool v2 = options.version == TouchstoneVersion::V2;

    std::string out;
    out.reserve(net.size() * (Ports * Ports * 48 + 32) + 256);
    out += "! " + std::to_string(Ports) + "-port S-parameters, " + std::to_string(net.size()) + " frequency points\n";
    if (v2)
        out += "[Version] 2.0\n";
    out += "# ";
    out += to_string(options.frequency_unit);
    out += " S ";
    out += to_string(options.data_format);
    out += " R " + format_shortest(net.reference_impedance) + "\n";
    if (v2) {
        out += "[Number of Ports] " + std::to_string(Ports) + "\n";
        if (Ports == 2)
            out += "[Two-Port Data Order] 21_12\n";
        out += "[Number of Frequencies] " + std::to_string(net.size()) + "\n";
        out += "[Reference]";
        for (int p = 0; p < Ports; ++p)
            out += " " + format_shortest(net.reference_impedance);
        out += "\n[Network Data]\n";
    }

    auto put = [&](double v) {
        out += v < 0.0 || std::signbit(v) ? " " : "  ";
        out += detail::format_double(v);
    };
    auto put_entry = [&](Complex c) {
        switch (options.data_format) {
        case DataFormat::RI:
            put(c.real());
            put(c.imag());
            break;
        case DataFormat::MA:
            put(std::abs(c));
            put(std::arg(c) * 180.0 / std::numbers::pi);
            break;
        case DataFormat::DB:
            put(to_db(std::abs(c)));
            put(std::arg(c) * 180.0 / std::numbers::pi);
            break;
        }
    };

    for (std::size_t k = 0; k < net.size(); ++k) {
        const auto& m = net.matrices[k];
        out += detail::format_double(net.grid[k] / scale);
        if constexpr (Ports == 2) {
            put_entry(m(0, 0));
            put_entry(m(1, 0));
            put_entry(m(0, 1));
            put_entry(m(1, 1));
            out += "\n";
        } else {
            for (int r = 0; r < Ports; ++r) {
                if (r > 0)
                    out += "                       ";
                for (int c = 0; c < Ports; ++c)
                    put_entry(m(r, c));
                out += "\n";
            }
        }
    }
    if (v2)
        out += "[End]\n";
    return out;
}

template <int Ports>
void write_touchstone_file(const std::filesystem::path& path, const BasicNetwork<Ports>& net,
                           const TouchstoneOptions& options = {})
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << write_touchstone(net, options);
    if (!out)
        throw Error(ErrorCode::Io, "write failed for " + path.string());
}

} // namespace sild
