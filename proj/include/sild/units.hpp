#pragma once

#include <sild/error.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace sild {

/// Shortest decimal text that parses back to the same double.
inline std::string format_shortest(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

enum class Dimension { Time, Frequency };

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline bool iequals(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

inline double unit_factor(std::string_view unit, Dimension dim)
{
    if (unit.empty())
        return 1.0;
    if (dim == Dimension::Time) {
        // case-sensitive: "ms" and "Ms" must not collide
        static constexpr std::pair<std::string_view, double> table[] = {
            {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
        for (const auto& [name, f] : table)
            if (unit == name)
                return f;
    } else {
        static constexpr std::pair<std::string_view, double> table[] = {
            {"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}, {"ghz", 1e9}, {"thz", 1e12}};
        for (const auto& [name, f] : table)
            if (iequals(unit, name))
                return f;
    }
    return 0.0;
}

} // namespace detail

/// Parses "3ps", "2.5 GHz", "1e-12" (SI base unit when no suffix).
inline double parse_quantity(std::string_view text, Dimension dim)
{
    const std::string_view s = detail::trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr == s.data())
        throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
    const std::string_view unit = detail::trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)));
    const double factor = detail::unit_factor(unit, dim);
    if (factor == 0.0)
        throw Error(ErrorCode::InvalidArgument, "unknown unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
    if (!std::isfinite(value))
        throw Error(ErrorCode::InvalidArgument, "non-finite value: '" + std::string(text) + "'");
    return value * factor;
}

struct Sweep {
    std::string name;
    std::vector<double> values;  // SI units
    std::vector<double> display;  // in the unit written by the user
    std::string unit;
};

/// "tau=0:0.5:3ps" -> tau in {0, 0.5, ..., 3} ps, endpoint included.
inline Sweep parse_sweep(std::string_view text, Dimension dim)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
        throw Error(ErrorCode::InvalidArgument, "sweep must look like name=start:step:stop[unit]");
    Sweep sw;
    sw.name = std::string(detail::trim(text.substr(0, eq)));
    std::string_view rest = detail::trim(text.substr(eq + 1));
    std::size_t unit_pos = rest.size();
    while (unit_pos > 0 && std::isalpha(static_cast<unsigned char>(rest[unit_pos - 1])))
        --unit_pos;
    sw.unit = std::string(rest.substr(unit_pos));
    const double factor = detail::unit_factor(sw.unit, dim);
    if (factor == 0.0)
        throw Error(ErrorCode::InvalidArgument, "unknown unit '" + sw.unit + "' in sweep");
    rest = rest.substr(0, unit_pos);

    double parts[3] = {};
    for (int i = 0; i < 3; ++i) {
        const auto colon = rest.find(':');
        const std::string_view tok = detail::trim(i < 2 ? rest.substr(0, colon) : rest);
        if ((i < 2 && colon == std::string_view::npos) || (i == 2 && rest.find(':') != std::string_view::npos))
            throw Error(ErrorCode::InvalidArgument, "sweep must look like name=start:step:stop[unit]");
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), parts[i]);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
            throw Error(ErrorCode::InvalidArgument, "bad sweep number '" + std::string(tok) + "'");
        if (i < 2)
            rest = rest.substr(colon + 1);
    }
    const double start = parts[0], step = parts[1], stop = parts[2];
    if (!(step > 0.0) || stop < start)
        throw Error(ErrorCode::InvalidArgument, "sweep needs step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > 100000)
        throw Error(ErrorCode::InvalidArgument, "sweep has too many points");
    for (std::size_t i = 0; i < n; ++i) {
        const double v = start + static_cast<double>(i) * step;
        sw.display.push_back(v);
        sw.values.push_back(v * factor);
    }
    return sw;
}

} // namespace sild
