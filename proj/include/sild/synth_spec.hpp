#pragma once

#include <sild/synth.hpp>
#include <sild/units.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>

namespace sild {

/// Where and how skew is injected into a generated channel.
struct SkewInjection {
    SkewProfileSpec profile;
    Line line = Line::P;
    Side side = Side::Left;
};

/// A synthesis job as read from a JSON spec file:
///
///   {
///     "name": "twinax_a",
///     "grid": {"start": "10MHz", "stop": "110GHz", "step": "10MHz"},
///     "base_delay": "1ns",
///     "loss": {"dc_db": 0.2, "skin_db_per_sqrt_hz": 4.3e-5, "dielectric_db_per_hz": 2e-11},
///     "coupling": 0.05,
///     "coupling_imbalance": 0.0,
///     "coupling_corner": "20GHz",
///     "reference_impedance": 50,
///     "port_map": "default",
///     "skew": {"profile": "flat", "tau": "3ps", "line": "p", "side": "left"}
///   }
///
/// The grid takes "step" or "points". Quantities accept a number in SI
/// units or a string with a unit suffix. Unknown keys are rejected.
struct SynthJob {
    std::string name = "channel";
    ChannelSpec channel;
    std::optional<SkewInjection> skew;
};

namespace detail {

class SpecReader {
public:
    explicit SpecReader(const nlohmann::json& root) : root_(root) {}

    [[noreturn]] static void fail(const std::string& path, const std::string& msg)
    {
        throw Error(ErrorCode::InvalidArgument, path + ": " + msg);
    }

    static void check_keys(const nlohmann::json& obj, const std::string& path, std::set<std::string> allowed)
    {
        if (!obj.is_object())
            fail(path.empty() ? "/" : path, "must be an object");
        for (const auto& [key, _] : obj.items())
            if (!allowed.count(key))
                fail(path + "/" + key, "unknown field");
    }

    static double quantity(const nlohmann::json& v, const std::string& path, Dimension dim)
    {
        try {
            if (v.is_number())
                return v.get<double>();
            if (v.is_string())
                return parse_quantity(v.get<std::string>(), dim);
        } catch (const Error& e) {
            fail(path, e.detail());
        }
        fail(path, "must be a number or a string with a unit");
    }

    static double number(const nlohmann::json& v, const std::string& path)
    {
        if (!v.is_number())
            fail(path, "must be a number");
        return v.get<double>();
    }

    static std::string string(const nlohmann::json& v, const std::string& path)
    {
        if (!v.is_string())
            fail(path, "must be a string");
        return v.get<std::string>();
    }

    SynthJob read() const
    {
        check_keys(root_, "", {"name", "grid", "base_delay", "loss", "coupling", "coupling_imbalance", "coupling_corner",
                               "reference_impedance", "port_map", "skew"});
        SynthJob job;
        if (root_.contains("name"))
            job.name = string(root_["name"], "/name");
        if (job.name.empty() || job.name.find_first_of("/\\") != std::string::npos)
            fail("/name", "must be a non-empty file stem");
        if (!root_.contains("grid"))
            fail("/grid", "required");
        job.channel.grid = grid(root_["grid"]);
        if (root_.contains("base_delay"))
            job.channel.base_delay = quantity(root_["base_delay"], "/base_delay", Dimension::Time);
        if (root_.contains("loss")) {
            const auto& l = root_["loss"];
            check_keys(l, "/loss", {"dc_db", "skin_db_per_sqrt_hz", "dielectric_db_per_hz"});
            if (l.contains("dc_db"))
                job.channel.loss.dc_loss_db = number(l["dc_db"], "/loss/dc_db");
            if (l.contains("skin_db_per_sqrt_hz"))
                job.channel.loss.skin_coeff_db_per_sqrt_hz = number(l["skin_db_per_sqrt_hz"], "/loss/skin_db_per_sqrt_hz");
            if (l.contains("dielectric_db_per_hz"))
                job.channel.loss.dielectric_coeff_db_per_hz = number(l["dielectric_db_per_hz"], "/loss/dielectric_db_per_hz");
            for (const char* key : {"dc_db", "skin_db_per_sqrt_hz", "dielectric_db_per_hz"})
                if (l.contains(key) && l[key].get<double>() < 0.0)
                    fail(std::string("/loss/") + key, "must be >= 0");
        }
        if (root_.contains("coupling"))
            job.channel.coupling = number(root_["coupling"], "/coupling");
        if (root_.contains("coupling_imbalance"))
            job.channel.coupling_imbalance = number(root_["coupling_imbalance"], "/coupling_imbalance");
        if (root_.contains("coupling_corner"))
            job.channel.coupling_corner = quantity(root_["coupling_corner"], "/coupling_corner", Dimension::Frequency);
        if (root_.contains("reference_impedance"))
            job.channel.reference_impedance = number(root_["reference_impedance"], "/reference_impedance");
        if (root_.contains("port_map")) {
            try {
                job.channel.port_map = PortMap::parse(string(root_["port_map"], "/port_map"));
            } catch (const Error& e) {
                fail("/port_map", e.detail());
            }
        }
        try {
            job.channel.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidArgument, "/" + e.detail());
        }
        if (root_.contains("skew"))
            job.skew = skew(root_["skew"]);
        return job;
    }

private:
    static FrequencyGrid grid(const nlohmann::json& g)
    {
        check_keys(g, "/grid", {"start", "stop", "step", "points"});
        for (const char* key : {"start", "stop"})
            if (!g.contains(key))
                fail(std::string("/grid/") + key, "required");
        const double start = quantity(g["start"], "/grid/start", Dimension::Frequency);
        const double stop = quantity(g["stop"], "/grid/stop", Dimension::Frequency);
        if (!(start >= 0.0))
            fail("/grid/start", "must be >= 0");
        if (!(stop > start))
            fail("/grid/stop", "must exceed start");
        if (g.contains("step") == g.contains("points"))
            fail("/grid", "give exactly one of step or points");
        std::size_t n = 0;
        if (g.contains("points")) {
            if (!g["points"].is_number_integer() || g["points"].get<long long>() < 2)
                fail("/grid/points", "must be an integer >= 2");
            n = static_cast<std::size_t>(g["points"].get<long long>());
        } else {
            const double step = quantity(g["step"], "/grid/step", Dimension::Frequency);
            if (!(step > 0.0))
                fail("/grid/step", "must be positive");
            n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
            if (n < 2)
                fail("/grid/step", "yields fewer than two points");
            if (n > 10'000'000)
                fail("/grid/step", "yields too many points");
            return FrequencyGrid::stepped(start, step, n);
        }
        return FrequencyGrid::linear(start, stop, n);
    }

    static SkewInjection skew(const nlohmann::json& s)
    {
        check_keys(s, "/skew", {"profile", "tau", "tau_peak", "osc_freq", "damping_freq", "line", "side"});
        SkewInjection inj;
        const std::string profile = s.contains("profile") ? string(s["profile"], "/skew/profile") : "flat";
        if (profile == "flat") {
            inj.profile.kind = SkewKind::Flat;
            for (const char* key : {"tau_peak", "osc_freq", "damping_freq"})
                if (s.contains(key))
                    fail(std::string("/skew/") + key, "only valid for the damped-oscillatory profile");
            if (s.contains("tau"))
                inj.profile.tau_flat = quantity(s["tau"], "/skew/tau", Dimension::Time);
        } else if (profile == "damped-oscillatory") {
            inj.profile.kind = SkewKind::DampedOscillatory;
            if (s.contains("tau"))
                fail("/skew/tau", "use tau_peak for the damped-oscillatory profile");
            if (!s.contains("osc_freq"))
                fail("/skew/osc_freq", "required for the damped-oscillatory profile");
            if (s.contains("tau_peak"))
                inj.profile.tau_peak = quantity(s["tau_peak"], "/skew/tau_peak", Dimension::Time);
            inj.profile.osc_freq = quantity(s["osc_freq"], "/skew/osc_freq", Dimension::Frequency);
            if (s.contains("damping_freq"))
                inj.profile.damping_freq = quantity(s["damping_freq"], "/skew/damping_freq", Dimension::Frequency);
        } else {
            fail("/skew/profile", "must be 'flat' or 'damped-oscillatory'");
        }
        try {
            inj.profile.validate();
        } catch (const Error& e) {
            std::string msg = e.detail();
            if (msg.rfind("skew.tau_flat", 0) == 0)
                msg.replace(0, 13, "skew.tau");
            std::replace(msg.begin(), msg.end(), '.', '/');
            throw Error(ErrorCode::InvalidArgument, "/" + msg);
        }
        if (s.contains("line")) {
            const std::string line = string(s["line"], "/skew/line");
            if (line == "p" || line == "P")
                inj.line = Line::P;
            else if (line == "n" || line == "N")
                inj.line = Line::N;
            else
                fail("/skew/line", "must be 'p' or 'n'");
        }
        if (s.contains("side")) {
            const std::string side = string(s["side"], "/skew/side");
            if (side == "left")
                inj.side = Side::Left;
            else if (side == "right")
                inj.side = Side::Right;
            else
                fail("/skew/side", "must be 'left' or 'right'");
        }
        return inj;
    }

    const nlohmann::json& root_;
};

} // namespace detail

inline SynthJob parse_synth_job(std::string_view text)
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("spec is not valid JSON: ") + e.what());
    }
    return detail::SpecReader(root).read();
}

/// Generates the channel of a job, optionally overriding the skew amount
/// (tau for flat profiles, tau_peak for damped-oscillatory ones).
inline SingleEndedNetwork synthesize(const SynthJob& job, std::optional<double> tau_override = {})
{
    SingleEndedNetwork net = ideal_diff_channel(job.channel);
    SkewInjection inj = job.skew.value_or(SkewInjection{});
    if (tau_override) {
        if (inj.profile.kind == SkewKind::Flat)
            inj.profile.tau_flat = *tau_override;
        else
            inj.profile.tau_peak = *tau_override;
    }
    if (!job.skew && !tau_override)
        return net;
    return inject_se_delay(std::move(net), inj.line, inj.side, inj.profile);
}

} // namespace sild
