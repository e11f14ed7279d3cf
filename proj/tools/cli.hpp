#pragma once

#include <sild/sild.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sild::cli {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kGateFailed = 1, kUsage = 2 };

/// Flags shared by every subcommand.
struct GlobalFlags {
    std::string port_map;
    std::string profile = "224g-pam4";
    std::string output;
    std::string format;
    std::string fb, fr, ft, fmax, band_max;
    std::string normalization;
    std::optional<double> max_fom;
    std::optional<double> max_sild;

    FomConfig fom_config() const
    {
        FomConfig cfg = FomConfig::preset(profile);
        if (!fb.empty()) {
            // f_r and f_t follow the symbol rate unless given explicitly
            const double f_b = parse_quantity(fb, Dimension::Frequency);
            const double scale = f_b / cfg.f_b;
            cfg.f_r *= scale;
            cfg.f_t *= scale;
            cfg.f_max *= scale;
            cfg.f_b = f_b;
        }
        if (!fr.empty())
            cfg.f_r = parse_quantity(fr, Dimension::Frequency);
        if (!ft.empty())
            cfg.f_t = parse_quantity(ft, Dimension::Frequency);
        if (!fmax.empty())
            cfg.f_max = parse_quantity(fmax, Dimension::Frequency);
        if (normalization == "weighted-rms")
            cfg.normalization = FomNormalization::WeightedRms;
        else if (normalization == "mean-square")
            cfg.normalization = FomNormalization::MeanSquare;
        else if (!normalization.empty())
            throw Error(ErrorCode::InvalidArgument, "--normalization must be weighted-rms or mean-square");
        cfg.validate();
        return cfg;
    }

    std::optional<double> band_max_hz() const
    {
        if (band_max.empty())
            return std::nullopt;
        return parse_quantity(band_max, Dimension::Frequency);
    }

    TouchstoneOverrides overrides() const
    {
        TouchstoneOverrides o;
        if (!port_map.empty())
            o.port_map = PortMap::parse(port_map);
        return o;
    }
};

namespace detail {

/// Opens --output or falls back to `fallback`.
class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback)
    {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

inline SingleEndedNetwork load_network(const std::string& path, const GlobalFlags& g, std::istream& in)
{
    if (path == "-") {
        const std::string text(std::istreambuf_iterator<char>(in), {});
        return parse_touchstone(text, g.overrides(), "<stdin>");
    }
    return read_touchstone_file(path, g.overrides());
}

inline bool glob_match(std::string_view pattern, std::string_view name)
{
    std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*')
        ++p;
    return p == pattern.size();
}

inline bool is_s4p(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".s4p";
}

/// A directory (all *.s4p inside) or a glob whose wildcards are confined
/// to the final path component.
inline std::vector<fs::path> expand_inputs(const std::string& spec, bool recursive)
{
    std::vector<fs::path> out;
    const fs::path p(spec);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
        auto add = [&](const fs::directory_entry& e) {
            if (e.is_regular_file() && is_s4p(e.path()))
                out.push_back(e.path());
        };
        if (recursive)
            for (const auto& e : fs::recursive_directory_iterator(p))
                add(e);
        else
            for (const auto& e : fs::directory_iterator(p))
                add(e);
        return out;
    }
    const std::string name = p.filename().string();
    if (name.find_first_of("*?") == std::string::npos) {
        if (fs::is_regular_file(p, ec))
            out.push_back(p);
        return out;
    }
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    if (dir.string().find_first_of("*?") != std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "wildcards are only supported in the file name");
    if (!fs::is_directory(dir, ec))
        return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && glob_match(name, e.path().filename().string()))
            out.push_back(e.path());
    return out;
}

inline std::string sweep_file_name(const std::string& stem, const std::string& var, double display,
                                   const std::string& unit)
{
    return stem + "_" + var + "_" + format_shortest(display) + unit + ".s4p";
}

} // namespace detail

/// Runs the command line; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                   std::istream& in = std::cin)
{
    CLI::App app{"Skew-induced insertion loss deviation (SILD) analysis for differential channels", "sild"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);

    // Shared flags are registered on each subcommand that uses them so that
    // every subcommand's --help lists its full set of options.
    GlobalFlags g;
    auto add_port_map = [&](CLI::App* sub) {
        sub->add_option("--port-map", g.port_map,
                        "Single-ended port assignment: default/through (lp=1,rp=2,ln=3,rn=4), paired "
                        "(lp=1,ln=2,rp=3,rn=4) or lp=..,ln=..,rp=..,rn=..");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("-o,--output", g.output, "Output path (stdout when omitted or '-')");
    };
    auto add_fom = [&](CLI::App* sub) {
        sub->add_option("--profile", g.profile, "Named FOM preset (224g-pam4, 112g-pam4)")->capture_default_str();
        sub->add_option("--fb", g.fb, "Symbol rate, e.g. 106.25GHz (scales f_r, f_t, f_max)");
        sub->add_option("--fr", g.fr, "Receiver filter corner");
        sub->add_option("--ft", g.ft, "Transmitter filter corner");
        sub->add_option("--fmax", g.fmax, "Upper frequency of the FOM sum");
    };
    auto add_metrics = [&](CLI::App* sub) {
        sub->add_option("--band-max", g.band_max, "Upper frequency for max |SILD| (defaults to f_max)");
        sub->add_option("--normalization", g.normalization, "FOM normalization")
            ->check(CLI::IsMember({"weighted-rms", "mean-square"}));
        sub->add_option("--max-fom", g.max_fom, "Gate: exit 1 if max(FOM_1, FOM_2) exceeds this value");
        sub->add_option("--max-sild", g.max_sild, "Gate: exit 1 if max |SILD| (dB) exceeds this value");
    };

    // analyze
    std::string analyze_file;
    auto* analyze = app.add_subcommand("analyze", "Per-frequency SILD report for one 4-port file");
    analyze->add_option("file", analyze_file, "Touchstone .s4p file, or '-' for stdin")->required();
    add_port_map(analyze);
    add_output(analyze);
    analyze->add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    add_fom(analyze);
    add_metrics(analyze);

    // batch
    std::string batch_input;
    std::string records_path;
    std::string summary_path;
    std::string policy = "continue";
    unsigned threads = 0;
    bool recursive = false;
    auto* batch = app.add_subcommand("batch", "FOM statistics over many .s4p files");
    batch->add_option("inputs", batch_input, "Directory of .s4p files or a file-name glob")->required();
    batch->add_option("--records", records_path, "Per-channel CSV (defaults to --output or stdout)");
    batch->add_option("--summary", summary_path, "Summary JSON path");
    batch->add_option("--policy", policy, "Error policy")
        ->check(CLI::IsMember({"continue", "fail-fast"}))
        ->capture_default_str();
    batch->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    batch->add_flag("--recursive", recursive, "Descend into subdirectories");
    add_port_map(batch);
    add_output(batch);
    add_fom(batch);
    add_metrics(batch);

    // synth
    std::string synth_spec;
    std::string sweep;
    std::string out_dir = ".";
    std::string data_format = "RI";
    int ts_version = 1;
    auto* synth = app.add_subcommand("synth", "Generate synthetic skewed 4-port channels from a JSON spec");
    synth->add_option("spec", synth_spec, "Channel spec (JSON)")->required();
    synth->add_option("--sweep", sweep, "Skew sweep, e.g. tau=0:0.5:3ps (one file per value)");
    synth->add_option("--out-dir", out_dir, "Directory for generated files")->capture_default_str();
    synth->add_option("--data-format", data_format, "Touchstone number format")
        ->check(CLI::IsMember({"RI", "MA", "DB"}))
        ->capture_default_str();
    synth->add_option("--touchstone-version", ts_version, "Touchstone version to write")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    add_port_map(synth);
    add_output(synth);

    // pulse
    std::string pulse_file;
    std::string mode = "dd21";
    std::string pulse_width, rise_time, time_window;
    std::string dc = "constant";
    bool no_taper = false;
    int oversample = 8;
    auto* pulse = app.add_subcommand("pulse", "Pulse response of a mixed-mode transfer function");
    pulse->add_option("file", pulse_file, "Touchstone .s4p file, or '-' for stdin")->required();
    pulse->add_option("--mode", mode, "Transfer function")
        ->check(CLI::IsMember({"dd21", "dd12", "sd21", "sd12"}))
        ->capture_default_str();
    pulse->add_option("--pulse-width", pulse_width, "Pulse width (defaults to 1/f_b)");
    pulse->add_option("--rise-time", rise_time, "0-100% edge time (defaults to 0.1/f_b)");
    pulse->add_option("--time-window", time_window, "Length of the returned waveform (defaults to 1/df)");
    pulse->add_option("--dc", dc, "Extrapolation towards DC")
        ->check(CLI::IsMember({"constant", "linear"}))
        ->capture_default_str();
    pulse->add_flag("--no-taper", no_taper, "Disable the raised-cosine band-edge taper");
    pulse->add_option("--oversample", oversample, "Zero-padding factor")->check(CLI::Range(1, 64))->capture_default_str();
    add_port_map(pulse);
    add_output(pulse);
    add_fom(pulse);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        // Conflicts are rejected before any work starts.
        if (batch->parsed() && !records_path.empty() && !g.output.empty())
            throw Error(ErrorCode::InvalidArgument, "give either --records or --output, not both");
        if (synth->parsed() && !g.output.empty() && !sweep.empty())
            throw Error(ErrorCode::InvalidArgument, "--output names a single file; use --out-dir with --sweep");
        const FomConfig cfg = g.fom_config();
        const auto band_max = g.band_max_hz();

        if (analyze->parsed()) {
            const SingleEndedNetwork net = detail::load_network(analyze_file, g, in);
            const ChannelAnalysis a = analyze_channel(net, cfg, band_max, analyze_file);
            detail::OutputTarget target(g.output, out);
            if (g.format == "json")
                target.stream() << analysis_to_json(a).dump(2) << "\n";
            else
                write_analysis_csv(target.stream(), a);
            for (const auto& w : a.warnings)
                err << "warning: " << w << "\n";
            int rc = kOk;
            const double fom = std::max(a.fom.fom_1, a.fom.fom_2);
            if (g.max_fom && fom > *g.max_fom) {
                err << "gate failed: FOM " << format_shortest(fom) << " > " << format_shortest(*g.max_fom) << "\n";
                rc = kGateFailed;
            }
            if (g.max_sild && a.max_sild.value_db > *g.max_sild) {
                err << "gate failed: max |SILD| " << format_shortest(a.max_sild.value_db) << " dB > "
                    << format_shortest(*g.max_sild) << " dB\n";
                rc = kGateFailed;
            }
            return rc;
        }

        if (batch->parsed()) {
            std::vector<fs::path> inputs = detail::expand_inputs(batch_input, recursive);
            if (inputs.empty()) {
                err << "error: no inputs matched '" << batch_input << "'\n";
                return kUsage;
            }
            BatchOptions opt;
            opt.fom = cfg;
            opt.band_max = band_max;
            opt.overrides = g.overrides();
            opt.policy = parse_error_policy(policy);
            opt.threads = threads;
            detail::OutputTarget records(records_path.empty() ? g.output : records_path, out);
            records.stream() << kRecordsHeader << "\n";
            std::size_t gate_failures = 0;
            const BatchSummary s = analyze_batch_streaming(inputs, opt, [&](const ChannelRecord& r) {
                write_record_csv(records.stream(), r);
                if ((g.max_fom && std::max(r.fom_1, r.fom_2) > *g.max_fom) ||
                    (g.max_sild && r.max_abs_sild > *g.max_sild))
                    ++gate_failures;
            });
            records.stream().flush();
            if (!summary_path.empty()) {
                detail::OutputTarget summary(summary_path, out);
                summary.stream() << summary_to_json(s).dump(2) << "\n";
            }
            for (const auto& f : s.failures)
                err << "failed: " << f.source_id << ": " << f.error << "\n";
            err << "analyzed " << s.successes << " of " << s.count << " inputs";
            for (const auto& [threshold, fraction] : s.fraction_delta_exceeding)
                if (threshold == 0.025)
                    err << "; delta > 0.025 dB: " << format_shortest(100.0 * fraction) << "%";
            err << "\n";
            if (opt.policy == ErrorPolicy::FailFast && !s.failures.empty())
                return kUsage;
            if (gate_failures) {
                err << "gate failed on " << gate_failures << " channel(s)\n";
                return kGateFailed;
            }
            return kOk;
        }

        if (synth->parsed()) {
            SynthJob job = parse_synth_job(read_text_file(synth_spec));
            if (!g.port_map.empty())
                job.channel.port_map = PortMap::parse(g.port_map);
            TouchstoneOptions ts;
            ts.data_format = data_format == "MA" ? DataFormat::MA : data_format == "DB" ? DataFormat::DB : DataFormat::RI;
            ts.version = ts_version == 2 ? TouchstoneVersion::V2 : TouchstoneVersion::V1;
            if (!sweep.empty()) {
                const Sweep sw = parse_sweep(sweep, Dimension::Time);
                if (sw.name != "tau")
                    throw Error(ErrorCode::InvalidArgument, "only 'tau' can be swept");
                fs::create_directories(out_dir);
                for (std::size_t i = 0; i < sw.values.size(); ++i) {
                    const fs::path path = fs::path(out_dir) /
                                          detail::sweep_file_name(job.name, sw.name, sw.display[i], sw.unit.empty() ? "s" : sw.unit);
                    write_touchstone_file(path, synthesize(job, sw.values[i]), ts);
                    out << path.generic_string() << "\n";
                }
                return kOk;
            }
            const SingleEndedNetwork net = synthesize(job);
            if (g.output == "-") {
                out << write_touchstone(net, ts);
                return kOk;
            }
            fs::path path = g.output.empty() ? fs::path(out_dir) / (job.name + ".s4p") : fs::path(g.output);
            if (path.has_parent_path())
                fs::create_directories(path.parent_path());
            write_touchstone_file(path, net, ts);
            out << path.generic_string() << "\n";
            return kOk;
        }

        if (pulse->parsed()) {
            const SingleEndedNetwork net = detail::load_network(pulse_file, g, in);
            const MixedModeSet mm = to_mixed_mode(net);
            PulseConfig pc = PulseConfig::for_symbol_rate(cfg.f_b);
            if (!pulse_width.empty())
                pc.pulse_width = parse_quantity(pulse_width, Dimension::Time);
            if (!rise_time.empty())
                pc.rise_time = parse_quantity(rise_time, Dimension::Time);
            if (!time_window.empty())
                pc.time_window = parse_quantity(time_window, Dimension::Time);
            pc.dc_extrapolation = dc == "linear" ? DcExtrapolation::Linear : DcExtrapolation::Constant;
            pc.spectral_window = no_taper ? SpectralWindow::None : SpectralWindow::RaisedCosineEdge;
            pc.oversample = oversample;
            const std::vector<Complex>& h = mode == "dd21"   ? mm.sdd21
                                            : mode == "dd12" ? mm.sdd12
                                            : mode == "sd21" ? mm.ssd21
                                                             : mm.ssd12;
            const PulseResponse r = pulse_response(h, mm.grid, pc);
            detail::OutputTarget target(g.output, out);
            write_pulse_csv(target.stream(), r);
            for (const auto& w : r.warnings)
                err << "warning: " << w << "\n";
            return kOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

} // namespace sild::cli
