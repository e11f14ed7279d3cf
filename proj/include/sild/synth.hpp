#pragma once

#include <sild/network.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace sild {

/// Per-line attenuation in dB: dc + skin * sqrt(f) + dielectric * f.
struct LossModel {
    double dc_loss_db = 0.0;
    double skin_coeff_db_per_sqrt_hz = 0.0;
    double dielectric_coeff_db_per_hz = 0.0;

    double loss_db(double f) const
    {
        return dc_loss_db + skin_coeff_db_per_sqrt_hz * std::sqrt(f) + dielectric_coeff_db_per_hz * f;
    }
    double amplitude(double f) const { return from_db(-loss_db(f)); }
};

/// Parametric stand-in for a measured twinax/PCB differential channel.
///
/// `coupling` is a far-end coupling coefficient k: the lossless coupling
/// block mixing the two lines is [[c, jk], [jk, c]] with c = sqrt(1 - k^2),
/// which keeps the channel reciprocal and passive and leaves |Sdd21| equal
/// to the line attenuation. `coupling_imbalance` x makes the far-end terms
/// unequal (S23 ~ k(1+x), S41 ~ k(1-x)), the block then being rescaled to
/// stay passive. With `coupling_corner` fc > 0 the coefficient rolls off
/// towards DC as k (f/fc) / sqrt(1 + (f/fc)^2), like real far-end
/// crosstalk; 0 keeps it flat. Reflections and near-end terms are zero.
struct ChannelSpec {
    FrequencyGrid grid;
    double base_delay = 0.0;  // seconds, per line
    LossModel loss;
    double coupling = 0.0;
    double coupling_imbalance = 0.0;
    double coupling_corner = 0.0;  // Hz
    double reference_impedance = 50.0;
    PortMap port_map;

    void validate() const
    {
        if (grid.empty())
            throw Error(ErrorCode::InvalidArgument, "grid: must not be empty");
        if (!(base_delay >= 0.0) || !std::isfinite(base_delay))
            throw Error(ErrorCode::InvalidArgument, "base_delay: must be >= 0");
        if (!(coupling >= 0.0 && coupling < 1.0))
            throw Error(ErrorCode::InvalidArgument, "coupling: must satisfy 0 <= coupling < 1");
        if (!(coupling_imbalance >= 0.0 && coupling_imbalance < 1.0))
            throw Error(ErrorCode::InvalidArgument, "coupling_imbalance: must satisfy 0 <= value < 1");
        if (!(coupling_corner >= 0.0) || !std::isfinite(coupling_corner))
            throw Error(ErrorCode::InvalidArgument, "coupling_corner: must be >= 0");
        if (!(reference_impedance > 0.0))
            throw Error(ErrorCode::InvalidArgument, "reference_impedance: must be positive");
        port_map.validate();
    }
};

inline SingleEndedNetwork ideal_diff_channel(const ChannelSpec& spec)
{
    spec.validate();
    const Complex j(0.0, 1.0);
    auto coupling_block = [&](double f) {
        double k = spec.coupling;
        if (spec.coupling_corner > 0.0) {
            const double x = f / spec.coupling_corner;
            k *= x / std::sqrt(1.0 + x * x);
        }
        const double c = std::sqrt(1.0 - k * k);
        Eigen::Matrix2cd block;
        block << c, j * k * (1.0 + spec.coupling_imbalance), j * k * (1.0 - spec.coupling_imbalance), c;
        const double sigma = Eigen::JacobiSVD<Eigen::Matrix2cd>(block).singularValues()(0);
        if (sigma > 1.0)
            block /= sigma;
        return block;
    };

    const PortMap& pm = spec.port_map;
    SingleEndedNetwork net;
    net.grid = spec.grid;
    net.port_map = pm;
    net.reference_impedance = spec.reference_impedance;
    net.matrices.assign(spec.grid.size(), SingleEndedNetwork::Matrix::Zero());
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double f = spec.grid[i];
        const double a = spec.loss.amplitude(f);
        if (a > 1.0)
            throw Error(ErrorCode::PassivityViolation,
                        "loss: attenuation is negative at " + std::to_string(f) + " Hz");
        const Complex t = std::polar(a, -kTwoPi * f * spec.base_delay);
        const Eigen::Matrix2cd block = coupling_block(f);
        auto set = [&](int to, int from, Complex v) {
            net.s(i, to, from) = v;
            net.s(i, from, to) = v;
        };
        set(pm.right_p, pm.left_p, t * block(0, 0));
        set(pm.right_p, pm.left_n, t * block(0, 1));
        set(pm.right_n, pm.left_p, t * block(1, 0));
        set(pm.right_n, pm.left_n, t * block(1, 1));
    }
    return net;
}

enum class SkewKind { Flat, DampedOscillatory };

/// Frequency-dependent single-ended delay used to inject skew.
///
/// DampedOscillatory is a parametric stand-in, not a published profile:
///   tau(f) = tau_peak * exp(-f / damping_freq) * |sin(2 pi f / osc_freq)|
/// with damping_freq == 0 meaning no damping.
struct SkewProfileSpec {
    SkewKind kind = SkewKind::Flat;
    double tau_flat = 0.0;
    double tau_peak = 0.0;
    double osc_freq = 0.0;
    double damping_freq = 0.0;

    void validate() const
    {
        for (const auto& [name, v] : {std::pair{"tau_flat", tau_flat}, {"tau_peak", tau_peak},
                                      {"osc_freq", osc_freq}, {"damping_freq", damping_freq}})
            if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::InvalidArgument, std::string("skew.") + name + ": must be >= 0");
        if (kind == SkewKind::DampedOscillatory && !(osc_freq > 0.0))
            throw Error(ErrorCode::InvalidArgument, "skew.osc_freq: must be > 0 for a damped oscillatory profile");
    }
};

inline std::vector<double> skew_profile(const SkewProfileSpec& spec, const FrequencyGrid& grid)
{
    spec.validate();
    std::vector<double> tau(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = grid[i];
        if (spec.kind == SkewKind::Flat) {
            tau[i] = spec.tau_flat;
        } else {
            const double envelope = spec.damping_freq > 0.0 ? std::exp(-f / spec.damping_freq) : 1.0;
            tau[i] = spec.tau_peak * envelope * std::abs(std::sin(kTwoPi * f / spec.osc_freq));
        }
    }
    return tau;
}

/// Cascades a matched, reflectionless element with transmission t(f) in
/// front of one single-ended port: entries with exactly one index on that
/// port pick up t, its own reflection entry t^2. Symmetry of S is kept.
inline SingleEndedNetwork apply_port_transmission(SingleEndedNetwork net, int port, std::span<const Complex> t)
{
    if (t.size() != net.grid.size())
        throw Error(ErrorCode::GridMismatch, "transmission length differs from grid length");
    const int p = port - 1;
    for (std::size_t k = 0; k < net.matrices.size(); ++k) {
        if (t[k] == Complex(1.0, 0.0))
            continue;
        auto& m = net.matrices[k];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                const int hits = (r == p) + (c == p);
                if (hits == 1)
                    m(r, c) *= t[k];
                else if (hits == 2)
                    m(r, c) *= t[k] * t[k];
            }
    }
    return net;
}

inline SingleEndedNetwork inject_se_delay(SingleEndedNetwork net, Line line, Side side, std::span<const double> tau)
{
    if (tau.size() != net.grid.size())
        throw Error(ErrorCode::GridMismatch, "delay profile length differs from grid length");
    std::vector<Complex> t(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k)
        t[k] = tau[k] == 0.0 ? Complex(1.0, 0.0) : std::polar(1.0, -kTwoPi * net.grid[k] * tau[k]);
    const int port = net.port_map.port(line, side);
    return apply_port_transmission(std::move(net), port, t);
}

inline SingleEndedNetwork inject_se_delay(SingleEndedNetwork net, Line line, Side side, const SkewProfileSpec& profile)
{
    const std::vector<double> tau = skew_profile(profile, net.grid);
    return inject_se_delay(std::move(net), line, side, tau);
}

/// Ideal matched 2-port delay element, S21 = S12 = exp(-i 2 pi f tau(f)).
inline TwoPortNetwork delay_element(const FrequencyGrid& grid, std::span<const double> tau)
{
    if (tau.size() != grid.size())
        throw Error(ErrorCode::GridMismatch, "delay profile length differs from grid length");
    TwoPortNetwork el;
    el.grid = grid;
    el.matrices.assign(grid.size(), TwoPortNetwork::Matrix::Zero());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Complex t = std::polar(1.0, -kTwoPi * grid[k] * tau[k]);
        el.matrices[k](1, 0) = t;
        el.matrices[k](0, 1) = t;
    }
    return el;
}

/// Same as inject_se_delay but with a measured or generated 2-port element,
/// which must be matched and reciprocal.
inline SingleEndedNetwork inject_matched_element(SingleEndedNetwork net, Line line, Side side,
                                                 const TwoPortNetwork& element)
{
    if (element.grid != net.grid)
        throw Error(ErrorCode::GridMismatch, "element grid differs from channel grid");
    std::vector<Complex> t(element.size());
    for (std::size_t k = 0; k < element.size(); ++k) {
        const auto& m = element.matrices[k];
        if (std::abs(m(0, 0)) > 1e-9 || std::abs(m(1, 1)) > 1e-9)
            throw Error(ErrorCode::UnsupportedFeature, "delay element is not matched (S11/S22 non-zero)");
        if (std::abs(m(1, 0) - m(0, 1)) > 1e-12)
            throw Error(ErrorCode::UnsupportedFeature, "delay element is not reciprocal");
        t[k] = m(1, 0);
    }
    const int port = net.port_map.port(line, side);
    return apply_port_transmission(std::move(net), port, t);
}

} // namespace sild
