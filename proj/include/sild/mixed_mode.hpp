#pragma once

#include <sild/network.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace sild {

enum class Direction { LeftToRight, RightToLeft };

/// Differential-drive quantities of a 4-port, one entry per grid sample.
///
/// Naming is S_sd{se}{mm}: single-ended receive port, mixed-mode drive port,
/// with ports numbered as in the default port map. The N-side terms are
/// sign-flipped so that an ideal pair gives ssd21 == ssd41.
///
///   ssd21 = (S21 - S23)/sqrt2   left diff drive -> right P
///   ssd41 = (S43 - S41)/sqrt2   left diff drive -> right N
///   ssd12 = (S12 - S14)/sqrt2   right diff drive -> left P
///   ssd32 = (S34 - S32)/sqrt2   right diff drive -> left N
///   sdd21 = (ssd21 + ssd41)/sqrt2,  sdd12 = (ssd12 + ssd32)/sqrt2
struct MixedModeSet {
    FrequencyGrid grid;
    std::vector<Complex> ssd21;
    std::vector<Complex> ssd41;
    std::vector<Complex> ssd12;
    std::vector<Complex> ssd32;
    std::vector<Complex> sdd21;
    std::vector<Complex> sdd12;
};

/// The eight single-ended through entries, resolved through a port map.
struct ThroughEntries {
    Complex s21, s23, s43, s41;
    Complex s12, s14, s34, s32;
};

inline ThroughEntries through_entries(const SingleEndedNetwork& net, std::size_t k)
{
    const PortMap& pm = net.port_map;
    return {
        net.s(k, pm.right_p, pm.left_p), net.s(k, pm.right_p, pm.left_n),
        net.s(k, pm.right_n, pm.left_n), net.s(k, pm.right_n, pm.left_p),
        net.s(k, pm.left_p, pm.right_p), net.s(k, pm.left_p, pm.right_n),
        net.s(k, pm.left_n, pm.right_n), net.s(k, pm.left_n, pm.right_p),
    };
}

inline MixedModeSet to_mixed_mode(const SingleEndedNetwork& net)
{
    net.port_map.validate();
    if (net.matrices.size() != net.grid.size())
        throw Error(ErrorCode::GridMismatch, "to_mixed_mode: matrix count differs from grid length");

    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::size_t n = net.grid.size();
    MixedModeSet mm;
    mm.grid = net.grid;
    mm.ssd21.resize(n);
    mm.ssd41.resize(n);
    mm.ssd12.resize(n);
    mm.ssd32.resize(n);
    mm.sdd21.resize(n);
    mm.sdd12.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ThroughEntries s = through_entries(net, k);
        mm.ssd21[k] = (s.s21 - s.s23) * inv_sqrt2;
        mm.ssd41[k] = (s.s43 - s.s41) * inv_sqrt2;
        mm.ssd12[k] = (s.s12 - s.s14) * inv_sqrt2;
        mm.ssd32[k] = (s.s34 - s.s32) * inv_sqrt2;
        // (ssd21 + ssd41)/sqrt2 regrouped so that S = S^T gives
        // bit-identical sdd21 and sdd12
        mm.sdd21[k] = ((s.s21 + s.s43) - (s.s23 + s.s41)) * 0.5;
        mm.sdd12[k] = ((s.s12 + s.s34) - (s.s14 + s.s32)) * 0.5;
    }
    return mm;
}

inline std::span<const Complex> diff_insertion_loss(const MixedModeSet& mm, Direction direction)
{
    return direction == Direction::LeftToRight ? std::span<const Complex>(mm.sdd21)
                                               : std::span<const Complex>(mm.sdd12);
}

inline std::vector<double> magnitude_db(std::span<const Complex> values)
{
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = to_db(std::abs(values[i]));
    return out;
}

} // namespace sild
