#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace sild;

namespace {

/// Independent term-by-term evaluation in long double.
double weight_reference(double f, double fb, double fr, double ft)
{
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double x = static_cast<long double>(f) / fb;
    const long double sinc = x == 0.0L ? 1.0L : std::sin(pi * x) / (pi * x);
    const long double r = static_cast<long double>(f) / fr;
    const long double t = static_cast<long double>(f) / ft;
    return static_cast<double>(sinc * sinc / (1.0L + std::pow(r, 8.0L)) / (1.0L + std::pow(t, 4.0L)));
}

SildResult sild_of(const SingleEndedNetwork& net) { return compute_sild(net); }

} // namespace

TEST(Weight, EndpointsExact)
{
    const FomConfig cfg = FomConfig::preset("224g-pam4");
    EXPECT_EQ(weight(0.0, cfg), 1.0);
    EXPECT_EQ(weight(cfg.f_b, cfg), 0.0);
    EXPECT_EQ(weight(2.0 * cfg.f_b, cfg), 0.0);
}

TEST(Weight, FrozenValueAtReceiverCorner)
{
    const FomConfig cfg = FomConfig::preset("224g-pam4");
    EXPECT_DOUBLE_EQ(cfg.f_r, 79.6875e9);
    EXPECT_NEAR(weight(cfg.f_r, cfg), oracle::kWeightAtFr224, 1e-15);
}

TEST(Weight, MatchesTermByTerm)
{
    for (const char* name : {"224g-pam4", "112g-pam4"}) {
        const FomConfig cfg = FomConfig::preset(name);
        for (int i = 0; i <= 400; ++i) {
            const double f = cfg.f_b * 1.5 * i / 400.0;
            ASSERT_NEAR(weight(f, cfg), weight_reference(f, cfg.f_b, cfg.f_r, cfg.f_t), 1e-12) << f;
        }
    }
}

TEST(Weight, PresetsAndValidation)
{
    EXPECT_THROW(FomConfig::preset("nope"), Error);
    FomConfig bad;
    bad.f_r = 0.0;
    EXPECT_THROW(bad.validate(), Error);
    EXPECT_EQ(FomConfig::preset("112g-pam4").f_b, 53.125e9);
}

TEST(Sild, ZeroSkewIsZero)
{
    const auto net = ideal_diff_channel(support::twinax_like(support::full_grid()));
    const SildResult r = sild_of(net);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        ASSERT_EQ(r.sild_1[i], 0.0);
        ASSERT_EQ(r.sild_2[i], 0.0);
        ASSERT_EQ(r.deskewed_mag_21[i], r.original_mag_21[i]);
    }
}

TEST(Sild, FrozenClosedFormAt53GHz)
{
    // Grid hitting 53.125 GHz exactly.
    const auto g = FrequencyGrid::stepped(53.125e9 / 1000.0, 53.125e9 / 1000.0, 2000);
    const auto net = support::with_flat_skew(support::uncoupled(g), 3e-12);
    const SildResult r = sild_of(net);
    std::size_t k = 999;
    ASSERT_DOUBLE_EQ(r.grid[k], 53.125e9);
    EXPECT_NEAR(r.sild_1[k], oracle::kSildTau3psAt53GHz, 1e-12);
    EXPECT_NEAR(r.sild_2[k], oracle::kSildTau3psAt53GHz, 1e-12);
}

TEST(Sild, ClosedFormAcrossBand)
{
    const double tau = 2e-12;
    const auto net = support::with_flat_skew(support::uncoupled(support::full_grid(), 300e-12), tau);
    const SildResult r = sild_of(net);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const double expect = 20.0 * std::log10(std::abs(std::cos(std::numbers::pi * r.grid[i] * tau)));
        ASSERT_NEAR(r.sild_1[i], expect, 1e-9);
        ASSERT_NEAR(r.sild_2[i], expect, 1e-9);
    }
}

TEST(Sild, DeskewedMagnitudeOfPureDelayIsUnskewed)
{
    const auto grid = support::full_grid();
    const auto base = ideal_diff_channel(support::twinax_like(grid));
    ChannelSpec uspec = support::twinax_like(grid);
    uspec.coupling = 0.0;
    const auto ubase = ideal_diff_channel(uspec);
    const auto skewed = support::with_flat_skew(ubase, 3e-12);
    const SildResult r = sild_of(skewed);
    const auto reference = magnitude_db(to_mixed_mode(ubase).sdd21);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        ASSERT_NEAR(r.deskewed_mag_21[i], reference[i], 1e-9);
        ASSERT_NEAR(r.deskewed_mag_12[i], reference[i], 1e-9);
    }
    (void)base;
}

TEST(Sild, ReciprocalWhenCouplingIsBalancedThroughs)
{
    const auto net = ideal_diff_channel(support::asymmetric_coupling(support::full_grid()));
    const SildResult r = sild_of(net);
    EXPECT_LT(support::max_abs_diff(r.sild_1, r.sild_2), 1e-9);
    EXPECT_LT(support::max_abs_diff(r.deskewed_mag_21, r.deskewed_mag_12), 1e-9);
    EXPECT_GT(support::max_abs_diff(r.t_skew_1, r.t_skew_2), 0.1e-12);
}

TEST(Sild, CoupledSkewedChannelDirectionalDeltaIsSmall)
{
    // Characterises how far the two de-skewed directions drift apart when a
    // single-ended delay sits on a coupled channel (see README, "Limits").
    const auto net = support::with_flat_skew(ideal_diff_channel(support::twinax_like(support::full_grid())), 3e-12);
    const SildResult r = sild_of(net);
    const double delta = support::max_abs_diff(r.sild_1, r.sild_2);
    EXPECT_GT(delta, 0.0);
    EXPECT_LT(delta, 0.1);
    const FomResult fom = fom_sild(r, FomConfig::preset("224g-pam4"));
    EXPECT_LT(std::abs(fom.fom_1 - fom.fom_2), 0.025);
}

TEST(Sild, DeskewRejectsMismatchedProfiles)
{
    const auto net = support::with_flat_skew(support::uncoupled(support::coarse_grid(50)), 1e-12);
    const MixedModeSet mm = to_mixed_mode(net);
    const SkewProfile s1 = pn_skew(mm, SkewPort::AtPort1);
    const SkewProfile s2 = pn_skew(mm, SkewPort::AtPort2);
    EXPECT_THROW(deskewed_magnitude(net, s2, s1), Error);
    const auto other = support::with_flat_skew(support::uncoupled(support::coarse_grid(60)), 1e-12);
    const SkewProfile s3 = pn_skew(to_mixed_mode(other), SkewPort::AtPort2);
    try {
        deskewed_magnitude(net, s1, s3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(Fom, ZeroSildIsZeroUnderBothNormalizations)
{
    const auto net = ideal_diff_channel(support::twinax_like(support::full_grid()));
    const SildResult r = sild_of(net);
    for (auto n : {FomNormalization::WeightedRms, FomNormalization::MeanSquare}) {
        FomConfig cfg = FomConfig::preset("224g-pam4");
        cfg.normalization = n;
        const FomResult f = fom_sild(r, cfg);
        EXPECT_EQ(f.fom_1, 0.0);
        EXPECT_EQ(f.fom_2, 0.0);
    }
}

TEST(Fom, StrictlyIncreasingWithFlatSkew)
{
    const auto base = ideal_diff_channel(support::twinax_like(support::full_grid()));
    for (auto n : {FomNormalization::WeightedRms, FomNormalization::MeanSquare}) {
        FomConfig cfg = FomConfig::preset("224g-pam4");
        cfg.normalization = n;
        double previous = -1.0;
        for (int i = 0; i <= 6; ++i) {
            const FomResult f = fom_sild(sild_of(support::with_flat_skew(base, 0.5e-12 * i)), cfg);
            EXPECT_GT(f.fom_1, previous) << i;
            previous = f.fom_1;
        }
    }
}

TEST(Fom, ConstantSildGivesThatValue)
{
    // hand-built result: SILD = -0.3 dB everywhere
    SildResult r;
    r.grid = support::full_grid();
    r.sild_1.assign(r.grid.size(), -0.3);
    r.sild_2.assign(r.grid.size(), -0.3);
    FomConfig cfg = FomConfig::preset("224g-pam4");
    const FomResult f = fom_sild(r, cfg);
    EXPECT_NEAR(f.fom_1, 0.3, 1e-12);
    EXPECT_EQ(f.samples, 10625u);
    EXPECT_NEAR(f.cutoff_hz, 106.25e9, 1.0);
    cfg.normalization = FomNormalization::MeanSquare;
    double sw = 0.0;
    for (std::size_t i = 0; i < 10625; ++i)
        sw += weight(r.grid[i], cfg);
    EXPECT_NEAR(fom_sild(r, cfg).fom_1, 0.09 * sw / 10625.0, 1e-12);
}

TEST(Fom, NonUniformGridIsResampled)
{
    SildResult r;
    std::vector<double> f;
    for (double x = 1e9; x <= 110e9; x += (f.size() % 2 ? 1e9 : 0.5e9))
        f.push_back(x);
    r.grid = FrequencyGrid(f);
    r.sild_1.assign(f.size(), -0.2);
    r.sild_2.assign(f.size(), -0.2);
    const FomResult out = fom_sild(r, FomConfig::preset("224g-pam4"));
    EXPECT_TRUE(out.resampled);
    EXPECT_FALSE(out.warnings.empty());
    EXPECT_NEAR(out.fom_1, 0.2, 1e-12);
}

TEST(Fom, InsufficientBandwidth)
{
    SildResult r;
    r.grid = FrequencyGrid::stepped(1e9, 1e9, 50);
    r.sild_1.assign(50, -0.1);
    r.sild_2.assign(50, -0.1);
    const FomResult out = fom_sild(r, FomConfig::preset("224g-pam4"));
    EXPECT_TRUE(out.insufficient_bandwidth);
    EXPECT_FALSE(out.warnings.empty());

    SildResult tiny;
    tiny.grid = FrequencyGrid({200e9, 300e9});
    tiny.sild_1 = tiny.sild_2 = {0.0, 0.0};
    try {
        fom_sild(tiny, FomConfig::preset("224g-pam4"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientBandwidth);
    }
}

TEST(MaxAbsSild, ZeroSkew)
{
    const auto net = ideal_diff_channel(support::twinax_like(support::full_grid()));
    EXPECT_EQ(max_abs_sild(sild_of(net), 53.125e9).value_db, 0.0);
}

TEST(MaxAbsSild, BandEdgeOfClosedForm)
{
    const auto g = FrequencyGrid::stepped(53.125e9 / 1000.0, 53.125e9 / 1000.0, 2000);
    const auto net = support::with_flat_skew(support::uncoupled(g), 3e-12);
    const MaxAbsSild m = max_abs_sild(sild_of(net), 53.125e9);
    EXPECT_DOUBLE_EQ(m.frequency_hz, 53.125e9);
    EXPECT_NEAR(m.value_db, -oracle::kSildTau3psAt53GHz, 1e-12);
}

TEST(MaxAbsSild, DirectionTagFollowsLargerValue)
{
    SildResult r;
    r.grid = FrequencyGrid::stepped(1e9, 1e9, 4);
    r.sild_1 = {-0.1, -0.2, -0.3, -0.1};
    r.sild_2 = {-0.1, -0.2, -0.31, -0.1};
    MaxAbsSild m = max_abs_sild(r, 10e9);
    EXPECT_EQ(m.direction, 2);
    EXPECT_DOUBLE_EQ(m.value_db, 0.31);
    EXPECT_DOUBLE_EQ(m.frequency_hz, 3e9);
    std::swap(r.sild_1, r.sild_2);
    EXPECT_EQ(max_abs_sild(r, 10e9).direction, 1);
    try {
        max_abs_sild(r, 0.5e9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyBand);
    }
}

TEST(Analysis, CombinesEverything)
{
    const auto net = support::with_flat_skew(support::uncoupled(support::full_grid()), 3e-12);
    const ChannelAnalysis a = analyze_channel(net, FomConfig::preset("224g-pam4"), std::nullopt, "x");
    EXPECT_EQ(a.band_max_hz, 106.25e9);
    EXPECT_LT(a.fom_delta(), 1e-12);
    EXPECT_EQ(a.weights.size(), a.sild.grid.size());
    EXPECT_GT(a.fom.fom_1, 0.0);
}
