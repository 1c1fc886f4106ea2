#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ringkit/errors.hpp"
#include "ringkit/jsi_model.hpp"
#include "ringkit/units.hpp"

namespace
{

using ringkit::ErrorKind;
using ringkit::units::to_angular;

const double kOmega0 = to_angular(oracle::c / 1550.63e-9);
const double kD1 = to_angular(145e9);
const double kD2 = to_angular(0.71e6);
const double kD3 = to_angular(6.37e3);
const double kGamma = to_angular(132e6);
const double kTau = 1.0 / 145e9;

ErrorKind kind_of(const std::function<void()> &fn)
{
    try
    {
        fn();
    }
    catch (const ringkit::Error &e)
    {
        return e.kind();
    }
    ADD_FAILURE() << "no ringkit::Error thrown";
    return ErrorKind::Validation;
}

ringkit::PumpLine delta_pump(double center = kOmega0)
{
    return {center, 0.0, ringkit::PumpModel::Delta};
}

ringkit::NonlinearPhaseParams phase_params(double gamma_p = 0.0)
{
    return {kTau, gamma_p, gamma_p == 0.0 ? 0.0 : 1.0};
}

double relative(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

TEST(LorentzianDensity, PeakAndHalfWidth)
{
    EXPECT_DOUBLE_EQ(ringkit::lorentzian_density(kOmega0, kOmega0, kGamma), 4.0 / kGamma);
    // omega0 + gamma/2 rounds at ~1e-10 of gamma near 1.2e15 rad/s.
    EXPECT_NEAR(ringkit::lorentzian_density(kOmega0 + kGamma / 2, kOmega0, kGamma), 2.0 / kGamma, 1e-9 / kGamma);
    EXPECT_NEAR(ringkit::lorentzian_density(kOmega0 - kGamma / 2, kOmega0, kGamma), 2.0 / kGamma, 1e-9 / kGamma);
    EXPECT_DOUBLE_EQ(ringkit::lorentzian_density(0.5, 0.0, 1.0), 2.0);
}

TEST(LorentzianDensity, IntegratesToTwoPi)
{
    const double gamma = 2.0;
    const auto r = ringkit::quad::integrate_real_line(
        [&](double x) { return ringkit::lorentzian_density(x, 0.0, gamma); }, {-40.0, 0.0, 40.0}, gamma);
    EXPECT_NEAR(r.value, 2 * oracle::pi, 1e-6 * 2 * oracle::pi);
}

TEST(SincSq, Examples)
{
    EXPECT_EQ(ringkit::sinc_sq(0.0), 1.0);
    EXPECT_LT(ringkit::sinc_sq(oracle::pi), 1e-30);
    EXPECT_NEAR(ringkit::sinc_sq(oracle::pi / 2), 4.0 / (oracle::pi * oracle::pi), 1e-15);
    EXPECT_NEAR(ringkit::sinc_sq(oracle::pi / 2), 0.4053, 1e-4);
}

TEST(SincSq, EvenBoundedAndUniqueMaximum)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    std::uniform_real_distribution<double> small(-1e-3, 1e-3);
    for (int i = 0; i < 2000; ++i)
    {
        const double x = i % 2 == 0 ? dist(rng) : small(rng);
        if (x == 0.0)
        {
            continue;
        }
        const double s = ringkit::sinc_sq(x);
        EXPECT_EQ(s, ringkit::sinc_sq(-x));
        EXPECT_LT(s, 1.0) << x;
        EXPECT_GE(s, 0.0);
        const double direct = std::sin(x) / x;
        EXPECT_NEAR(s, direct * direct, 1e-14);
    }
}

TEST(PhaseMismatch, VanishingTerms)
{
    std::map<int, double> dint;
    for (int mu = -47; mu <= 47; ++mu)
    {
        dint[mu] = 0.0;
    }
    EXPECT_EQ(ringkit::phase_mismatch(13, dint, phase_params()), 0.0);
}

TEST(PhaseMismatch, PureCubicGivesSelfPhaseOnly)
{
    const double omega0 = std::ldexp(1.0, 50);
    const double d1 = std::ldexp(1.0, 30);
    const auto ladder = ringkit::make_polynomial_ladder(omega0, d1, {0.0, 6.0 * 1024.0}, -47, 47, kGamma);
    const auto dint = ringkit::integrated_dispersion(ladder, d1);
    const ringkit::NonlinearPhaseParams params{kTau, 0.25, 0.5};
    for (int mu = 1; mu <= 47; ++mu)
    {
        EXPECT_EQ(ringkit::phase_mismatch(mu, dint, params), 0.125) << mu;
    }
}

TEST(PhaseMismatch, DeviceD2AtMu47)
{
    std::map<int, double> dint;
    for (int mu = -47; mu <= 47; ++mu)
    {
        dint[mu] = 0.5 * kD2 * mu * mu;
    }
    const double phi = ringkit::phase_mismatch(47, dint, phase_params());
    EXPECT_NEAR(phi, 2 * oracle::pi * 0.71e6 * 47 * 47 * kTau, 1e-15);
    EXPECT_NEAR(phi, 0.0680, 5e-5);
}

TEST(PhaseMismatch, MissingModeIsIncomplete)
{
    const std::map<int, double> dint{{0, 0.0}, {3, 1.0}};
    EXPECT_EQ(kind_of([&] { ringkit::phase_mismatch(3, dint, phase_params()); }), ErrorKind::IncompleteLadder);
}

TEST(PairOverlap, MatchesClosedFormAcrossSweep)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> log_ratio(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> mismatch(-10.0, 10.0);
    double worst = 0.0;
    int cases = 0;
    for (int i = 0; i < 250; ++i)
    {
        const double g1 = kGamma;
        const double g2 = kGamma * std::exp(log_ratio(rng));
        const double gamma = std::max(g1, g2);
        const double delta = mismatch(rng) * gamma;
        const double value = ringkit::lorentzian_pair_integral(delta, g1, g2);
        worst = std::max(worst, relative(value, oracle::pair_integral(delta, g1, g2)));
        ++cases;
    }
    EXPECT_GE(cases, 200);
    EXPECT_LT(worst, 1e-6);
}

TEST(PairOverlap, LadderMatchesClosedForm)
{
    auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -10, 10, kGamma);
    ladder.entries[-4].gamma = 0.3 * kGamma;
    ladder.entries[4].gamma = 2.5 * kGamma;
    for (int mu = 1; mu <= 10; ++mu)
    {
        const double delta = ladder.at(mu).omega + ladder.at(-mu).omega - 2 * kOmega0;
        const double expected = oracle::pair_integral(delta, ladder.at(mu).gamma, ladder.at(-mu).gamma);
        EXPECT_LT(relative(ringkit::pair_overlap(mu, ladder, delta_pump()), expected), 1e-6) << mu;
    }
}

TEST(PairOverlap, HalfAtOneLinewidthMismatch)
{
    const double peak = ringkit::lorentzian_pair_integral(0.0, kGamma, kGamma);
    EXPECT_LT(relative(peak, 4 * oracle::pi / kGamma), 1e-6);
    EXPECT_NEAR(ringkit::lorentzian_pair_integral(kGamma, kGamma, kGamma) / peak, 0.5, 1e-6);
    EXPECT_NEAR(ringkit::lorentzian_pair_integral(-kGamma, kGamma, kGamma) / peak, 0.5, 1e-6);
}

TEST(PairOverlap, EvenAndUnimodalInMismatch)
{
    double previous = ringkit::lorentzian_pair_integral(0.0, kGamma, 0.4 * kGamma);
    for (int k = 1; k <= 60; ++k)
    {
        const double delta = 0.2 * k * kGamma;
        const double plus = ringkit::lorentzian_pair_integral(delta, kGamma, 0.4 * kGamma);
        const double minus = ringkit::lorentzian_pair_integral(-delta, kGamma, 0.4 * kGamma);
        EXPECT_LT(relative(plus, minus), 1e-9);
        EXPECT_LT(plus, previous) << k;
        previous = plus;
    }
}

TEST(PairOverlap, VanishesAsLinewidthShrinks)
{
    const double delta = kGamma;
    double previous = ringkit::lorentzian_pair_integral(delta, kGamma, kGamma);
    for (double scale : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5})
    {
        const double g = scale * kGamma;
        const double value = ringkit::lorentzian_pair_integral(delta, g, g);
        EXPECT_LT(relative(value, oracle::pair_integral(delta, g, g)), 1e-6) << scale;
        EXPECT_LT(value, previous);
        previous = value;
    }
    EXPECT_LT(previous * kGamma, 1e-3);
}

TEST(PumpedOverlap, LorentzianPumpMatchesClosedForm)
{
    auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -5, 5, kGamma);
    ladder.entries[-2].gamma = 0.5 * kGamma;
    for (double pump_fraction : {0.05, 0.5, 2.0})
    {
        const ringkit::PumpLine pump{kOmega0, pump_fraction * kGamma, ringkit::PumpModel::Lorentzian};
        for (int mu = 1; mu <= 5; ++mu)
        {
            const double delta0 = ladder.at(mu).omega + ladder.at(-mu).omega - 2 * kOmega0;
            const double expected =
                oracle::pumped_pair_integral(delta0, ladder.at(mu).gamma, ladder.at(-mu).gamma, pump.linewidth);
            EXPECT_LT(relative(ringkit::pumped_pair_overlap(mu, ladder, pump), expected), 5e-6)
                << pump_fraction << " " << mu;
        }
    }
}

TEST(PumpedOverlap, DeltaPumpEqualsPairOverlap)
{
    const auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -5, 5, kGamma);
    EXPECT_EQ(ringkit::pumped_pair_overlap(3, ladder, delta_pump()), ringkit::pair_overlap(3, ladder, delta_pump()));
    const ringkit::PumpLine narrow{kOmega0, 0.0, ringkit::PumpModel::Lorentzian};
    EXPECT_EQ(ringkit::pumped_pair_overlap(3, ladder, narrow), ringkit::pair_overlap(3, ladder, delta_pump()));
}

TEST(JsiDiagonal, IdealLadderIsFlat)
{
    const auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {}, -46, 46, kGamma);
    const auto diag = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params());
    ASSERT_EQ(diag.entries.size(), 46u);
    double lo = diag.entries.front().c_raw;
    double hi = lo;
    for (const auto &e : diag.entries)
    {
        lo = std::min(lo, e.c_raw);
        hi = std::max(hi, e.c_raw);
    }
    EXPECT_LT(hi / lo - 1.0, 1e-6);
}

TEST(JsiDiagonal, DisplacedModeHalvesOverlap)
{
    auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {}, -46, 46, kGamma);
    ladder.entries[12].omega += kGamma;
    const auto diag = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params());
    const auto *moved = diag.find(12);
    const auto *neighbor = diag.find(11);
    ASSERT_NE(moved, nullptr);
    ASSERT_NE(neighbor, nullptr);
    EXPECT_NEAR(moved->overlap / neighbor->overlap, 0.5, 1e-6);
    // The displacement also enters the phase term as gamma * tau.
    EXPECT_NEAR(moved->delta_phi, kGamma * kTau, 1e-12);
    const double predicted = 0.5 * ringkit::sinc_sq(kGamma * kTau);
    EXPECT_NEAR(moved->c_raw / neighbor->c_raw, predicted, 1e-6);
}

TEST(JsiDiagonal, IrregularityNearTwentyIsLocalMinimum)
{
    auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2, kD3}, -47, 47, kGamma);
    // Measured-style irregularity: mode +20 sits two linewidths off the fitted polynomial.
    ladder.entries[20].omega += 2.0 * kGamma;
    const auto diag = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params());
    const auto it = std::min_element(diag.entries.begin() + 14, diag.entries.begin() + 26,
                                     [](const auto &a, const auto &b) { return a.c_raw < b.c_raw; });
    EXPECT_NEAR(it->mu, 20, 1);
    EXPECT_LT(diag.find(20)->c_raw, diag.find(18)->c_raw);
    EXPECT_LT(diag.find(20)->c_raw, diag.find(22)->c_raw);
}

TEST(JsiDiagonal, InvariantUnderOddDispersionTerms)
{
    const auto even = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2, 0.0, 0.0}, -30, 30, kGamma);
    const auto odd = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2, kD3, 0.0, to_angular(-2.0)}, -30, 30, kGamma);
    const auto a = ringkit::jsi_diagonal(even, delta_pump(), phase_params(0.01));
    const auto b = ringkit::jsi_diagonal(odd, delta_pump(), phase_params(0.01));
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i)
    {
        EXPECT_NEAR(a.entries[i].delta_phi, b.entries[i].delta_phi, 1e-9 * std::abs(a.entries[i].delta_phi));
        EXPECT_LT(relative(b.entries[i].c_raw, a.entries[i].c_raw), 1e-9);
    }
}

TEST(JsiDiagonal, EfficienciesMultiplyPairs)
{
    const auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -5, 5, kGamma);
    const std::map<int, double> eta{{3, 0.5}, {-3, 0.4}};
    const auto plain = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params());
    const auto lossy = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params(), eta);
    EXPECT_DOUBLE_EQ(lossy.find(3)->efficiency, 0.2);
    EXPECT_NEAR(lossy.find(3)->c_raw, 0.2 * plain.find(3)->c_raw, 1e-15 * plain.find(3)->c_raw);
    EXPECT_EQ(lossy.find(2)->c_raw, plain.find(2)->c_raw);
    EXPECT_EQ(kind_of([&] { ringkit::jsi_diagonal(ladder, delta_pump(), phase_params(), {{1, 1.5}}); }),
              ErrorKind::Validation);
}

TEST(JsiDiagonal, MissingPartnerIsIncomplete)
{
    auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -10, 10, kGamma);
    ladder.entries.erase(-6);
    ringkit::JsiOptions options;
    options.mu_max = 10;
    EXPECT_EQ(kind_of([&] { ringkit::jsi_diagonal(ladder, delta_pump(), phase_params(), {}, options); }),
              ErrorKind::IncompleteLadder);
    EXPECT_EQ(ringkit::jsi_diagonal(ladder, delta_pump(), phase_params()).entries.size(), 5u);
}

TEST(JsiMap, FortySixSquared)
{
    const auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2, kD3}, -46, 46, kGamma);
    const auto diag = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params());
    const auto map = ringkit::jsi_map(diag, 0.0);
    EXPECT_EQ(map.extent(), 46);
    EXPECT_EQ(map.size(), 2116u);
    for (int s = 1; s <= 46; ++s)
    {
        for (int i = 1; i <= 46; ++i)
        {
            if (s != i)
            {
                ASSERT_EQ(map.at(s, i), 0.0);
            }
        }
        EXPECT_EQ(map.at(s, s), diag.find(s)->c_raw);
    }
}

TEST(JsiMap, FloorIsMatrixMinimum)
{
    const auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -8, 8, kGamma);
    const auto diag = ringkit::jsi_diagonal(ladder, delta_pump(), phase_params());
    for (double floor : {0.0, 1e-12, 3.5})
    {
        const auto map = ringkit::jsi_map(diag, floor);
        EXPECT_EQ(*std::min_element(map.values.begin(), map.values.end()), floor);
    }
}

TEST(JsiMap, CsvHasHeaderAndRows)
{
    const auto ladder = ringkit::make_polynomial_ladder(kOmega0, kD1, {kD2}, -3, 3, kGamma);
    std::ostringstream out;
    ringkit::write_jsi_map_csv(out, ringkit::jsi_map(ringkit::jsi_diagonal(ladder, delta_pump(), phase_params()), 0.0));
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(NonlinearPhase, ValidationAndDefaults)
{
    EXPECT_NEAR(ringkit::round_trip_time_from_d1(kD1), kTau, 1e-24);
    EXPECT_EQ(kind_of([] { ringkit::validate(ringkit::NonlinearPhaseParams{0.0, 0.0, 0.0}); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { ringkit::validate(ringkit::PumpLine{kOmega0, -1.0, ringkit::PumpModel::Lorentzian}); }),
              ErrorKind::Validation);
}

} // namespace
