#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ringkit/errors.hpp"
#include "ringkit/resonance_analysis.hpp"
#include "ringkit/units.hpp"

namespace
{

using ringkit::ErrorKind;

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

ringkit::IndexWindow whole(const ringkit::SpectrumTrace &trace)
{
    const auto it = std::min_element(trace.transmission.begin(), trace.transmission.end());
    return {0, trace.size(), static_cast<std::size_t>(it - trace.transmission.begin())};
}

// +-10 pm around the dip at 0.05 pm spacing.
ringkit::SyntheticSpec fine_dip(double center, double fwhm_pm, double depth, double sigma, std::uint64_t seed)
{
    ringkit::SyntheticSpec spec;
    spec.resonances = {{center, fwhm_pm, depth}};
    spec.grid = {center - 0.010, center + 0.010, 401};
    spec.noise_sigma = sigma;
    spec.seed = seed;
    return spec;
}

double nearest_center_error_pm(const ringkit::SpectrumTrace &trace, std::size_t index, double center)
{
    return std::abs(trace.wavelength_nm[index] - center) * 1e3;
}

// 145 GHz frequency grid inside [lo_nm, hi_nm], as wavelengths (ascending).
std::vector<double> fsr_grid_wavelengths(double lo_nm, double hi_nm)
{
    const double f0 = oracle::c / (1550.63e-9);
    std::vector<double> out;
    for (int k = -80; k <= 80; ++k)
    {
        const double nm = oracle::hz_to_nm(f0 + k * 145e9);
        if (nm > lo_nm && nm < hi_nm)
        {
            out.push_back(nm);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TEST(DetectDips, ThreeSeparatedDips)
{
    ringkit::SyntheticSpec spec;
    spec.resonances = {{1550.2, 2.0, 0.5}, {1550.5, 2.0, 0.5}, {1550.8, 2.0, 0.5}};
    spec.grid = {1550.0, 1551.0, 2001};
    const auto trace = ringkit::generate_synthetic(spec);
    ringkit::DetectOptions options;
    options.min_depth = 0.2;
    options.min_separation_pm = 100.0;
    options.expected_fwhm_pm = 2.0;
    const auto windows = ringkit::detect_dips(trace, options);
    ASSERT_EQ(windows.size(), 3u);
    const double step = trace.mean_step_nm();
    for (std::size_t k = 0; k < 3; ++k)
    {
        EXPECT_LE(std::abs(trace.wavelength_nm[windows[k].minimum] - spec.resonances[k].center_wavelength_nm),
                  step + 1e-12);
        EXPECT_LT(windows[k].begin, windows[k].minimum);
        EXPECT_GT(windows[k].end, windows[k].minimum);
    }
}

TEST(DetectDips, FlatTraceIsEmpty)
{
    ringkit::SyntheticSpec spec;
    spec.grid = {1550.0, 1551.0, 1001};
    EXPECT_TRUE(ringkit::detect_dips(ringkit::generate_synthetic(spec), {}).empty());
}

TEST(DetectDips, SeparationBelowTwoStepsRejected)
{
    ringkit::SyntheticSpec spec;
    spec.grid = {1550.0, 1551.0, 1001}; // 1 pm step
    const auto trace = ringkit::generate_synthetic(spec);
    ringkit::DetectOptions options;
    options.min_separation_pm = 1.5;
    EXPECT_EQ(kind_of([&] { ringkit::detect_dips(trace, options); }), ErrorKind::Parameter);
}

TEST(DetectDips, BroadbandFsrGridCountMatchesPlanted)
{
    ringkit::SyntheticSpec spec;
    for (double nm : fsr_grid_wavelengths(1480.5, 1639.5))
    {
        spec.resonances.push_back({nm, 1.06, 0.5});
    }
    spec.grid = {1480.0, 1640.0, 160001};
    const auto trace = ringkit::generate_synthetic(spec);
    ringkit::DetectOptions options;
    options.min_depth = 0.15;
    options.expected_fwhm_pm = 2.0;
    const auto windows = ringkit::detect_dips(trace, options);
    EXPECT_EQ(windows.size(), spec.resonances.size());
    EXPECT_GT(spec.resonances.size(), 130u);
}

// Generated grids with separation >= 10 FWHM and depth >= 0.2.
TEST(DetectDips, CompletenessOnRandomPlantedGrids)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> fwhm_dist(0.8, 5.0);
    std::uniform_real_distribution<double> ratio_dist(10.0, 40.0);
    std::uniform_real_distribution<double> depth_dist(0.2, 0.95);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial)
    {
        const double fwhm = fwhm_dist(rng);
        const double min_sep_pm = 10.0 * fwhm;
        ringkit::SyntheticSpec spec;
        double x = 1550.0 + 0.05;
        const int planted = 5 + static_cast<int>(jitter(rng) * 25);
        for (int k = 0; k < planted; ++k)
        {
            spec.resonances.push_back({x, fwhm, depth_dist(rng)});
            x += ratio_dist(rng) * fwhm * 1e-3;
        }
        const double step_nm = fwhm / 6.0 * 1e-3;
        const double stop = x + 0.05;
        spec.grid = {1550.0, stop, static_cast<std::size_t>((stop - 1550.0) / step_nm) + 1};
        const auto trace = ringkit::generate_synthetic(spec);
        ringkit::DetectOptions options;
        options.min_depth = 0.1;
        options.min_separation_pm = min_sep_pm;
        options.expected_fwhm_pm = fwhm;
        const auto windows = ringkit::detect_dips(trace, options);
        ASSERT_EQ(windows.size(), spec.resonances.size()) << "trial " << trial;
        for (std::size_t k = 0; k < windows.size(); ++k)
        {
            EXPECT_LE(nearest_center_error_pm(trace, windows[k].minimum, spec.resonances[k].center_wavelength_nm),
                      step_nm * 1e3);
        }
    }
}

TEST(FitLorentzian, NoiselessReferenceDip)
{
    const auto trace = ringkit::generate_synthetic(fine_dip(1550.64, 1.06, 0.8, 0.0, 0));
    const auto dip = ringkit::fit_lorentzian_dip(trace, whole(trace));
    EXPECT_LT(std::abs(dip.center_wavelength - 1550.64) * 1e3, 0.01);
    EXPECT_LT(std::abs(dip.fwhm_wavelength - 1.06) / 1.06, 0.005);
    EXPECT_NEAR(dip.q_factor, 1.4629e6, 0.01 * 1.4629e6);
}

TEST(FitLorentzian, NoiselessRoundTripWithinOnePpm)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> center(1500.0, 1600.0);
    std::uniform_real_distribution<double> width(0.6, 3.0);
    std::uniform_real_distribution<double> depth(0.2, 1.0);
    for (int trial = 0; trial < 25; ++trial)
    {
        const double c = center(rng);
        const double w = width(rng);
        const double d = depth(rng);
        auto spec = fine_dip(c, w, d, 0.0, 0);
        spec.grid = {c - 5 * w * 1e-3, c + 5 * w * 1e-3, 301};
        spec.baseline = 0.8 + 0.2 * depth(rng);
        const auto trace = ringkit::generate_synthetic(spec);
        const auto dip = ringkit::fit_lorentzian_dip(trace, whole(trace));
        EXPECT_NEAR(dip.center_wavelength, c, 1e-6 * c);
        EXPECT_NEAR(dip.fwhm_wavelength, w, 1e-6 * w);
        EXPECT_NEAR(dip.depth, d, 1e-6 * d);
        EXPECT_NEAR(dip.baseline, spec.baseline, 1e-6 * spec.baseline);
    }
}

TEST(FitLorentzian, NoisyReferenceDipMonteCarlo)
{
    std::vector<double> center_err_pm;
    std::vector<double> q_err;
    const double q_true = 1550.64 / 1.06e-3;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const auto trace = ringkit::generate_synthetic(fine_dip(1550.64, 1.06, 0.8, 0.005, seed));
        const auto dip = ringkit::fit_lorentzian_dip(trace, whole(trace));
        center_err_pm.push_back(std::abs(dip.center_wavelength - 1550.64) * 1e3);
        q_err.push_back(std::abs(dip.q_factor - q_true) / q_true);
    }
    const double worst_center = *std::max_element(center_err_pm.begin(), center_err_pm.end());
    const double worst_q = *std::max_element(q_err.begin(), q_err.end());
    std::cout << "[ spread   ] center error max " << worst_center << " pm, mean "
              << std::accumulate(center_err_pm.begin(), center_err_pm.end(), 0.0) / 100.0 << " pm; Q error max "
              << worst_q << ", mean " << std::accumulate(q_err.begin(), q_err.end(), 0.0) / 100.0 << "\n";
    EXPECT_LT(worst_center, 0.1);
    EXPECT_LT(worst_q, 0.02);
}

TEST(FitLorentzian, CenterRobustToNoiseUpToOnePercent)
{
    for (double depth : {0.3, 0.6, 0.9})
    {
        const auto clean = ringkit::generate_synthetic(fine_dip(1550.64, 1.06, depth, 0.0, 0));
        const double reference = ringkit::fit_lorentzian_dip(clean, whole(clean)).center_wavelength;
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
        {
            const auto trace = ringkit::generate_synthetic(fine_dip(1550.64, 1.06, depth, 0.01, seed));
            const auto dip = ringkit::fit_lorentzian_dip(trace, whole(trace));
            ASSERT_LT(std::abs(dip.center_wavelength - reference) * 1e3, 0.2) << "depth " << depth << " seed " << seed;
        }
    }
}

TEST(FitLorentzian, MonotoneWindowRejected)
{
    std::vector<double> x(200), t(200);
    for (int i = 0; i < 200; ++i)
    {
        x[i] = 1550.0 + i * 1e-4;
        t[i] = 1.0 - 0.002 * i;
    }
    const auto trace = ringkit::make_trace(x, t);
    const auto kind = kind_of([&] { ringkit::fit_lorentzian_dip(trace, {0, 200, 199}); });
    EXPECT_TRUE(kind == ErrorKind::FitFailure || kind == ErrorKind::RejectedFit) << ringkit::to_string(kind);
}

TEST(FitLorentzian, DipFieldInvariants)
{
    const auto trace = ringkit::generate_synthetic(fine_dip(1550.64, 1.06, 0.8, 0.005, 3));
    const auto dip = ringkit::fit_lorentzian_dip(trace, whole(trace));
    EXPECT_NEAR(dip.q_factor * dip.fwhm_wavelength * 1e-3, dip.center_wavelength, 1e-9 * dip.center_wavelength);
    const double first_order = dip.center_frequency * dip.fwhm_wavelength * 1e-3 / dip.center_wavelength;
    EXPECT_NEAR(dip.fwhm_frequency, first_order, 1e-6 * first_order);
    EXPECT_NEAR(dip.center_frequency, oracle::c / (dip.center_wavelength * 1e-9), 1e-3);
    EXPECT_GT(dip.fwhm_wavelength, 0.0);
    EXPECT_GT(dip.depth, 0.0);
    EXPECT_LE(dip.depth, 1.0);
}

TEST(QualityFactor, Examples)
{
    EXPECT_NEAR(ringkit::quality_factor(1550.64, 1.06), 1.4629e6, 0.005 * 1.4629e6);
    EXPECT_NEAR(ringkit::quality_factor(1550.0, 1550.0), 1.0e3, 1e-9);
    EXPECT_NEAR(ringkit::quality_factor(1600.0, 0.936), 1.71e6, 0.005 * 1.71e6);
}

TEST(QualityFactor, NonPositiveInputRejected)
{
    EXPECT_EQ(kind_of([] { ringkit::quality_factor(0.0, 1.0); }), ErrorKind::Domain);
    EXPECT_EQ(kind_of([] { ringkit::quality_factor(1550.0, -1.0); }), ErrorKind::Domain);
}

TEST(FreeSpectralRange, ExactGridPerPairIsFsr)
{
    std::vector<ringkit::ResonanceDip> dips;
    for (double nm : fsr_grid_wavelengths(1500.0, 1600.0))
    {
        dips.push_back(ringkit::make_dip(nm, 1.0, 0.5));
    }
    const auto set = ringkit::make_resonance_set(dips);
    const auto fsr = ringkit::free_spectral_range(set);
    ASSERT_EQ(fsr.per_pair_hz.size(), dips.size() - 1);
    for (double f : fsr.per_pair_hz)
    {
        EXPECT_NEAR(f, 145e9, 145e9 * 1e-6);
    }
    EXPECT_NEAR(fsr.mean_hz, 145e9, 145e9 * 1e-6);
}

TEST(FreeSpectralRange, TwoDipArithmetic)
{
    const auto set = ringkit::make_resonance_set({ringkit::make_dip(1551.161, 1.0, 0.5), ringkit::make_dip(1550.000, 1.0, 0.5)});
    const double expected = oracle::c / 1550.000e-9 - oracle::c / 1551.161e-9;
    const auto fsr = ringkit::free_spectral_range(set);
    ASSERT_EQ(fsr.per_pair_hz.size(), 1u);
    EXPECT_NEAR(fsr.per_pair_hz[0], expected, 1.0);
    EXPECT_NEAR(fsr.mean_hz, 144.77e9, 0.01e9);
}

TEST(FreeSpectralRange, PositiveD2GivesFsrIncreasingWithFrequency)
{
    const double f0 = 193.3e12;
    std::vector<ringkit::ResonanceDip> dips;
    for (int mu = -30; mu <= 30; ++mu)
    {
        const double f = f0 + mu * 145e9 + 0.5 * 2e6 * mu * mu;
        dips.push_back(ringkit::make_dip(oracle::hz_to_nm(f), 1.0, 0.5));
    }
    const auto set = ringkit::make_resonance_set(dips);
    // Dips are in wavelength order, so frequency decreases along the list.
    for (std::size_t i = 1; i < set.fsr_hz.size(); ++i)
    {
        EXPECT_LT(set.fsr_hz[i], set.fsr_hz[i - 1]);
    }
}

TEST(FreeSpectralRange, WindowRestrictsMean)
{
    const auto set = ringkit::make_resonance_set({ringkit::make_dip(1540.0, 1.0, 0.5), ringkit::make_dip(1541.0, 1.0, 0.5),
                                                  ringkit::make_dip(1549.0, 1.0, 0.5), ringkit::make_dip(1551.0, 1.0, 0.5)});
    const auto fsr = ringkit::free_spectral_range(set, ringkit::WavelengthRange{1548.0, 1552.0});
    EXPECT_NEAR(fsr.mean_hz, oracle::c / 1549e-9 - oracle::c / 1551e-9, 1.0);
}

TEST(FreeSpectralRange, FewerThanTwoDipsRejected)
{
    const auto set = ringkit::make_resonance_set({ringkit::make_dip(1550.0, 1.0, 0.5)});
    EXPECT_EQ(kind_of([&] { ringkit::free_spectral_range(set); }), ErrorKind::InsufficientData);
}

std::vector<ringkit::ResonanceDip> dips_with_q(std::initializer_list<double> qs)
{
    std::vector<ringkit::ResonanceDip> dips;
    double nm = 1550.0;
    for (double q : qs)
    {
        dips.push_back(ringkit::make_dip(nm, nm / q * 1e3, 0.5));
        nm += 1.2;
    }
    return dips;
}

TEST(QStatistics, ThreePlantedValues)
{
    const auto set = ringkit::make_resonance_set(dips_with_q({1.0e6, 1.2e6, 1.71e6}));
    const auto q = ringkit::q_statistics(set);
    EXPECT_NEAR(q.max, 1.71e6, 1e-3);
    EXPECT_NEAR(q.mean, 1.3033e6, 50.0);
    std::size_t total = 0;
    for (const auto &bin : q.histogram)
    {
        total += bin.count;
        EXPECT_NEAR(bin.upper - bin.lower, 1e5, 1e-6);
    }
    EXPECT_EQ(total, 3u);
}

TEST(QStatistics, SingleDip)
{
    const auto q = ringkit::q_statistics(ringkit::make_resonance_set(dips_with_q({1.2e6})));
    EXPECT_NEAR(q.max, 1.2e6, 1e-3);
    EXPECT_DOUBLE_EQ(q.max, q.mean);
}

TEST(QStatistics, EmptySetRejected)
{
    EXPECT_EQ(kind_of([] { ringkit::q_statistics(ringkit::ResonanceSet{}); }), ErrorKind::InsufficientData);
}

class PlantedBroadband : public ::testing::Test
{
protected:
    static void SetUpTestSuite()
    {
        std::mt19937_64 rng(130);
        std::uniform_real_distribution<double> q_dist(0.5e6, 1.7e6);
        std::uniform_real_distribution<double> depth_dist(0.4, 0.9);
        const auto centers = fsr_grid_wavelengths(1481.0, 1639.0);
        spec_ = new ringkit::SyntheticSpec;
        for (std::size_t k = 0; k < 130; ++k)
        {
            const double q = q_dist(rng);
            planted_q_.push_back(q);
            spec_->resonances.push_back({centers[k], centers[k] / q * 1e3, depth_dist(rng)});
        }
        spec_->grid = {1480.0, 1640.0, 160001};
        trace_ = new ringkit::SpectrumTrace(ringkit::generate_synthetic(*spec_));
    }
    static void TearDownTestSuite()
    {
        delete spec_;
        delete trace_;
    }
    static std::vector<ringkit::IndexWindow> windows()
    {
        ringkit::DetectOptions options;
        options.min_depth = 0.15;
        options.expected_fwhm_pm = 2.0;
        return ringkit::detect_dips(*trace_, options);
    }
    static inline ringkit::SyntheticSpec *spec_ = nullptr;
    static inline ringkit::SpectrumTrace *trace_ = nullptr;
    static inline std::vector<double> planted_q_;
};

TEST_F(PlantedBroadband, MeanQWithinTwoPercent)
{
    const auto w = windows();
    ASSERT_EQ(w.size(), 130u);
    const auto set = ringkit::make_resonance_set(ringkit::fit_dips(*trace_, w));
    ASSERT_EQ(set.dips.size(), 130u);
    const double planted_mean = std::accumulate(planted_q_.begin(), planted_q_.end(), 0.0) / 130.0;
    EXPECT_NEAR(set.q_summary.mean, planted_mean, 0.02 * planted_mean);
    EXPECT_NEAR(set.q_summary.max, *std::max_element(planted_q_.begin(), planted_q_.end()),
                0.02 * set.q_summary.max);
}

TEST_F(PlantedBroadband, ThreadCountDoesNotChangeResults)
{
    const auto w = windows();
    const auto serial = ringkit::fit_dips(*trace_, w, {}, true, 1);
    const auto parallel = ringkit::fit_dips(*trace_, w, {}, true, 7);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
    {
        EXPECT_EQ(serial[i].center_wavelength, parallel[i].center_wavelength);
        EXPECT_EQ(serial[i].fwhm_wavelength, parallel[i].fwhm_wavelength);
        EXPECT_EQ(serial[i].depth, parallel[i].depth);
    }
}

TEST(ResonanceSet, InvariantsHold)
{
    const auto set = ringkit::make_resonance_set(dips_with_q({1.5e6, 1.0e6, 0.7e6, 1.1e6}));
    ASSERT_EQ(set.fsr_hz.size(), set.dips.size() - 1);
    for (std::size_t i = 1; i < set.dips.size(); ++i)
    {
        EXPECT_LT(set.dips[i - 1].center_wavelength, set.dips[i].center_wavelength);
    }
    for (double f : set.fsr_hz)
    {
        EXPECT_GT(f, 0.0);
    }
    EXPECT_GT(ringkit::mean_linewidth_hz(set), 0.0);
}

} // namespace
