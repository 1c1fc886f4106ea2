#ifndef RINGKIT_RESONANCE_ANALYSIS_HPP
#define RINGKIT_RESONANCE_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ringkit/spectral_io.hpp"

namespace ringkit
{

// Half-open sample index range [begin, end) into a SpectrumTrace.
struct IndexWindow
{
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t minimum = 0; // index of the detected transmission minimum

    std::size_t size() const { return end - begin; }
};

struct DetectOptions
{
    double min_depth = 0.1;         // fractional depth below the local baseline
    double min_separation_pm = 300; // minimum center-to-center distance
    // Sets the rolling-median baseline window (50x this width). Zero means
    // min_separation / 20.
    double expected_fwhm_pm = 0.0;
};

std::vector<IndexWindow> detect_dips(const SpectrumTrace &trace, const DetectOptions &options);

struct ResonanceDip
{
    double center_wavelength = 0.0; // nm
    double center_frequency = 0.0;  // Hz
    double fwhm_wavelength = 0.0;   // pm
    double fwhm_frequency = 0.0;    // Hz (gamma / 2pi)
    double depth = 0.0;
    double q_factor = 0.0;
    double fit_residual = 0.0; // rms, transmission units
    double baseline = 0.0;     // fitted B
    int iterations = 0;
};

// Builds a dip from wavelength-domain parameters and fills the derived fields.
ResonanceDip make_dip(double center_wavelength_nm, double fwhm_pm, double depth, double baseline = 1.0,
                      double fit_residual = 0.0);

struct FitOptions
{
    int max_iterations = 200;
    double relative_step_tolerance = 1e-10;
};

// Least-squares fit of T = B (1 - d (w/2)^2 / ((x - x0)^2 + (w/2)^2)) over the window.
ResonanceDip fit_lorentzian_dip(const SpectrumTrace &trace, const IndexWindow &window, const FitOptions &options = {});

// Fits every window; results are in window order regardless of thread count.
// Windows whose fit is rejected or fails are skipped when `skip_failures` is set.
std::vector<ResonanceDip> fit_dips(const SpectrumTrace &trace, std::span<const IndexWindow> windows,
                                   const FitOptions &options = {}, bool skip_failures = true,
                                   unsigned threads = 0);

double quality_factor(double center_wavelength_nm, double fwhm_wavelength_pm);

struct HistogramBin
{
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

struct QSummary
{
    double max = 0.0;
    double mean = 0.0;
    double bin_width = 0.0;
    std::vector<HistogramBin> histogram;
};

struct ResonanceSet
{
    std::vector<ResonanceDip> dips; // increasing wavelength
    std::vector<double> fsr_hz;     // size = dips.size() - 1
    QSummary q_summary;
};

struct FsrResult
{
    std::vector<double> per_pair_hz;
    double mean_hz = 0.0;
};

struct WavelengthRange
{
    double lower_nm = 0.0;
    double upper_nm = 0.0;
};

// Mean is taken over pairs whose both centers lie in `window` (all pairs when unset).
FsrResult free_spectral_range(const ResonanceSet &set, std::optional<WavelengthRange> window = std::nullopt);

QSummary q_statistics(const ResonanceSet &set, double bin_width = 1e5);

// Sorts the dips, fills fsr_hz and q_summary.
ResonanceSet make_resonance_set(std::vector<ResonanceDip> dips, double q_bin_width = 1e5);

// Mean FWHM across the set (Hz); exposed alongside per-mode linewidths.
double mean_linewidth_hz(const ResonanceSet &set);

} // namespace ringkit

#endif // RINGKIT_RESONANCE_ANALYSIS_HPP
