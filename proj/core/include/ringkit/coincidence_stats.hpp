#ifndef RINGKIT_COINCIDENCE_STATS_HPP
#define RINGKIT_COINCIDENCE_STATS_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <vector>

#include "ringkit/dispersion.hpp"

namespace ringkit
{

struct ModePairCount
{
    int mu = 1;
    double cc_cps = 0.0; // coincidence rate
    double ns_cps = 0.0; // signal singles
    double ni_cps = 0.0; // idler singles
    double accumulation_s = 10.0;
    bool acc_subtracted = false;
    bool clamped = false; // set when subtraction hit the zero floor
};

void validate(const ModePairCount &count);

// N_s N_i t_c, counts/s.
double accidental_cc(double ns_cps, double ni_cps, double coincidence_window_s);

struct Subtracted
{
    double value = 0.0;
    bool clamped = false;
};

// max(raw - acc, 0); `clamped` reports when the floor was applied.
Subtracted subtract_acc(double raw_cc, double acc);

// Coincidence-to-accidental ratio; acc == 0 raises a Domain error ("infinite CAR").
double car(double cc_cps, double acc_cps);

struct LossBudget
{
    double facet_db = 0.0;        // per facet, <= 0
    double filter_chain_db = 0.0; // <= 0
    double detector_efficiency = 1.0;

    double total_efficiency() const;
    double total_db() const;
};

void validate(const LossBudget &budget);

enum class LossDirection
{
    DetectedToGenerated,
    GeneratedToDetected,
};

double apply_loss_budget(double rate_cps, const LossBudget &budget, LossDirection direction);

struct AccidentalCorrected
{
    int mu = 0;
    double raw_cc = 0.0;
    double acc = 0.0;
    double net_cc = 0.0;
    bool clamped = false;
    std::optional<double> car; // empty when acc == 0
};

// Per-mode ACC and subtraction; counts already flagged as subtracted pass through.
std::vector<AccidentalCorrected> correct_accidentals(std::span<const ModePairCount> counts, double coincidence_window_s);

// Net (ACC-subtracted) counts suitable for classify_correlated.
std::vector<ModePairCount> subtracted_counts(std::span<const ModePairCount> counts, double coincidence_window_s);

struct CorrelationBand
{
    double uncertainty_cps = 0.0;
    std::size_t optimistic_pairs = 0;  // threshold - uncertainty
    std::size_t optimistic_run = 0;
    std::size_t pessimistic_pairs = 0; // threshold + uncertainty
    std::size_t pessimistic_run = 0;
};

struct CorrelationReport
{
    std::vector<int> correlated_mus;
    std::size_t total_pairs = 0;
    std::size_t longest_continuous_run = 0;
    double signal_bandwidth_nm = 0.0;
    double full_bandwidth_nm = 0.0;
    double threshold_cps = 0.0;
    std::optional<CorrelationBand> band;
};

// Longest stretch of consecutive integers in a sorted, duplicate-free list.
std::size_t longest_continuous_run(std::span<const int> sorted_mus);

// mu is correlated iff its (ACC-subtracted) cc exceeds the off-diagonal maximum.
CorrelationReport classify_correlated(std::span<const ModePairCount> diagonal, double offdiag_max_cps,
                                      std::optional<double> threshold_uncertainty_cps = std::nullopt);

struct BandwidthReport
{
    double signal_bandwidth_nm = 0.0;
    double full_bandwidth_nm = 0.0;
};

// Signal branch is -mu (long wavelength).
BandwidthReport bandwidth_report(std::span<const int> correlated_mus, const ModeLadder &ladder);

// CSV with columns mu, cc_cps, ns_cps, ni_cps; optional header, '#' comments.
std::vector<ModePairCount> parse_counts_csv(std::istream &in, double accumulation_s = 10.0);
std::vector<ModePairCount> load_counts(const std::filesystem::path &path, double accumulation_s = 10.0);

} // namespace ringkit

#endif // RINGKIT_COINCIDENCE_STATS_HPP
