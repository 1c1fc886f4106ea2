#include "ringkit/coincidence_stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <string_view>

#include "ringkit/errors.hpp"
#include "ringkit/units.hpp"

namespace ringkit
{

void validate(const ModePairCount &c)
{
    if (!(c.cc_cps >= 0.0) || !(c.ns_cps >= 0.0) || !(c.ni_cps >= 0.0))
    {
        throw Error(ErrorKind::Validation, "negative rate for mu=" + std::to_string(c.mu));
    }
    if (!(c.accumulation_s > 0.0))
    {
        throw Error(ErrorKind::Validation, "accumulation time must be positive");
    }
}

double accidental_cc(double ns_cps, double ni_cps, double coincidence_window_s)
{
    if (!(ns_cps >= 0.0) || !(ni_cps >= 0.0) || !(coincidence_window_s >= 0.0))
    {
        throw Error(ErrorKind::Domain, "accidental rate inputs must be non-negative");
    }
    return ns_cps * ni_cps * coincidence_window_s;
}

Subtracted subtract_acc(double raw_cc, double acc)
{
    if (!(raw_cc >= 0.0) || !(acc >= 0.0))
    {
        throw Error(ErrorKind::Domain, "rates must be non-negative");
    }
    const double net = raw_cc - acc;
    if (net < 0.0)
    {
        return {0.0, true};
    }
    return {net, false};
}

double car(double cc_cps, double acc_cps)
{
    if (!(acc_cps > 0.0))
    {
        throw Error(ErrorKind::Domain, "infinite CAR: accidental rate is zero");
    }
    return cc_cps / acc_cps;
}

double LossBudget::total_efficiency() const
{
    return std::pow(10.0, (facet_db + filter_chain_db) / 10.0) * detector_efficiency;
}

double LossBudget::total_db() const
{
    return 10.0 * std::log10(total_efficiency());
}

void validate(const LossBudget &budget)
{
    if (!(budget.facet_db <= 0.0) || !(budget.filter_chain_db <= 0.0))
    {
        throw Error(ErrorKind::Validation, "loss figures are given in dB and must be <= 0");
    }
    if (!(budget.detector_efficiency > 0.0 && budget.detector_efficiency <= 1.0))
    {
        throw Error(ErrorKind::Validation, "detector efficiency must lie in (0, 1]");
    }
}

double apply_loss_budget(double rate_cps, const LossBudget &budget, LossDirection direction)
{
    if (!(rate_cps >= 0.0))
    {
        throw Error(ErrorKind::Domain, "rate must be non-negative");
    }
    const double eta = budget.total_efficiency();
    if (!(eta > 0.0) || !std::isfinite(eta))
    {
        throw Error(ErrorKind::DegenerateBudget, "total efficiency is zero");
    }
    return direction == LossDirection::DetectedToGenerated ? rate_cps / eta : rate_cps * eta;
}

std::vector<AccidentalCorrected> correct_accidentals(std::span<const ModePairCount> counts, double coincidence_window_s)
{
    std::vector<AccidentalCorrected> out;
    out.reserve(counts.size());
    for (const auto &c : counts)
    {
        validate(c);
        AccidentalCorrected r;
        r.mu = c.mu;
        r.raw_cc = c.cc_cps;
        r.acc = accidental_cc(c.ns_cps, c.ni_cps, coincidence_window_s);
        if (c.acc_subtracted)
        {
            r.net_cc = c.cc_cps;
            r.clamped = c.clamped;
        }
        else
        {
            const auto s = subtract_acc(c.cc_cps, r.acc);
            r.net_cc = s.value;
            r.clamped = s.clamped;
        }
        if (r.acc > 0.0)
        {
            r.car = car(r.net_cc, r.acc);
        }
        out.push_back(r);
    }
    return out;
}

std::vector<ModePairCount> subtracted_counts(std::span<const ModePairCount> counts, double coincidence_window_s)
{
    const auto corrected = correct_accidentals(counts, coincidence_window_s);
    std::vector<ModePairCount> out(counts.begin(), counts.end());
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i].cc_cps = corrected[i].net_cc;
        out[i].clamped = corrected[i].clamped;
        out[i].acc_subtracted = true;
    }
    return out;
}

std::size_t longest_continuous_run(std::span<const int> sorted_mus)
{
    std::size_t best = 0;
    std::size_t current = 0;
    for (std::size_t i = 0; i < sorted_mus.size(); ++i)
    {
        current = (i > 0 && sorted_mus[i] == sorted_mus[i - 1] + 1) ? current + 1 : 1;
        best = std::max(best, current);
    }
    return best;
}

namespace
{

std::vector<int> above(std::span<const ModePairCount> diagonal, double threshold)
{
    std::set<int> mus;
    for (const auto &c : diagonal)
    {
        if (c.cc_cps > threshold)
        {
            mus.insert(c.mu);
        }
    }
    return {mus.begin(), mus.end()};
}

} // namespace

CorrelationReport classify_correlated(std::span<const ModePairCount> diagonal, double offdiag_max_cps,
                                      std::optional<double> threshold_uncertainty_cps)
{
    if (diagonal.empty())
    {
        throw Error(ErrorKind::InsufficientData, "no diagonal counts to classify");
    }
    if (!(offdiag_max_cps >= 0.0))
    {
        throw Error(ErrorKind::Parameter, "threshold must be non-negative");
    }
    for (const auto &c : diagonal)
    {
        validate(c);
    }

    CorrelationReport report;
    report.threshold_cps = offdiag_max_cps;
    report.correlated_mus = above(diagonal, offdiag_max_cps);
    report.total_pairs = report.correlated_mus.size();
    report.longest_continuous_run = longest_continuous_run(report.correlated_mus);

    if (threshold_uncertainty_cps)
    {
        CorrelationBand band;
        band.uncertainty_cps = *threshold_uncertainty_cps;
        const auto optimistic = above(diagonal, std::max(0.0, offdiag_max_cps - band.uncertainty_cps));
        const auto pessimistic = above(diagonal, offdiag_max_cps + band.uncertainty_cps);
        band.optimistic_pairs = optimistic.size();
        band.optimistic_run = longest_continuous_run(optimistic);
        band.pessimistic_pairs = pessimistic.size();
        band.pessimistic_run = longest_continuous_run(pessimistic);
        report.band = band;
    }
    return report;
}

BandwidthReport bandwidth_report(std::span<const int> correlated_mus, const ModeLadder &ladder)
{
    BandwidthReport out;
    if (correlated_mus.empty())
    {
        return out;
    }
    const auto [lo_it, hi_it] = std::minmax_element(correlated_mus.begin(), correlated_mus.end());
    const int lo = std::abs(*lo_it);
    const int hi = std::abs(*hi_it);
    const auto wavelength = [&](int mu) { return units::angular_to_wavelength_nm(ladder.at(mu).omega); };
    for (const int mu : correlated_mus)
    {
        // Every listed pair must exist on both branches.
        (void)ladder.at(mu);
        (void)ladder.at(-mu);
    }
    out.signal_bandwidth_nm = wavelength(-hi) - wavelength(-lo);
    out.full_bandwidth_nm = wavelength(-hi) - wavelength(hi);
    return out;
}

namespace
{

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T &value)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
    {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return !text.empty() && ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace

std::vector<ModePairCount> parse_counts_csv(std::istream &in, double accumulation_s)
{
    std::vector<ModePairCount> rows;
    std::set<int> seen;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#')
        {
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true)
        {
            const auto comma = text.find(',', start);
            fields.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos)
            {
                break;
            }
            start = comma + 1;
        }
        if (fields.size() != 4)
        {
            throw MalformedInputError(line_no, "expected 4 columns: mu, cc_cps, ns_cps, ni_cps");
        }
        ModePairCount c;
        c.accumulation_s = accumulation_s;
        const bool ok = parse_number(fields[0], c.mu) && parse_number(fields[1], c.cc_cps) &&
                        parse_number(fields[2], c.ns_cps) && parse_number(fields[3], c.ni_cps);
        if (!ok)
        {
            if (header_allowed && trim(fields[0]) == "mu")
            {
                header_allowed = false;
                continue;
            }
            throw MalformedInputError(line_no, "non-numeric field");
        }
        header_allowed = false;
        if (c.mu < 1)
        {
            throw MalformedInputError(line_no, "mu must be >= 1");
        }
        if (!seen.insert(c.mu).second)
        {
            throw MalformedInputError(line_no, "duplicate mu " + std::to_string(c.mu));
        }
        validate(c);
        rows.push_back(c);
    }
    std::sort(rows.begin(), rows.end(), [](const ModePairCount &a, const ModePairCount &b) { return a.mu < b.mu; });
    return rows;
}

std::vector<ModePairCount> load_counts(const std::filesystem::path &path, double accumulation_s)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorKind::MalformedInput, "cannot open " + path.string());
    }
    return parse_counts_csv(in, accumulation_s);
}

} // namespace ringkit
