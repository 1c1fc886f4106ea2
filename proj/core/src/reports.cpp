#include "ringkit/reports.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "ringkit/errors.hpp"
#include "ringkit/units.hpp"

namespace ringkit::report
{

namespace
{

void round_tree(Json &node)
{
    if (node.is_number_float())
    {
        node = round_significant(node.get<double>());
    }
    else if (node.is_structured())
    {
        for (auto &child : node)
        {
            round_tree(child);
        }
    }
}

template <typename T>
T field(const Json &j, const char *key)
{
    try
    {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorKind::Validation, std::string("field '") + key + "': " + e.what());
    }
}

} // namespace

double round_significant(double value, int digits)
{
    if (!std::isfinite(value) || value == 0.0)
    {
        return value;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", digits - 1, value);
    return std::strtod(buf, nullptr);
}

std::string dump(Json document)
{
    round_tree(document);
    return document.dump(2) + "\n";
}

void write_json(const std::filesystem::path &path, const Json &document)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error(ErrorKind::Validation, "cannot write " + path.string());
    }
    out << dump(document);
}

Json read_json(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorKind::MalformedInput, "cannot open " + path.string());
    }
    try
    {
        return Json::parse(in);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorKind::MalformedInput, path.string() + ": " + e.what());
    }
}

Json resonance_report(const ResonanceSet &set, std::optional<WavelengthRange> fsr_window)
{
    Json doc;
    Json dips = Json::array();
    for (const auto &d : set.dips)
    {
        dips.push_back(Json{{"center_wavelength", d.center_wavelength},
                            {"center_frequency", d.center_frequency},
                            {"fwhm_wavelength", d.fwhm_wavelength},
                            {"fwhm_frequency", d.fwhm_frequency},
                            {"depth", d.depth},
                            {"q_factor", d.q_factor},
                            {"fit_residual", d.fit_residual},
                            {"baseline", d.baseline}});
    }
    doc["units"] = Json{{"center_wavelength", "nm"},
                        {"center_frequency", "Hz"},
                        {"fwhm_wavelength", "pm"},
                        {"fwhm_frequency", "Hz"}};
    doc["dips"] = std::move(dips);

    Json fsr{{"per_pair_hz", Json::array()}, {"mean_hz", nullptr}};
    if (set.dips.size() >= 2)
    {
        const auto r = free_spectral_range(set, fsr_window);
        fsr["per_pair_hz"] = r.per_pair_hz;
        fsr["mean_hz"] = r.mean_hz;
        if (fsr_window)
        {
            fsr["window_nm"] = Json::array({fsr_window->lower_nm, fsr_window->upper_nm});
        }
    }
    doc["fsr"] = std::move(fsr);

    Json q{{"max", nullptr}, {"mean", nullptr}, {"histogram", Json::array()}};
    Json linewidth{{"mean_fwhm_hz", nullptr}};
    if (!set.dips.empty())
    {
        q["max"] = set.q_summary.max;
        q["mean"] = set.q_summary.mean;
        q["bin_width"] = set.q_summary.bin_width;
        for (const auto &b : set.q_summary.histogram)
        {
            q["histogram"].push_back(Json{{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
        }
        linewidth["mean_fwhm_hz"] = mean_linewidth_hz(set);
    }
    doc["q_summary"] = std::move(q);
    doc["linewidth"] = std::move(linewidth);
    return doc;
}

ResonanceSet resonance_set_from_report(const Json &document)
{
    if (!document.contains("dips") || !document["dips"].is_array())
    {
        throw Error(ErrorKind::Validation, "resonance report has no 'dips' array");
    }
    std::vector<ResonanceDip> dips;
    for (const auto &d : document["dips"])
    {
        auto dip = make_dip(field<double>(d, "center_wavelength"), field<double>(d, "fwhm_wavelength"),
                            field<double>(d, "depth"), d.value("baseline", 1.0), d.value("fit_residual", 0.0));
        dips.push_back(dip);
    }
    return make_resonance_set(std::move(dips));
}

Json ladder_document(const ModeLadder &ladder)
{
    Json modes = Json::array();
    for (const auto &[mu, e] : ladder.entries)
    {
        Json m{{"mu", mu},
               {"frequency_hz", units::to_hz(e.omega)},
               {"linewidth_hz", units::to_hz(e.gamma)},
               {"wavelength_nm", units::angular_to_wavelength_nm(e.omega)}};
        m["dip_index"] = e.dip_index ? Json(*e.dip_index) : Json(nullptr);
        modes.push_back(std::move(m));
    }
    return Json{{"pump_frequency_hz", units::to_hz(ladder.pump_omega())}, {"modes", std::move(modes)}};
}

ModeLadder ladder_from_document(const Json &document)
{
    if (!document.contains("modes") || !document["modes"].is_array())
    {
        throw Error(ErrorKind::Validation, "ladder document has no 'modes' array");
    }
    ModeLadder ladder;
    for (const auto &m : document["modes"])
    {
        const int mu = field<int>(m, "mu");
        LadderEntry e;
        e.omega = units::to_angular(field<double>(m, "frequency_hz"));
        e.gamma = units::to_angular(field<double>(m, "linewidth_hz"));
        if (m.contains("dip_index") && m["dip_index"].is_number_integer())
        {
            e.dip_index = m["dip_index"].get<std::size_t>();
        }
        if (!ladder.entries.emplace(mu, e).second)
        {
            throw Error(ErrorKind::Validation, "duplicate mu " + std::to_string(mu) + " in ladder document");
        }
    }
    validate(ladder);
    return ladder;
}

Json dispersion_report(const DispersionFit &fit, const ModeLadder &ladder, std::optional<double> mean_linewidth_rad_s)
{
    Json doc{{"d1_hz", units::to_hz(fit.d1)},
             {"d2_hz", units::to_hz(fit.d2)},
             {"d3_hz", units::to_hz(fit.d3)},
             {"rms_residual_hz", units::to_hz(fit.rms_residual)},
             {"fit_order", fit.fit_order},
             {"mode_range", Json::array({fit.mu_min, fit.mu_max})}};
    if (fit.fit_order > 3)
    {
        Json higher = Json::array();
        for (std::size_t k = 3; k < fit.coefficients.size(); ++k)
        {
            higher.push_back(units::to_hz(fit.coefficients[k]));
        }
        doc["higher_order_hz"] = std::move(higher);
    }

    const auto dint = integrated_dispersion(ladder, fit.d1);
    Json rows = Json::array();
    for (const auto &[mu, value] : dint)
    {
        rows.push_back(Json{{"mu", mu}, {"dint_hz", units::to_hz(value)}, {"fit_hz", units::to_hz(fit.dint(mu))}});
    }
    doc["dint"] = std::move(rows);

    // D_int(mu) + D_int(-mu) is what enters the phase mismatch; report it beside the per-mode values.
    Json pairs = Json::array();
    for (const auto &[mu, value] : dint)
    {
        if (mu > 0 && dint.count(-mu))
        {
            pairs.push_back(Json{{"mu", mu}, {"sum_hz", units::to_hz(value + dint.at(-mu))}});
        }
    }
    doc["dint_pair_sum"] = std::move(pairs);

    if (mean_linewidth_rad_s)
    {
        const int limit = std::max(std::abs(fit.mu_min), std::abs(fit.mu_max));
        const auto crossover = mismatch_crossover(fit, *mean_linewidth_rad_s, limit);
        doc["linewidth_comparison"] = Json{{"mean_linewidth_hz", units::to_hz(*mean_linewidth_rad_s)},
                                           {"per_mode_below_linewidth_up_to_mu", crossover.per_mode},
                                           {"pair_sum_below_linewidth_up_to_mu", crossover.pair_sum}};
    }
    return doc;
}

DispersionFit dispersion_from_report(const Json &document)
{
    DispersionFit fit;
    fit.d1 = units::to_angular(field<double>(document, "d1_hz"));
    fit.d2 = units::to_angular(field<double>(document, "d2_hz"));
    fit.d3 = units::to_angular(field<double>(document, "d3_hz"));
    fit.rms_residual = units::to_angular(document.value("rms_residual_hz", 0.0));
    fit.fit_order = document.value("fit_order", 3);
    fit.coefficients = {fit.d1, fit.d2, fit.d3};
    if (document.contains("higher_order_hz"))
    {
        for (const auto &v : document["higher_order_hz"])
        {
            fit.coefficients.push_back(units::to_angular(v.get<double>()));
        }
    }
    if (document.contains("mode_range"))
    {
        fit.mu_min = document["mode_range"].at(0).get<int>();
        fit.mu_max = document["mode_range"].at(1).get<int>();
    }
    if (!(fit.d1 > 0.0))
    {
        throw Error(ErrorKind::Validation, "dispersion report has non-positive d1_hz");
    }
    return fit;
}

Json jsi_report(const JsiDiagonal &diagonal, const NonlinearPhaseParams &params, const PumpLine &pump)
{
    Json pairs = Json::array();
    for (const auto &e : diagonal.entries)
    {
        pairs.push_back(Json{{"mu", e.mu},
                             {"c_raw", e.c_raw},
                             {"c_normalized", e.c_normalized},
                             {"sinc_sq", e.sinc_sq},
                             {"overlap", e.overlap},
                             {"delta_phi_rad", e.delta_phi},
                             {"efficiency", e.efficiency}});
    }
    return Json{{"pump",
                 Json{{"center_hz", units::to_hz(pump.center)},
                      {"linewidth_hz", units::to_hz(pump.linewidth)},
                      {"model", pump.model == PumpModel::Delta ? "delta" : "lorentzian"}}},
                {"round_trip_time_s", params.round_trip_time},
                {"self_phase_rad", params.self_phase()},
                {"peak_c_raw", diagonal.peak},
                {"pairs", std::move(pairs)}};
}

JsiDiagonal jsi_from_report(const Json &document)
{
    if (!document.contains("pairs") || !document["pairs"].is_array())
    {
        throw Error(ErrorKind::Validation, "JSI report has no 'pairs' array");
    }
    JsiDiagonal d;
    for (const auto &p : document["pairs"])
    {
        JsiEntry e;
        e.mu = field<int>(p, "mu");
        e.c_raw = field<double>(p, "c_raw");
        e.c_normalized = field<double>(p, "c_normalized");
        e.sinc_sq = field<double>(p, "sinc_sq");
        e.overlap = field<double>(p, "overlap");
        e.delta_phi = field<double>(p, "delta_phi_rad");
        e.efficiency = p.value("efficiency", 1.0);
        d.peak = std::max(d.peak, e.c_raw);
        d.entries.push_back(e);
    }
    std::sort(d.entries.begin(), d.entries.end(), [](const JsiEntry &a, const JsiEntry &b) { return a.mu < b.mu; });
    return d;
}

Json correlation_report(const CorrelationReport &report, std::span<const AccidentalCorrected> per_mode,
                        const LossBudget &budget, double coincidence_window_s)
{
    Json doc{{"correlated_mus", report.correlated_mus},
             {"total_pairs", report.total_pairs},
             {"longest_continuous_run", report.longest_continuous_run},
             {"signal_bandwidth_nm", report.signal_bandwidth_nm},
             {"full_bandwidth_nm", report.full_bandwidth_nm},
             {"threshold_cps", report.threshold_cps}};
    if (report.band)
    {
        doc["threshold_band"] = Json{{"uncertainty_cps", report.band->uncertainty_cps},
                                     {"optimistic_pairs", report.band->optimistic_pairs},
                                     {"optimistic_run", report.band->optimistic_run},
                                     {"pessimistic_pairs", report.band->pessimistic_pairs},
                                     {"pessimistic_run", report.band->pessimistic_run}};
    }

    double acc_sum = 0.0;
    Json modes = Json::array();
    for (const auto &m : per_mode)
    {
        acc_sum += m.acc;
        Json row{{"mu", m.mu}, {"raw_cc_cps", m.raw_cc}, {"acc_cps", m.acc}, {"net_cc_cps", m.net_cc},
                 {"clamped", m.clamped}};
        row["car"] = m.car ? Json(*m.car) : Json("infinite");
        modes.push_back(std::move(row));
    }
    doc["coincidence_window_s"] = coincidence_window_s;
    doc["mean_acc_cps"] = per_mode.empty() ? 0.0 : acc_sum / static_cast<double>(per_mode.size());
    doc["loss_budget"] = Json{{"facet_db", budget.facet_db},
                              {"filter_chain_db", budget.filter_chain_db},
                              {"detector_efficiency", budget.detector_efficiency},
                              {"total_efficiency", budget.total_efficiency()},
                              {"total_db", budget.total_db()}};
    doc["modes"] = std::move(modes);
    return doc;
}

} // namespace ringkit::report
