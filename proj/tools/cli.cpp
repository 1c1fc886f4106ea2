#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "presets.hpp"
#include "ringkit/coincidence_stats.hpp"
#include "ringkit/dispersion.hpp"
#include "ringkit/errors.hpp"
#include "ringkit/jsi_model.hpp"
#include "ringkit/reports.hpp"
#include "ringkit/resonance_analysis.hpp"
#include "ringkit/spectral_io.hpp"
#include "ringkit/units.hpp"
#include "svg_plot.hpp"

namespace ringkit::cli
{

namespace fs = std::filesystem;
using report::Json;

namespace
{

struct SynthArgs
{
    std::string input;
    std::string preset;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> noise;
};

struct AnalyzeArgs
{
    std::string input;
    std::string reference;
    std::string output_dir = ".";
    double min_depth = 0.15;
    double min_separation_pm = 300.0;
    double expected_fwhm_pm = 2.0;
    double q_bin_width = 1e5;
    std::vector<double> fsr_window_nm;
};

struct DispersionArgs
{
    std::string input;
    std::string output_dir = ".";
    double pump_nm = 0.0;
    int fit_order = 3;
};

struct JsiArgs
{
    std::string input;
    std::string dispersion;
    std::string efficiencies;
    std::string output_dir = ".";
    double tolerance = 1e-6;
    std::optional<double> round_trip_s;
    double self_phase_rad = 0.0;
    std::string pump_model = "delta";
    double pump_linewidth_hz = 0.0;
    std::optional<int> mu_max;
    double floor = 0.0;
};

struct ReportArgs
{
    std::string input;
    std::string ladder;
    std::string compare;
    std::string output_dir = ".";
    double threshold_cps = 0.0;
    std::optional<double> threshold_uncertainty_cps;
    double coincidence_window_s = 1e-9;
    double accumulation_s = 10.0;
    double loss_facet_db = -3.0;
    double loss_filter_db = -7.0;
    double det_eff = 0.5;
    bool cc_subtracted = false;
};

fs::path prepare_output_dir(const std::string &dir)
{
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
    {
        throw Error(ErrorKind::Validation, "cannot create output directory " + dir);
    }
    return p;
}

int cmd_synth(const SynthArgs &a, std::ostream &out)
{
    SyntheticSpec spec;
    if (!a.preset.empty())
    {
        if (a.preset != "reference-ring")
        {
            throw Error(ErrorKind::Parameter, "unknown preset '" + a.preset + "'");
        }
        presets::DeviceParameters device;
        if (a.noise)
        {
            device.noise_sigma = *a.noise;
        }
        spec = presets::reference_ring_spec(a.seed.value_or(1), device);
    }
    else
    {
        if (a.input.empty())
        {
            throw Error(ErrorKind::Parameter, "synth needs --input <spec.json> or --preset");
        }
        spec = load_synthetic_spec(a.input);
        if (a.seed)
        {
            spec.seed = *a.seed;
        }
        if (a.noise)
        {
            spec.noise_sigma = *a.noise;
        }
    }
    validate(spec);
    const auto trace = generate_synthetic(spec);
    const auto dir = prepare_output_dir(a.output_dir);
    save_spectrum(dir / "spectrum.csv", trace);
    {
        std::ofstream js(dir / "synth_spec.json", std::ios::binary);
        js << nlohmann::json(spec).dump(2) << "\n";
    }
    out << "wrote " << (dir / "spectrum.csv").string() << " (" << trace.size() << " samples, "
        << spec.resonances.size() << " resonances)\n";
    return kExitOk;
}

int cmd_analyze(const AnalyzeArgs &a, std::ostream &out)
{
    auto trace = load_spectrum(a.input);
    if (!a.reference.empty())
    {
        trace = normalize_by_reference(trace, load_spectrum(a.reference));
    }
    std::optional<WavelengthRange> window;
    if (!a.fsr_window_nm.empty())
    {
        if (a.fsr_window_nm.size() != 2 || !(a.fsr_window_nm[0] < a.fsr_window_nm[1]))
        {
            throw Error(ErrorKind::Parameter, "--fsr-window-nm takes LOWER UPPER");
        }
        window = WavelengthRange{a.fsr_window_nm[0], a.fsr_window_nm[1]};
    }

    DetectOptions detect;
    detect.min_depth = a.min_depth;
    detect.min_separation_pm = a.min_separation_pm;
    detect.expected_fwhm_pm = a.expected_fwhm_pm;
    const auto windows = detect_dips(trace, detect);
    auto dips = fit_dips(trace, windows);
    const auto set = make_resonance_set(std::move(dips), a.q_bin_width);

    const auto dir = prepare_output_dir(a.output_dir);
    auto doc = report::resonance_report(set, set.dips.size() >= 2 ? window : std::nullopt);
    doc["detected_windows"] = windows.size();
    report::write_json(dir / "resonances.json", doc);

    svg::Plot plot;
    plot.title = "Transmission";
    plot.x_label = "wavelength (nm)";
    plot.y_label = "normalized transmission";
    auto trace_series = svg::envelope(trace.wavelength_nm, trace.transmission, 2000);
    trace_series.label = "measured";
    plot.series.push_back(std::move(trace_series));
    svg::Series fitted;
    fitted.label = "fitted dips";
    fitted.color = "#d62728";
    fitted.markers = true;
    for (const auto &d : set.dips)
    {
        fitted.x.push_back(d.center_wavelength);
        fitted.y.push_back(d.baseline * (1.0 - d.depth));
    }
    plot.series.push_back(std::move(fitted));
    svg::save(dir / "transmission.svg", svg::render(plot));

    out << "fitted " << set.dips.size() << " of " << windows.size() << " detected dips";
    if (!set.dips.empty())
    {
        out << "; mean Q " << set.q_summary.mean << ", max Q " << set.q_summary.max;
    }
    out << "\n";
    return kExitOk;
}

int cmd_dispersion(const DispersionArgs &a, std::ostream &out)
{
    if (!(a.pump_nm > 0.0))
    {
        throw Error(ErrorKind::Parameter, "--pump-nm is required");
    }
    const auto set = report::resonance_set_from_report(report::read_json(a.input));
    if (!set.dips.empty() &&
        (a.pump_nm < set.dips.front().center_wavelength - 1.0 || a.pump_nm > set.dips.back().center_wavelength + 1.0))
    {
        throw Error(ErrorKind::Parameter, "pump wavelength outside the spectrum span");
    }
    const auto ladder = build_mode_ladder(set, a.pump_nm);
    const auto fit = fit_dispersion(ladder, a.fit_order);
    const double linewidth = units::to_angular(mean_linewidth_hz(set));

    const auto dir = prepare_output_dir(a.output_dir);
    report::write_json(dir / "ladder.json", report::ladder_document(ladder));
    report::write_json(dir / "dispersion.json", report::dispersion_report(fit, ladder, linewidth));

    svg::Plot plot;
    plot.title = "Integrated dispersion";
    plot.x_label = "relative mode number mu";
    plot.y_label = "D_int / 2pi (MHz)";
    svg::Series measured{"measured", "#1f77b4", {}, {}, true};
    svg::Series model{"polynomial fit", "#d62728", {}, {}, false};
    for (const auto &[mu, value] : integrated_dispersion(ladder, fit.d1))
    {
        measured.x.push_back(mu);
        measured.y.push_back(units::to_hz(value) * 1e-6);
    }
    for (int mu = ladder.mu_min(); mu <= ladder.mu_max(); ++mu)
    {
        model.x.push_back(mu);
        model.y.push_back(units::to_hz(fit.dint(mu)) * 1e-6);
    }
    plot.series = {measured, model};
    svg::save(dir / "dint.svg", svg::render(plot));

    out << "ladder of " << ladder.size() << " modes (mu " << ladder.mu_min() << ".." << ladder.mu_max()
        << "); D1/2pi = " << units::to_hz(fit.d1) << " Hz, D2/2pi = " << units::to_hz(fit.d2)
        << " Hz, D3/2pi = " << units::to_hz(fit.d3) << " Hz\n";
    return kExitOk;
}

std::map<int, double> load_efficiencies(const std::string &path)
{
    std::map<int, double> eta;
    if (path.empty())
    {
        return eta;
    }
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorKind::MalformedInput, "cannot open " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("mu", 0) == 0)
        {
            continue;
        }
        std::istringstream row(line);
        int mu = 0;
        char comma = 0;
        double value = 0.0;
        if (!(row >> mu >> comma >> value) || comma != ',')
        {
            throw MalformedInputError(line_no, "expected 'mu,eta'");
        }
        eta[mu] = value;
    }
    return eta;
}

int cmd_jsi(const JsiArgs &a, std::ostream &out)
{
    if (!(a.tolerance > 0.0 && a.tolerance <= 1e-3))
    {
        throw Error(ErrorKind::Parameter, "--tolerance must lie in (0, 1e-3]");
    }
    const auto ladder = report::ladder_from_document(report::read_json(a.input));

    JsiOptions options;
    options.quadrature.relative_tolerance = a.tolerance;
    options.mu_max = a.mu_max;
    std::optional<double> d1;
    if (!a.dispersion.empty())
    {
        d1 = report::dispersion_from_report(report::read_json(a.dispersion)).d1;
        options.d1 = d1;
    }
    if (!d1)
    {
        d1 = (ladder.at(ladder.mu_max()).omega - ladder.at(ladder.mu_min()).omega) /
             std::max(1, ladder.mu_max() - ladder.mu_min());
    }

    NonlinearPhaseParams params;
    params.round_trip_time = a.round_trip_s.value_or(round_trip_time_from_d1(*d1));
    // Only Gamma * P enters; carry it as a unit power times the requested phase.
    params.kerr_coefficient = a.self_phase_rad;
    params.intracavity_power = 1.0;

    PumpLine pump;
    pump.center = ladder.pump_omega();
    pump.linewidth = units::to_angular(a.pump_linewidth_hz);
    if (a.pump_model == "delta")
    {
        pump.model = PumpModel::Delta;
    }
    else if (a.pump_model == "lorentzian")
    {
        pump.model = PumpModel::Lorentzian;
    }
    else
    {
        throw Error(ErrorKind::Parameter, "--pump-model must be delta or lorentzian");
    }

    const auto diagonal = jsi_diagonal(ladder, pump, params, load_efficiencies(a.efficiencies), options);
    const auto map = jsi_map(diagonal, a.floor);

    const auto dir = prepare_output_dir(a.output_dir);
    report::write_json(dir / "jsi.json", report::jsi_report(diagonal, params, pump));
    {
        std::ofstream csv(dir / "jsi_map.csv", std::ios::binary);
        write_jsi_map_csv(csv, map);
    }

    svg::Plot plot;
    plot.title = "Predicted JSI diagonal";
    plot.x_label = "mode pair mu";
    plot.y_label = "C(mu) / max";
    svg::Series series{"model", "#2ca02c", {}, {}, true};
    for (const auto &e : diagonal.entries)
    {
        series.x.push_back(e.mu);
        series.y.push_back(e.c_normalized);
    }
    plot.series = {series};
    svg::save(dir / "jsi_diagonal.svg", svg::render(plot));

    svg::Heatmap heat;
    heat.title = "Predicted JSI";
    heat.x_label = "idler mode +mu";
    heat.y_label = "signal mode -mu";
    heat.x_first = map.mu_min;
    heat.y_first = map.mu_min;
    heat.columns = map.extent();
    heat.rows = map.extent();
    heat.values = map.values;
    svg::save(dir / "jsi_heatmap.svg", svg::render(heat));

    out << "evaluated " << diagonal.entries.size() << " mode pairs\n";
    return kExitOk;
}

int cmd_report(const ReportArgs &a, std::ostream &out)
{
    auto counts = load_counts(a.input, a.accumulation_s);
    if (counts.empty())
    {
        throw Error(ErrorKind::Validation, "counts file has no rows");
    }
    if (a.cc_subtracted)
    {
        for (auto &c : counts)
        {
            c.acc_subtracted = true;
        }
    }
    if (!(a.coincidence_window_s > 0.0))
    {
        throw Error(ErrorKind::Parameter, "--coincidence-window-s must be positive");
    }
    LossBudget budget{a.loss_facet_db, a.loss_filter_db, a.det_eff};
    validate(budget);

    const auto ladder = report::ladder_from_document(report::read_json(a.ladder));
    const auto corrected = correct_accidentals(counts, a.coincidence_window_s);
    const auto net = subtracted_counts(counts, a.coincidence_window_s);
    for (const auto &c : net)
    {
        (void)ladder.at(c.mu);
        (void)ladder.at(-c.mu);
    }

    auto result = classify_correlated(net, a.threshold_cps, a.threshold_uncertainty_cps);
    const auto bw = bandwidth_report(result.correlated_mus, ladder);
    result.signal_bandwidth_nm = bw.signal_bandwidth_nm;
    result.full_bandwidth_nm = bw.full_bandwidth_nm;

    auto doc = report::correlation_report(result, corrected, budget, a.coincidence_window_s);
    for (std::size_t i = 0; i < corrected.size(); ++i)
    {
        // Pair rate referred to the chip: one efficiency factor per channel.
        const double per_channel = apply_loss_budget(corrected[i].net_cc, budget, LossDirection::DetectedToGenerated);
        doc["modes"][i]["generated_pair_cps"] =
            apply_loss_budget(per_channel, budget, LossDirection::DetectedToGenerated);
    }

    std::optional<JsiDiagonal> predicted;
    if (!a.compare.empty())
    {
        predicted = report::jsi_from_report(report::read_json(a.compare));
    }

    const auto dir = prepare_output_dir(a.output_dir);
    report::write_json(dir / "correlation.json", doc);

    svg::Plot plot;
    plot.title = predicted ? "Diagonal coincidences vs model" : "Diagonal coincidences";
    plot.x_label = "mode pair mu";
    plot.y_label = predicted ? "normalized rate" : "net CC (cps)";
    double peak = 0.0;
    for (const auto &c : net)
    {
        peak = std::max(peak, c.cc_cps);
    }
    svg::Series measured{"measured (ACC subtracted)", "#1f77b4", {}, {}, true};
    for (const auto &c : net)
    {
        measured.x.push_back(c.mu);
        measured.y.push_back(predicted && peak > 0.0 ? c.cc_cps / peak : c.cc_cps);
    }
    plot.series.push_back(measured);
    svg::Series threshold{"threshold", "#7f7f7f", {}, {}, false};
    const double threshold_y = predicted && peak > 0.0 ? a.threshold_cps / peak : a.threshold_cps;
    threshold.x = {static_cast<double>(net.front().mu), static_cast<double>(net.back().mu)};
    threshold.y = {threshold_y, threshold_y};
    plot.series.push_back(threshold);
    if (predicted)
    {
        svg::Series model{"model", "#2ca02c", {}, {}, false};
        for (const auto &e : predicted->entries)
        {
            model.x.push_back(e.mu);
            model.y.push_back(e.c_normalized);
        }
        plot.series.push_back(model);
    }
    svg::save(dir / "coincidences.svg", svg::render(plot));

    out << "correlated pairs " << result.total_pairs << ", longest run " << result.longest_continuous_run
        << ", signal bandwidth " << result.signal_bandwidth_nm << " nm\n";
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"ringkit: ring-resonator spectrum analysis and photon-pair statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ringkit 0.3.0");

    SynthArgs synth;
    auto *s = app.add_subcommand("synth", "Generate a synthetic transmission spectrum");
    s->add_option("--input", synth.input, "SyntheticSpec JSON");
    s->add_option("--preset", synth.preset, "Built-in device (reference-ring)");
    s->add_option("--output-dir", synth.output_dir, "Directory for spectrum.csv and synth_spec.json");
    s->add_option("--seed", synth.seed, "Override the noise seed");
    s->add_option("--noise", synth.noise, "Override noise_sigma");

    AnalyzeArgs analyze;
    auto *an = app.add_subcommand("analyze", "Detect and fit resonance dips");
    an->add_option("--input", analyze.input, "Spectrum CSV")->required();
    an->add_option("--reference", analyze.reference, "Reference sweep CSV to divide by");
    an->add_option("--output-dir", analyze.output_dir, "Directory for resonances.json and transmission.svg");
    an->add_option("--min-depth", analyze.min_depth, "Minimum fractional dip depth");
    an->add_option("--min-sep-pm", analyze.min_separation_pm, "Minimum dip spacing (pm)");
    an->add_option("--expected-fwhm-pm", analyze.expected_fwhm_pm, "Expected linewidth (pm); sets the baseline window");
    an->add_option("--q-bin-width", analyze.q_bin_width, "Q histogram bin width");
    an->add_option("--fsr-window-nm", analyze.fsr_window_nm, "Wavelength range (nm) for the mean FSR")->expected(2);

    DispersionArgs dispersion;
    auto *di = app.add_subcommand("dispersion", "Build the mode ladder and fit integrated dispersion");
    di->add_option("--input", dispersion.input, "Resonance report JSON")->required();
    di->add_option("--pump-nm", dispersion.pump_nm, "Pump wavelength (nm)")->required();
    di->add_option("--fit-order", dispersion.fit_order, "Polynomial order (>= 2)");
    di->add_option("--output-dir", dispersion.output_dir, "Directory for ladder.json, dispersion.json and dint.svg");

    JsiArgs jsi;
    auto *js = app.add_subcommand("jsi", "Evaluate the joint spectral intensity diagonal");
    js->add_option("--input", jsi.input, "Ladder JSON")->required();
    js->add_option("--dispersion", jsi.dispersion, "Dispersion report JSON (sets D1 and tau)");
    js->add_option("--efficiencies", jsi.efficiencies, "CSV mu,eta");
    js->add_option("--output-dir", jsi.output_dir, "Directory for jsi.json, jsi_map.csv and plots");
    js->add_option("--tolerance", jsi.tolerance, "Quadrature relative tolerance");
    js->add_option("--round-trip-s", jsi.round_trip_s, "Round-trip time (s); default 2 pi / D1");
    js->add_option("--self-phase-rad", jsi.self_phase_rad, "Gamma * P_p");
    js->add_option("--pump-model", jsi.pump_model, "delta or lorentzian");
    js->add_option("--pump-linewidth-hz", jsi.pump_linewidth_hz, "Pump FWHM (Hz) for the lorentzian model");
    js->add_option("--mu-max", jsi.mu_max, "Largest mode pair to evaluate");
    js->add_option("--floor", jsi.floor, "Off-diagonal level for jsi_map.csv");

    ReportArgs rep;
    auto *rp = app.add_subcommand("report", "Coincidence statistics and correlated-pair classification");
    rp->add_option("--input", rep.input, "Counts CSV (mu, cc_cps, ns_cps, ni_cps)")->required();
    rp->add_option("--ladder", rep.ladder, "Ladder JSON")->required();
    rp->add_option("--compare", rep.compare, "JSI report to overlay");
    rp->add_option("--output-dir", rep.output_dir, "Directory for correlation.json and coincidences.svg");
    rp->add_option("--threshold-cps", rep.threshold_cps, "Off-diagonal maximum")->required();
    rp->add_option("--threshold-unc-cps", rep.threshold_uncertainty_cps, "Threshold uncertainty; reports a +- band");
    rp->add_option("--coincidence-window-s", rep.coincidence_window_s, "Coincidence window t_c (s)");
    rp->add_option("--accumulation-s", rep.accumulation_s, "Accumulation time (s)");
    rp->add_option("--loss-facet-db", rep.loss_facet_db, "Coupling loss per facet (dB, <= 0)");
    rp->add_option("--loss-filter-db", rep.loss_filter_db, "Filter chain loss (dB, <= 0)");
    rp->add_option("--det-eff", rep.det_eff, "Detector efficiency (0, 1]");
    rp->add_flag("--cc-subtracted", rep.cc_subtracted, "Input counts already have ACC removed");

    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("ringkit");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &a : storage)
    {
        argv.push_back(a.data());
    }

    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp &)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::CallForAllHelp &)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    }
    catch (const CLI::CallForVersion &)
    {
        out << "ringkit 0.3.0\n";
        return kExitOk;
    }
    catch (const CLI::ParseError &e)
    {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try
    {
        if (s->parsed()) return cmd_synth(synth, out);
        if (an->parsed()) return cmd_analyze(analyze, out);
        if (di->parsed()) return cmd_dispersion(dispersion, out);
        if (js->parsed()) return cmd_jsi(jsi, out);
        if (rp->parsed()) return cmd_report(rep, out);
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << "\n";
        return is_input_error(e.kind()) ? kExitInput : kExitPipeline;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitInput;
}

} // namespace ringkit::cli
