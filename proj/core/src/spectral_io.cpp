#include "ringkit/spectral_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "ringkit/errors.hpp"

namespace ringkit
{

namespace
{

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double &value)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
    {
        text.remove_prefix(1);
    }
    if (text.empty())
    {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size();
}

void append_shortest(std::string &out, double value)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, ptr);
}

} // namespace

double SpectrumTrace::mean_step_nm() const
{
    if (wavelength_nm.size() < 2)
    {
        return 0.0;
    }
    return (wavelength_nm.back() - wavelength_nm.front()) / static_cast<double>(wavelength_nm.size() - 1);
}

void validate(const SpectrumTrace &trace)
{
    if (trace.wavelength_nm.size() != trace.transmission.size())
    {
        throw Error(ErrorKind::Validation, "wavelength and transmission arrays differ in length");
    }
    if (trace.wavelength_nm.size() < 2)
    {
        throw Error(ErrorKind::Validation, "a spectrum needs at least two samples");
    }
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        const double x = trace.wavelength_nm[i];
        const double t = trace.transmission[i];
        if (!std::isfinite(x) || !std::isfinite(t))
        {
            throw Error(ErrorKind::Validation, "non-finite value at sample " + std::to_string(i));
        }
        if (t < 0.0)
        {
            throw Error(ErrorKind::Validation, "negative transmission at sample " + std::to_string(i));
        }
        if (i > 0 && !(x > trace.wavelength_nm[i - 1]))
        {
            throw Error(ErrorKind::Validation, "wavelengths not strictly increasing at sample " + std::to_string(i));
        }
    }
}

SpectrumTrace make_trace(std::vector<double> wavelength_nm, std::vector<double> transmission,
                         std::map<std::string, std::string> meta)
{
    SpectrumTrace trace{std::move(wavelength_nm), std::move(transmission), std::move(meta)};
    validate(trace);
    return trace;
}

SpectrumTrace parse_spectrum_csv(std::istream &in)
{
    struct Row
    {
        double wavelength;
        double transmission;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool seen_row = false;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#')
        {
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string_view::npos)
        {
            throw MalformedInputError(line_no, "expected two comma-separated columns");
        }
        const auto first = text.substr(0, comma);
        const auto second = text.substr(comma + 1);
        if (second.find(',') != std::string_view::npos)
        {
            throw MalformedInputError(line_no, "expected exactly two columns");
        }
        double x = 0.0;
        double t = 0.0;
        const bool ok_x = parse_double(first, x);
        const bool ok_t = parse_double(second, t);
        if (!ok_x || !ok_t)
        {
            // One header row is tolerated before any data.
            if (!seen_row && !ok_x && !ok_t)
            {
                seen_row = true;
                continue;
            }
            throw MalformedInputError(line_no, "non-numeric field");
        }
        seen_row = true;
        if (!std::isfinite(x) || !std::isfinite(t))
        {
            throw MalformedInputError(line_no, "non-finite value");
        }
        if (t < 0.0)
        {
            throw Error(ErrorKind::Validation,
                        "negative transmission on line " + std::to_string(line_no));
        }
        rows.push_back({x, t, line_no});
    }
    if (rows.size() < 2)
    {
        throw Error(ErrorKind::Validation, "a spectrum needs at least two samples");
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row &a, const Row &b) { return a.wavelength < b.wavelength; });
    SpectrumTrace trace;
    trace.wavelength_nm.reserve(rows.size());
    trace.transmission.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        if (i > 0 && rows[i].wavelength == rows[i - 1].wavelength)
        {
            throw Error(ErrorKind::DuplicateAbscissa,
                        "wavelength repeated on lines " + std::to_string(rows[i - 1].line) + " and " +
                            std::to_string(rows[i].line));
        }
        trace.wavelength_nm.push_back(rows[i].wavelength);
        trace.transmission.push_back(rows[i].transmission);
    }
    validate(trace);
    return trace;
}

SpectrumTrace load_spectrum(const std::filesystem::path &path, SpectrumFormat format)
{
    if (format != SpectrumFormat::Csv)
    {
        throw Error(ErrorKind::Parameter, "unsupported spectrum format");
    }
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorKind::MalformedInput, "cannot open " + path.string());
    }
    auto trace = parse_spectrum_csv(in);
    trace.meta["source"] = path.string();
    return trace;
}

void write_spectrum_csv(std::ostream &out, const SpectrumTrace &trace)
{
    std::string buffer;
    buffer.reserve(trace.size() * 40 + 64);
    for (const auto &[key, value] : trace.meta)
    {
        buffer += "# " + key + ": " + value + "\n";
    }
    buffer += "wavelength_nm,transmission\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        append_shortest(buffer, trace.wavelength_nm[i]);
        buffer += ',';
        append_shortest(buffer, trace.transmission[i]);
        buffer += '\n';
    }
    out << buffer;
}

void save_spectrum(const std::filesystem::path &path, const SpectrumTrace &trace)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error(ErrorKind::Validation, "cannot write " + path.string());
    }
    write_spectrum_csv(out, trace);
}

SpectrumTrace normalize_by_reference(const SpectrumTrace &trace, const SpectrumTrace &reference)
{
    validate(trace);
    validate(reference);
    const auto &rx = reference.wavelength_nm;
    if (trace.wavelength_nm.front() < rx.front() || trace.wavelength_nm.back() > rx.back())
    {
        throw Error(ErrorKind::Validation, "reference sweep does not cover the spectrum span");
    }
    SpectrumTrace out = trace;
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        const double x = trace.wavelength_nm[i];
        auto hi = static_cast<std::size_t>(std::lower_bound(rx.begin(), rx.end(), x) - rx.begin());
        double ref = 0.0;
        if (rx[hi] == x)
        {
            ref = reference.transmission[hi];
        }
        else
        {
            const std::size_t lo = hi - 1;
            const double f = (x - rx[lo]) / (rx[hi] - rx[lo]);
            ref = reference.transmission[lo] + f * (reference.transmission[hi] - reference.transmission[lo]);
        }
        if (!(ref > 0.0))
        {
            throw Error(ErrorKind::Validation, "reference power is not positive at " + std::to_string(x) + " nm");
        }
        out.transmission[i] = trace.transmission[i] / ref;
    }
    out.meta["normalized_by"] = reference.meta.count("source") ? reference.meta.at("source") : "reference";
    return out;
}

void validate(const SyntheticSpec &spec)
{
    const auto &g = spec.grid;
    if (g.samples < 2 || !(g.stop_nm > g.start_nm) || !std::isfinite(g.start_nm) || !std::isfinite(g.stop_nm))
    {
        throw Error(ErrorKind::Validation, "grid needs start < stop and at least two samples");
    }
    if (!(spec.baseline > 0.0) || !std::isfinite(spec.baseline))
    {
        throw Error(ErrorKind::Validation, "baseline must be positive");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma))
    {
        throw Error(ErrorKind::Validation, "noise_sigma must be non-negative");
    }
    for (std::size_t k = 0; k < spec.resonances.size(); ++k)
    {
        const auto &r = spec.resonances[k];
        const std::string which = "resonance " + std::to_string(k);
        if (!(r.fwhm_pm > 0.0) || !std::isfinite(r.fwhm_pm))
        {
            throw Error(ErrorKind::Validation, which + ": fwhm must be positive");
        }
        if (!(r.depth > 0.0 && r.depth <= 1.0))
        {
            throw Error(ErrorKind::Validation, which + ": depth must lie in (0, 1]");
        }
        if (!(r.center_wavelength_nm >= g.start_nm && r.center_wavelength_nm <= g.stop_nm))
        {
            throw Error(ErrorKind::Validation, which + ": center outside the grid span");
        }
    }
}

double synthetic_model(const SyntheticSpec &spec, double wavelength_nm)
{
    double dip = 0.0;
    for (const auto &r : spec.resonances)
    {
        const double half = 0.5 * r.fwhm_pm * 1e-3;
        const double u = wavelength_nm - r.center_wavelength_nm;
        dip += r.depth * half * half / (u * u + half * half);
    }
    return spec.baseline * (1.0 - dip);
}

SpectrumTrace generate_synthetic(const SyntheticSpec &spec)
{
    validate(spec);
    const auto &g = spec.grid;
    SpectrumTrace trace;
    trace.wavelength_nm.resize(g.samples);
    trace.transmission.resize(g.samples);
    const double step = (g.stop_nm - g.start_nm) / static_cast<double>(g.samples - 1);
    for (std::size_t i = 0; i < g.samples; ++i)
    {
        trace.wavelength_nm[i] = i + 1 == g.samples ? g.stop_nm : g.start_nm + step * static_cast<double>(i);
    }

    // Only resonances within ~1e4 half-widths contribute above 1e-8 relative;
    // evaluating all of them everywhere is still cheap enough for sweeps of 1e5-1e6 points.
    for (std::size_t i = 0; i < g.samples; ++i)
    {
        const double t = synthetic_model(spec, trace.wavelength_nm[i]);
        if (t < 0.0)
        {
            throw Error(ErrorKind::Validation,
                        "overlapping resonances drive transmission below zero near " +
                            std::to_string(trace.wavelength_nm[i]) + " nm; use smaller depths");
        }
        trace.transmission[i] = t;
    }

    std::size_t clamped = 0;
    if (spec.noise_sigma > 0.0)
    {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (auto &t : trace.transmission)
        {
            t += noise(rng);
            if (t < 0.0)
            {
                t = 0.0;
                ++clamped;
            }
        }
    }

    trace.meta["source"] = "synthetic";
    trace.meta["seed"] = std::to_string(spec.seed);
    trace.meta["resonances"] = std::to_string(spec.resonances.size());
    if (clamped > 0)
    {
        trace.meta["clamped_samples"] = std::to_string(clamped);
    }
    return trace;
}

void to_json(nlohmann::json &j, const SyntheticResonance &r)
{
    j = nlohmann::json{{"center_wavelength_nm", r.center_wavelength_nm}, {"fwhm_pm", r.fwhm_pm}, {"depth", r.depth}};
}

void from_json(const nlohmann::json &j, SyntheticResonance &r)
{
    j.at("center_wavelength_nm").get_to(r.center_wavelength_nm);
    j.at("fwhm_pm").get_to(r.fwhm_pm);
    j.at("depth").get_to(r.depth);
}

void to_json(nlohmann::json &j, const SyntheticGrid &g)
{
    j = nlohmann::json{{"start_nm", g.start_nm}, {"stop_nm", g.stop_nm}, {"samples", g.samples}};
}

void from_json(const nlohmann::json &j, SyntheticGrid &g)
{
    j.at("start_nm").get_to(g.start_nm);
    j.at("stop_nm").get_to(g.stop_nm);
    j.at("samples").get_to(g.samples);
}

void to_json(nlohmann::json &j, const SyntheticSpec &s)
{
    j = nlohmann::json{{"resonances", s.resonances},
                       {"baseline", s.baseline},
                       {"noise_sigma", s.noise_sigma},
                       {"grid", s.grid},
                       {"seed", s.seed}};
}

void from_json(const nlohmann::json &j, SyntheticSpec &s)
{
    j.at("resonances").get_to(s.resonances);
    j.at("baseline").get_to(s.baseline);
    j.at("noise_sigma").get_to(s.noise_sigma);
    j.at("grid").get_to(s.grid);
    j.at("seed").get_to(s.seed);
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorKind::MalformedInput, "cannot open " + path.string());
    }
    try
    {
        auto spec = nlohmann::json::parse(in).get<SyntheticSpec>();
        validate(spec);
        return spec;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorKind::Validation, path.string() + ": " + e.what());
    }
}

} // namespace ringkit
