#ifndef RINGKIT_SPECTRAL_IO_HPP
#define RINGKIT_SPECTRAL_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ringkit
{

// Sampled transmission versus wavelength. Construct through make_trace (or
// the loaders) so the invariants are checked once.
struct SpectrumTrace
{
    std::vector<double> wavelength_nm; // strictly increasing
    std::vector<double> transmission;  // normalized power, >= 0
    std::map<std::string, std::string> meta;

    std::size_t size() const { return wavelength_nm.size(); }
    double mean_step_nm() const;
};

// Throws Error(Validation) if the arrays violate the trace invariants.
void validate(const SpectrumTrace &trace);

SpectrumTrace make_trace(std::vector<double> wavelength_nm, std::vector<double> transmission,
                         std::map<std::string, std::string> meta = {});

struct SyntheticResonance
{
    double center_wavelength_nm = 0.0;
    double fwhm_pm = 0.0;
    double depth = 0.0; // extinction, (0, 1]
};

struct SyntheticGrid
{
    double start_nm = 0.0;
    double stop_nm = 0.0;
    std::size_t samples = 0;
};

struct SyntheticSpec
{
    std::vector<SyntheticResonance> resonances;
    double baseline = 1.0;
    double noise_sigma = 0.0;
    SyntheticGrid grid;
    std::uint64_t seed = 0;
};

void validate(const SyntheticSpec &spec);

enum class SpectrumFormat
{
    Csv,
};

// Two numeric columns (wavelength_nm, transmission). '#' lines and an optional
// non-numeric header row are skipped. Rows are sorted by wavelength.
SpectrumTrace load_spectrum(const std::filesystem::path &path, SpectrumFormat format = SpectrumFormat::Csv);
SpectrumTrace parse_spectrum_csv(std::istream &in);

// Writes shortest round-trip decimal representations, so reloading is bitwise exact.
void write_spectrum_csv(std::ostream &out, const SpectrumTrace &trace);
void save_spectrum(const std::filesystem::path &path, const SpectrumTrace &trace);

// Divides by a reference sweep, linearly interpolated onto the trace grid.
SpectrumTrace normalize_by_reference(const SpectrumTrace &trace, const SpectrumTrace &reference);

// Lorentzian dips on a constant baseline plus additive Gaussian noise.
// Deterministic for a given seed.
SpectrumTrace generate_synthetic(const SyntheticSpec &spec);

// Noise-free model value at one wavelength.
double synthetic_model(const SyntheticSpec &spec, double wavelength_nm);

void to_json(nlohmann::json &j, const SyntheticResonance &r);
void from_json(const nlohmann::json &j, SyntheticResonance &r);
void to_json(nlohmann::json &j, const SyntheticGrid &g);
void from_json(const nlohmann::json &j, SyntheticGrid &g);
void to_json(nlohmann::json &j, const SyntheticSpec &s);
void from_json(const nlohmann::json &j, SyntheticSpec &s);

SyntheticSpec load_synthetic_spec(const std::filesystem::path &path);

} // namespace ringkit

#endif // RINGKIT_SPECTRAL_IO_HPP
