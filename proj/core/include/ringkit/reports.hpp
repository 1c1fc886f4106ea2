#ifndef RINGKIT_REPORTS_HPP
#define RINGKIT_REPORTS_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "ringkit/coincidence_stats.hpp"
#include "ringkit/dispersion.hpp"
#include "ringkit/jsi_model.hpp"
#include "ringkit/resonance_analysis.hpp"

namespace ringkit::report
{

using Json = nlohmann::ordered_json;

inline constexpr int kSignificantDigits = 15;

double round_significant(double value, int digits = kSignificantDigits);

// Rounds every float in the tree and serializes with a fixed layout; the
// output is byte-identical for identical inputs.
std::string dump(Json document);
void write_json(const std::filesystem::path &path, const Json &document);
Json read_json(const std::filesystem::path &path);

Json resonance_report(const ResonanceSet &set, std::optional<WavelengthRange> fsr_window = std::nullopt);
ResonanceSet resonance_set_from_report(const Json &document);

Json ladder_document(const ModeLadder &ladder);
ModeLadder ladder_from_document(const Json &document);

Json dispersion_report(const DispersionFit &fit, const ModeLadder &ladder,
                       std::optional<double> mean_linewidth_rad_s = std::nullopt);
// Reads back the angular coefficients from a dispersion report.
DispersionFit dispersion_from_report(const Json &document);

Json jsi_report(const JsiDiagonal &diagonal, const NonlinearPhaseParams &params, const PumpLine &pump);
JsiDiagonal jsi_from_report(const Json &document);

Json correlation_report(const CorrelationReport &report, std::span<const AccidentalCorrected> per_mode,
                        const LossBudget &budget, double coincidence_window_s);

} // namespace ringkit::report

#endif // RINGKIT_REPORTS_HPP
