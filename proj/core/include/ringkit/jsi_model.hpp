#ifndef RINGKIT_JSI_MODEL_HPP
#define RINGKIT_JSI_MODEL_HPP

#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "ringkit/dispersion.hpp"
#include "ringkit/quadrature.hpp"

namespace ringkit
{

enum class PumpModel
{
    Delta,
    Lorentzian,
};

struct PumpLine
{
    double center = 0.0;    // rad/s
    double linewidth = 0.0; // rad/s, FWHM; ignored for Delta
    PumpModel model = PumpModel::Delta;
};

struct NonlinearPhaseParams
{
    double round_trip_time = 0.0;   // s
    double kerr_coefficient = 0.0;  // rad/W
    double intracavity_power = 0.0; // W

    double self_phase() const { return kerr_coefficient * intracavity_power; }
};

void validate(const PumpLine &pump);
void validate(const NonlinearPhaseParams &params);

// Round-trip time from the angular FSR: tau = 2 pi / D1.
double round_trip_time_from_d1(double d1);

// |A(omega)|^2 = gamma / ((gamma/2)^2 + (omega - center)^2).
double lorentzian_density(double omega, double center, double gamma);

// Delta phi = D_int(mu) tau + D_int(-mu) tau + Gamma P.
double phase_mismatch(int mu, const std::map<int, double> &dint, const NonlinearPhaseParams &params);

double sinc_sq(double x);

struct OverlapOptions
{
    double relative_tolerance = 1e-6;
    double core_half_width = 40.0; // in units of the wider linewidth
    int max_intervals = 4000;
};

// Integral over Omega of |A_1(omega_p + Omega)|^2 |A_2(omega_p - Omega)|^2 where
// the resonances sit such that omega_1 + omega_2 - 2 omega_p = delta.
double lorentzian_pair_integral(double delta, double gamma1, double gamma2, const OverlapOptions &options = {});

// Energy-conservation overlap for the (+mu, -mu) pair with a monochromatic
// pump at pump.center.
double pair_overlap(int mu, const ModeLadder &ladder, const PumpLine &pump, const OverlapOptions &options = {});

// Overlap averaged over the pump lineshape (outer integral); equals
// pair_overlap for a Delta pump or zero linewidth.
double pumped_pair_overlap(int mu, const ModeLadder &ladder, const PumpLine &pump, const OverlapOptions &options = {});

struct JsiEntry
{
    int mu = 0;
    double c_raw = 0.0;
    double c_normalized = 0.0;
    double sinc_sq = 0.0;
    double overlap = 0.0;
    double delta_phi = 0.0;
    double efficiency = 1.0; // eta_mu * eta_-mu
};

struct JsiDiagonal
{
    std::vector<JsiEntry> entries; // increasing mu, mu >= 1
    std::map<int, double> channel_efficiencies;
    double peak = 0.0;

    const JsiEntry *find(int mu) const;
};

struct JsiOptions
{
    std::optional<int> mu_min; // default 1
    std::optional<int> mu_max; // default: largest mu with both +-mu present
    // Linear term subtracted when forming D_int; the +-mu sum does not depend on it.
    std::optional<double> d1;
    OverlapOptions quadrature;
};

JsiDiagonal jsi_diagonal(const ModeLadder &ladder, const PumpLine &pump, const NonlinearPhaseParams &params,
                         const std::map<int, double> &efficiencies = {}, const JsiOptions &options = {});

// Rectangular (signal mu, idler mu) matrix over the diagonal's mu range.
struct JsiMap
{
    int mu_min = 0;
    int mu_max = 0;
    double floor = 0.0;
    std::vector<double> values; // row-major, row = signal mu, column = idler mu

    int extent() const { return mu_max - mu_min + 1; }
    std::size_t size() const { return values.size(); }
    double at(int signal_mu, int idler_mu) const;
};

JsiMap jsi_map(const JsiDiagonal &diagonal, double floor);

void write_jsi_map_csv(std::ostream &out, const JsiMap &map);

} // namespace ringkit

#endif // RINGKIT_JSI_MODEL_HPP
