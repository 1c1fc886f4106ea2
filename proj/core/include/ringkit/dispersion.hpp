#ifndef RINGKIT_DISPERSION_HPP
#define RINGKIT_DISPERSION_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "ringkit/resonance_analysis.hpp"

namespace ringkit
{

struct LadderEntry
{
    double omega = 0.0; // rad/s
    double gamma = 0.0; // rad/s, FWHM
    std::optional<std::size_t> dip_index; // position in the source ResonanceSet
};

// Resonances indexed by relative mode number; mu = 0 is the pump mode and
// omega increases with mu (shorter wavelength).
struct ModeLadder
{
    std::map<int, LadderEntry> entries;

    bool contains(int mu) const { return entries.count(mu) != 0; }
    const LadderEntry &at(int mu) const;
    double pump_omega() const { return at(0).omega; }
    int mu_min() const { return entries.begin()->first; }
    int mu_max() const { return entries.rbegin()->first; }
    std::size_t size() const { return entries.size(); }
};

void validate(const ModeLadder &ladder);

// Exact ladder omega_mu = omega0 + mu d1 + sum_k d_k mu^k / k! (k >= 2), for fixtures and tests.
// `coefficients` holds d2, d3, ... in rad/s.
ModeLadder make_polynomial_ladder(double omega0, double d1, const std::vector<double> &coefficients, int mu_min,
                                  int mu_max, double gamma);

ModeLadder build_mode_ladder(const ResonanceSet &set, double pump_wavelength_nm);

// D_int(mu) = omega_mu - (omega_0 + mu d1), rad/s.
std::map<int, double> integrated_dispersion(const ModeLadder &ladder, double d1);

struct DispersionFit
{
    double d1 = 0.0; // rad/s
    double d2 = 0.0;
    double d3 = 0.0;
    std::vector<double> coefficients; // d1 .. d_order
    double rms_residual = 0.0;        // rad/s
    int fit_order = 3;
    int mu_min = 0;
    int mu_max = 0;

    // D_int predicted by the fitted polynomial (d2 and higher), rad/s.
    double dint(int mu) const;
    // omega_mu - omega_0 predicted by the full polynomial, rad/s.
    double offset(int mu) const;
};

DispersionFit fit_dispersion(const ModeLadder &ladder, int order = 3);

struct MismatchCrossover
{
    // Largest M with |D_int(mu)| below the linewidth for every 1 <= |mu| <= M.
    int per_mode = 0;
    // Same test applied to |D_int(mu) + D_int(-mu)|.
    int pair_sum = 0;
};

MismatchCrossover mismatch_crossover(const DispersionFit &fit, double linewidth_rad_s, int mu_limit);

} // namespace ringkit

#endif // RINGKIT_DISPERSION_HPP
