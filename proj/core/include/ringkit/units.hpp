#ifndef RINGKIT_UNITS_HPP
#define RINGKIT_UNITS_HPP

#include <numbers>

namespace ringkit::units
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Internal frequencies are angular (rad/s); reports divide by 2*pi.
constexpr double to_angular(double hz) { return kTwoPi * hz; }
constexpr double to_hz(double rad_per_s) { return rad_per_s / kTwoPi; }

constexpr double wavelength_nm_to_hz(double nm) { return kSpeedOfLight / (nm * 1e-9); }
constexpr double hz_to_wavelength_nm(double hz) { return kSpeedOfLight / hz * 1e9; }

constexpr double wavelength_nm_to_angular(double nm) { return to_angular(wavelength_nm_to_hz(nm)); }
constexpr double angular_to_wavelength_nm(double rad_per_s) { return hz_to_wavelength_nm(to_hz(rad_per_s)); }

constexpr double pm_to_nm(double pm) { return pm * 1e-3; }
constexpr double nm_to_pm(double nm) { return nm * 1e3; }

} // namespace ringkit::units

#endif // RINGKIT_UNITS_HPP
