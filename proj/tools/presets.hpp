#ifndef RINGKIT_TOOLS_PRESETS_HPP
#define RINGKIT_TOOLS_PRESETS_HPP

#include <cstdint>

#include "ringkit/spectral_io.hpp"

namespace ringkit::presets
{

// 150-GHz-class silicon nitride ring: 94 resonances (mu = -47..46) on a
// 145 GHz grid around a 1550.63 nm pump with D2/2pi = 0.71 MHz and
// D3/2pi = 6.37 kHz, loaded Q drawn uniformly in [0.5e6, 1.7e6], swept
// 1480-1640 nm at 1 pm.
struct DeviceParameters
{
    double pump_wavelength_nm = 1550.63;
    double fsr_hz = 145e9;
    double d2_hz = 0.71e6;
    double d3_hz = 6.37e3;
    int mu_min = -47;
    int mu_max = 46;
    double q_min = 0.5e6;
    double q_max = 1.7e6;
    double depth_min = 0.5;
    double depth_max = 0.9;
    double start_nm = 1480.0;
    double stop_nm = 1640.0;
    std::size_t samples = 160001;
    double noise_sigma = 0.0;
};

SyntheticSpec reference_ring_spec(std::uint64_t seed, const DeviceParameters &device = {});

} // namespace ringkit::presets

#endif // RINGKIT_TOOLS_PRESETS_HPP
