#include "presets.hpp"

#include <random>

#include "ringkit/units.hpp"

namespace ringkit::presets
{

SyntheticSpec reference_ring_spec(std::uint64_t seed, const DeviceParameters &device)
{
    SyntheticSpec spec;
    spec.baseline = 1.0;
    spec.noise_sigma = device.noise_sigma;
    spec.grid = {device.start_nm, device.stop_nm, device.samples};
    spec.seed = seed;

    // Uniform draws from raw engine output so the sequence does not depend on
    // the standard library's distribution implementation.
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng](double lo, double hi) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    };

    const double f0 = units::wavelength_nm_to_hz(device.pump_wavelength_nm);
    for (int mu = device.mu_min; mu <= device.mu_max; ++mu)
    {
        const double m = mu;
        const double f = f0 + m * device.fsr_hz + 0.5 * device.d2_hz * m * m + device.d3_hz * m * m * m / 6.0;
        const double wavelength = units::hz_to_wavelength_nm(f);
        const double q = uniform(device.q_min, device.q_max);
        const double depth = uniform(device.depth_min, device.depth_max);
        spec.resonances.push_back({wavelength, units::nm_to_pm(wavelength / q), depth});
    }
    return spec;
}

} // namespace ringkit::presets
