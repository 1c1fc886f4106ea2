#include "ringkit/jsi_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "ringkit/errors.hpp"
#include "ringkit/units.hpp"

namespace ringkit
{

void validate(const PumpLine &pump)
{
    if (!std::isfinite(pump.center))
    {
        throw Error(ErrorKind::Validation, "pump center must be finite");
    }
    if (!(pump.linewidth >= 0.0))
    {
        throw Error(ErrorKind::Validation, "pump linewidth must be non-negative");
    }
}

void validate(const NonlinearPhaseParams &params)
{
    if (!(params.round_trip_time > 0.0))
    {
        throw Error(ErrorKind::Validation, "round-trip time must be positive");
    }
    if (!(params.kerr_coefficient >= 0.0) || !(params.intracavity_power >= 0.0))
    {
        throw Error(ErrorKind::Validation, "Kerr coefficient and intracavity power must be non-negative");
    }
}

double round_trip_time_from_d1(double d1)
{
    if (!(d1 > 0.0))
    {
        throw Error(ErrorKind::Domain, "d1 must be positive");
    }
    return units::kTwoPi / d1;
}

double lorentzian_density(double omega, double center, double gamma)
{
    if (!(gamma > 0.0))
    {
        throw Error(ErrorKind::Domain, "linewidth must be positive");
    }
    const double half = 0.5 * gamma;
    const double u = omega - center;
    return gamma / (half * half + u * u);
}

double phase_mismatch(int mu, const std::map<int, double> &dint, const NonlinearPhaseParams &params)
{
    const auto plus = dint.find(mu);
    const auto minus = dint.find(-mu);
    if (plus == dint.end() || minus == dint.end())
    {
        throw Error(ErrorKind::IncompleteLadder, "D_int missing for mu=+-" + std::to_string(mu));
    }
    return plus->second * params.round_trip_time + minus->second * params.round_trip_time + params.self_phase();
}

double sinc_sq(double x)
{
    if (x == 0.0)
    {
        return 1.0;
    }
    if (std::abs(x) < 1e-4)
    {
        const double x2 = x * x;
        const double s = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
        return s * s;
    }
    const double s = std::sin(x) / x;
    return s * s;
}

double lorentzian_pair_integral(double delta, double gamma1, double gamma2, const OverlapOptions &options)
{
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
    {
        throw Error(ErrorKind::Domain, "linewidths must be positive");
    }
    // Centered variable u = Omega - Omega_c measured in units of the wider
    // linewidth; the two Lorentzian peaks sit at u = +-delta/2.
    const double scale = std::max(gamma1, gamma2);
    const double half_delta = 0.5 * delta / scale;
    const double g1 = gamma1 / scale;
    const double g2 = gamma2 / scale;
    const auto integrand = [=](double v) {
        const double a = v - half_delta;
        const double b = v + half_delta;
        return (g1 / (0.25 * g1 * g1 + a * a)) * (g2 / (0.25 * g2 * g2 + b * b));
    };
    const double lo = -std::abs(half_delta);
    const double hi = std::abs(half_delta);
    const double core = options.core_half_width;
    quad::QuadratureOptions q;
    q.relative_tolerance = options.relative_tolerance;
    q.max_intervals = options.max_intervals;
    const auto result = quad::integrate_real_line(integrand, {lo - core, lo, hi, hi + core}, 1.0, q);
    // d Omega = scale du and each density carries 1/scale.
    return result.value / (scale * scale) * scale;
}

namespace
{

double mode_mismatch(int mu, const ModeLadder &ladder, double pump_center)
{
    const auto &plus = ladder.at(mu);
    const auto &minus = ladder.at(-mu);
    return (plus.omega - pump_center) + (minus.omega - pump_center);
}

} // namespace

double pair_overlap(int mu, const ModeLadder &ladder, const PumpLine &pump, const OverlapOptions &options)
{
    validate(pump);
    const auto &plus = ladder.at(mu);
    const auto &minus = ladder.at(-mu);
    return lorentzian_pair_integral(mode_mismatch(mu, ladder, pump.center), plus.gamma, minus.gamma, options);
}

double pumped_pair_overlap(int mu, const ModeLadder &ladder, const PumpLine &pump, const OverlapOptions &options)
{
    validate(pump);
    if (pump.model == PumpModel::Delta || pump.linewidth == 0.0)
    {
        return pair_overlap(mu, ladder, pump, options);
    }
    const auto &plus = ladder.at(mu);
    const auto &minus = ladder.at(-mu);
    const double delta0 = mode_mismatch(mu, ladder, pump.center);
    const double half = 0.5 * pump.linewidth;
    const double scale = std::max({half, plus.gamma, minus.gamma});

    OverlapOptions inner = options;
    inner.relative_tolerance = 0.1 * options.relative_tolerance;
    // x = omega_p - pump center, in units of `scale`; the mismatch becomes delta0 - 2x.
    const auto integrand = [&](double v) {
        const double x = v * scale;
        const double g = (half / std::numbers::pi) / (half * half + x * x);
        return g * lorentzian_pair_integral(delta0 - 2.0 * x, plus.gamma, minus.gamma, inner) * scale;
    };
    const double peak = 0.5 * delta0 / scale;
    const double core = options.core_half_width;
    quad::QuadratureOptions q;
    q.relative_tolerance = 0.5 * options.relative_tolerance;
    q.max_intervals = options.max_intervals;
    const auto lo = std::min(0.0, peak);
    const auto hi = std::max(0.0, peak);
    return quad::integrate_real_line(integrand, {lo - core, lo, hi, hi + core}, 1.0, q).value;
}

const JsiEntry *JsiDiagonal::find(int mu) const
{
    const auto it = std::lower_bound(entries.begin(), entries.end(), mu,
                                     [](const JsiEntry &e, int m) { return e.mu < m; });
    return it != entries.end() && it->mu == mu ? &*it : nullptr;
}

JsiDiagonal jsi_diagonal(const ModeLadder &ladder, const PumpLine &pump, const NonlinearPhaseParams &params,
                         const std::map<int, double> &efficiencies, const JsiOptions &options)
{
    validate(ladder);
    validate(pump);
    validate(params);
    for (const auto &[mu, eta] : efficiencies)
    {
        if (!(eta > 0.0 && eta <= 1.0))
        {
            throw Error(ErrorKind::Validation, "efficiency for mu=" + std::to_string(mu) + " outside (0, 1]");
        }
    }

    const int mu_min = options.mu_min.value_or(1);
    int mu_max = 0;
    if (options.mu_max)
    {
        mu_max = *options.mu_max;
    }
    else
    {
        for (int mu = mu_min; ladder.contains(mu) && ladder.contains(-mu); ++mu)
        {
            mu_max = mu;
        }
    }
    if (mu_min < 1 || mu_max < mu_min)
    {
        throw Error(ErrorKind::IncompleteLadder, "ladder does not cover the requested mode range on both sides");
    }

    const double d1 = options.d1.value_or((ladder.at(ladder.mu_max()).omega - ladder.at(ladder.mu_min()).omega) /
                                          std::max(1, ladder.mu_max() - ladder.mu_min()));
    const auto dint = integrated_dispersion(ladder, d1);
    const auto eta = [&](int mu) {
        const auto it = efficiencies.find(mu);
        return it == efficiencies.end() ? 1.0 : it->second;
    };

    JsiDiagonal out;
    out.channel_efficiencies = efficiencies;
    for (int mu = mu_min; mu <= mu_max; ++mu)
    {
        if (!ladder.contains(mu) || !ladder.contains(-mu))
        {
            throw Error(ErrorKind::IncompleteLadder, "ladder is missing mu=+-" + std::to_string(mu));
        }
        JsiEntry e;
        e.mu = mu;
        e.delta_phi = phase_mismatch(mu, dint, params);
        e.sinc_sq = sinc_sq(e.delta_phi);
        e.overlap = pumped_pair_overlap(mu, ladder, pump, options.quadrature);
        e.efficiency = eta(mu) * eta(-mu);
        e.c_raw = e.efficiency * e.sinc_sq * e.overlap;
        out.entries.push_back(e);
    }
    for (const auto &e : out.entries)
    {
        out.peak = std::max(out.peak, e.c_raw);
    }
    for (auto &e : out.entries)
    {
        e.c_normalized = out.peak > 0.0 ? e.c_raw / out.peak : 0.0;
    }
    return out;
}

double JsiMap::at(int signal_mu, int idler_mu) const
{
    if (signal_mu < mu_min || signal_mu > mu_max || idler_mu < mu_min || idler_mu > mu_max)
    {
        throw Error(ErrorKind::Parameter, "JSI map index outside window");
    }
    const auto row = static_cast<std::size_t>(signal_mu - mu_min);
    const auto col = static_cast<std::size_t>(idler_mu - mu_min);
    return values[row * static_cast<std::size_t>(extent()) + col];
}

JsiMap jsi_map(const JsiDiagonal &diagonal, double floor)
{
    if (!(floor >= 0.0))
    {
        throw Error(ErrorKind::Parameter, "floor must be non-negative");
    }
    if (diagonal.entries.empty())
    {
        throw Error(ErrorKind::InsufficientData, "empty JSI diagonal");
    }
    JsiMap map;
    map.floor = floor;
    map.mu_min = diagonal.entries.front().mu;
    map.mu_max = diagonal.entries.back().mu;
    const auto n = static_cast<std::size_t>(map.extent());
    map.values.assign(n * n, floor);
    for (const auto &e : diagonal.entries)
    {
        const auto k = static_cast<std::size_t>(e.mu - map.mu_min);
        map.values[k * n + k] = e.c_raw + floor;
    }
    return map;
}

void write_jsi_map_csv(std::ostream &out, const JsiMap &map)
{
    char buf[32];
    out << "signal_mu\\idler_mu";
    for (int mu = map.mu_min; mu <= map.mu_max; ++mu)
    {
        out << ',' << mu;
    }
    out << '\n';
    for (int s = map.mu_min; s <= map.mu_max; ++s)
    {
        out << s;
        for (int i = map.mu_min; i <= map.mu_max; ++i)
        {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), map.at(s, i));
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

} // namespace ringkit
