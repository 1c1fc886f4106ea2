#include "ringkit/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "ringkit/errors.hpp"
#include "ringkit/units.hpp"

namespace ringkit
{

namespace
{

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i)
    {
        f *= i;
    }
    return f;
}

double median_of(std::vector<double> v)
{
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0)
    {
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    }
    return m;
}

} // namespace

const LadderEntry &ModeLadder::at(int mu) const
{
    const auto it = entries.find(mu);
    if (it == entries.end())
    {
        throw Error(ErrorKind::IncompleteLadder, "ladder has no mode mu=" + std::to_string(mu));
    }
    return it->second;
}

void validate(const ModeLadder &ladder)
{
    if (ladder.entries.empty())
    {
        throw Error(ErrorKind::Validation, "empty mode ladder");
    }
    if (!ladder.contains(0))
    {
        throw Error(ErrorKind::IncompleteLadder, "ladder has no pump mode (mu=0)");
    }
    const LadderEntry *previous = nullptr;
    for (const auto &[mu, e] : ladder.entries)
    {
        if (!(e.gamma > 0.0) || !std::isfinite(e.omega))
        {
            throw Error(ErrorKind::Validation, "mode mu=" + std::to_string(mu) + " has invalid frequency or linewidth");
        }
        if (previous != nullptr && !(e.omega > previous->omega))
        {
            throw Error(ErrorKind::Validation, "frequencies must increase with mu (violated at mu=" + std::to_string(mu) + ")");
        }
        previous = &e;
    }
}

ModeLadder make_polynomial_ladder(double omega0, double d1, const std::vector<double> &coefficients, int mu_min,
                                  int mu_max, double gamma)
{
    ModeLadder ladder;
    for (int mu = mu_min; mu <= mu_max; ++mu)
    {
        double offset = mu * d1;
        for (std::size_t k = 0; k < coefficients.size(); ++k)
        {
            const int power = static_cast<int>(k) + 2;
            offset += coefficients[k] * std::pow(static_cast<double>(mu), power) / factorial(power);
        }
        ladder.entries[mu] = LadderEntry{omega0 + offset, gamma, std::nullopt};
    }
    return ladder;
}

ModeLadder build_mode_ladder(const ResonanceSet &set, double pump_wavelength_nm)
{
    if (set.dips.empty())
    {
        throw Error(ErrorKind::InsufficientData, "no resonances to build a ladder from");
    }
    const std::size_t n = set.dips.size();
    std::vector<double> omega(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        omega[i] = units::to_angular(set.dips[i].center_frequency);
    }
    const double pump_omega = units::wavelength_nm_to_angular(pump_wavelength_nm);

    std::size_t pump_index = 0;
    for (std::size_t i = 1; i < n; ++i)
    {
        if (std::abs(omega[i] - pump_omega) < std::abs(omega[pump_index] - pump_omega))
        {
            pump_index = i;
        }
    }
    const double omega0 = omega[pump_index];

    // Spacings between neighbours in set order (decreasing frequency).
    std::vector<double> spacing;
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        spacing.push_back(std::abs(omega[i] - omega[i + 1]));
    }

    const double distance = std::abs(omega0 - pump_omega);
    if (spacing.empty())
    {
        const double gamma = units::to_angular(set.dips[pump_index].fwhm_frequency);
        if (distance > 10.0 * gamma)
        {
            throw Error(ErrorKind::PumpNotResonant, "pump is more than 10 linewidths from the only resonance");
        }
    }
    else if (distance > 0.25 * median_of(spacing))
    {
        std::ostringstream os;
        os << "no resonance within a quarter FSR of " << pump_wavelength_nm << " nm";
        throw Error(ErrorKind::PumpNotResonant, os.str());
    }

    ModeLadder ladder;
    std::map<int, std::size_t> owner;
    for (std::size_t i = 0; i < n; ++i)
    {
        int mu = 0;
        if (i != pump_index)
        {
            // Local FSR: median of the spacings among dips within +-5 positions.
            const std::size_t lo = i >= 5 ? i - 5 : 0;
            const std::size_t hi = std::min(n - 1, i + 5);
            std::vector<double> local(spacing.begin() + static_cast<std::ptrdiff_t>(lo),
                                      spacing.begin() + static_cast<std::ptrdiff_t>(hi));
            const double fsr = median_of(local);
            mu = static_cast<int>(std::lround((omega[i] - omega0) / fsr));
        }
        if (const auto it = owner.find(mu); it != owner.end())
        {
            std::ostringstream os;
            os << "dips " << it->second << " (" << set.dips[it->second].center_wavelength << " nm) and " << i << " ("
               << set.dips[i].center_wavelength << " nm) both map to mu=" << mu;
            throw Error(ErrorKind::AmbiguousLadder, os.str());
        }
        owner[mu] = i;
        ladder.entries[mu] = LadderEntry{omega[i], units::to_angular(set.dips[i].fwhm_frequency), i};
    }

    const LadderEntry *previous = nullptr;
    for (const auto &[mu, e] : ladder.entries)
    {
        if (previous != nullptr && !(e.omega > previous->omega))
        {
            throw Error(ErrorKind::AmbiguousLadder, "mode index assignment is not monotone at mu=" + std::to_string(mu));
        }
        previous = &e;
    }
    return ladder;
}

std::map<int, double> integrated_dispersion(const ModeLadder &ladder, double d1)
{
    if (!(d1 > 0.0))
    {
        throw Error(ErrorKind::Domain, "d1 must be positive");
    }
    const double omega0 = ladder.pump_omega();
    std::map<int, double> dint;
    for (const auto &[mu, e] : ladder.entries)
    {
        dint[mu] = mu == 0 ? 0.0 : (e.omega - omega0) - mu * d1;
    }
    return dint;
}

double DispersionFit::dint(int mu) const
{
    double value = 0.0;
    for (std::size_t k = 1; k < coefficients.size(); ++k)
    {
        const int power = static_cast<int>(k) + 1;
        value += coefficients[k] * std::pow(static_cast<double>(mu), power) / factorial(power);
    }
    return value;
}

double DispersionFit::offset(int mu) const
{
    return mu * d1 + dint(mu);
}

DispersionFit fit_dispersion(const ModeLadder &ladder, int order)
{
    if (order < 2)
    {
        throw Error(ErrorKind::Parameter, "fit order must be at least 2");
    }
    if (ladder.entries.empty() || !ladder.contains(0))
    {
        throw Error(ErrorKind::IncompleteLadder, "ladder has no pump mode (mu=0)");
    }
    if (ladder.mu_min() >= 0 || ladder.mu_max() <= 0)
    {
        throw Error(ErrorKind::IllConditioned, "modes must span both signs of mu");
    }
    const auto rows = static_cast<Eigen::Index>(ladder.size());
    if (ladder.size() < static_cast<std::size_t>(order) + 2)
    {
        throw Error(ErrorKind::InsufficientData,
                    "order " + std::to_string(order) + " needs at least " + std::to_string(order + 2) + " modes");
    }

    const double omega0 = ladder.pump_omega();
    Eigen::MatrixXd design(rows, order);
    Eigen::VectorXd target(rows);
    Eigen::Index r = 0;
    for (const auto &[mu, e] : ladder.entries)
    {
        for (int k = 1; k <= order; ++k)
        {
            design(r, k - 1) = std::pow(static_cast<double>(mu), k) / factorial(k);
        }
        target[r] = e.omega - omega0;
        ++r;
    }

    // Column equilibration before the rank-revealing QR.
    Eigen::VectorXd column_scale = design.colwise().norm().transpose();
    for (Eigen::Index k = 0; k < column_scale.size(); ++k)
    {
        if (!(column_scale[k] > 0.0))
        {
            throw Error(ErrorKind::IllConditioned, "design column " + std::to_string(k + 1) + " is zero");
        }
    }
    const Eigen::MatrixXd scaled = design * column_scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-12);
    if (qr.rank() < order)
    {
        throw Error(ErrorKind::IllConditioned, "design matrix is rank deficient");
    }
    const Eigen::VectorXd solution = qr.solve(target).cwiseQuotient(column_scale);
    DispersionFit fit;
    fit.fit_order = order;
    fit.coefficients.assign(solution.data(), solution.data() + solution.size());
    fit.d1 = solution[0];
    fit.d2 = solution[1];
    fit.d3 = order >= 3 ? solution[2] : 0.0;
    // Residuals come from the same evaluation path callers use, not the design product.
    double sum = 0.0;
    for (const auto &[mu, e] : ladder.entries)
    {
        const double r = (e.omega - omega0) - fit.offset(mu);
        sum += r * r;
    }
    fit.rms_residual = std::sqrt(sum / static_cast<double>(rows));
    fit.mu_min = ladder.mu_min();
    fit.mu_max = ladder.mu_max();
    if (!(fit.d1 > 0.0))
    {
        throw Error(ErrorKind::IllConditioned, "fitted D1 is not positive");
    }
    return fit;
}

MismatchCrossover mismatch_crossover(const DispersionFit &fit, double linewidth_rad_s, int mu_limit)
{
    MismatchCrossover out;
    bool per_mode_open = true;
    bool pair_open = true;
    for (int mu = 1; mu <= mu_limit && (per_mode_open || pair_open); ++mu)
    {
        const double plus = fit.dint(mu);
        const double minus = fit.dint(-mu);
        if (per_mode_open && std::abs(plus) < linewidth_rad_s && std::abs(minus) < linewidth_rad_s)
        {
            out.per_mode = mu;
        }
        else
        {
            per_mode_open = false;
        }
        if (pair_open && std::abs(plus + minus) < linewidth_rad_s)
        {
            out.pair_sum = mu;
        }
        else
        {
            pair_open = false;
        }
    }
    return out;
}

} // namespace ringkit
