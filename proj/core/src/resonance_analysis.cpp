#include "ringkit/resonance_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <set>
#include <thread>

#include "ringkit/errors.hpp"
#include "ringkit/levenberg_marquardt.hpp"
#include "ringkit/units.hpp"

namespace ringkit
{

namespace
{

double median_of(std::vector<double> &scratch)
{
    const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(scratch.size() / 2);
    std::nth_element(scratch.begin(), mid, scratch.end());
    double m = *mid;
    if (scratch.size() % 2 == 0)
    {
        m = 0.5 * (m + *std::max_element(scratch.begin(), mid));
    }
    return m;
}

double median_range(std::span<const double> values)
{
    std::vector<double> scratch(values.begin(), values.end());
    return median_of(scratch);
}

// Rolling median evaluated every `stride` samples and linearly interpolated.
std::vector<double> rolling_median(std::span<const double> values, std::size_t half_width)
{
    const std::size_t n = values.size();
    const std::size_t stride = std::max<std::size_t>(1, half_width / 8);
    std::vector<std::size_t> knots;
    for (std::size_t i = 0; i < n; i += stride)
    {
        knots.push_back(i);
    }
    if (knots.back() != n - 1)
    {
        knots.push_back(n - 1);
    }

    std::vector<double> at_knot(knots.size());
    std::vector<double> scratch;
    for (std::size_t k = 0; k < knots.size(); ++k)
    {
        const std::size_t i = knots[k];
        const std::size_t lo = i > half_width ? i - half_width : 0;
        const std::size_t hi = std::min(n, i + half_width + 1);
        scratch.assign(values.begin() + static_cast<std::ptrdiff_t>(lo), values.begin() + static_cast<std::ptrdiff_t>(hi));
        at_knot[k] = median_of(scratch);
    }

    std::vector<double> out(n);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    {
        const std::size_t a = knots[k];
        const std::size_t b = knots[k + 1];
        for (std::size_t i = a; i < b; ++i)
        {
            const double f = static_cast<double>(i - a) / static_cast<double>(b - a);
            out[i] = at_knot[k] + f * (at_knot[k + 1] - at_knot[k]);
        }
    }
    out[n - 1] = at_knot.back();
    return out;
}

} // namespace

std::vector<IndexWindow> detect_dips(const SpectrumTrace &trace, const DetectOptions &options)
{
    validate(trace);
    if (!(options.min_depth > 0.0 && options.min_depth < 1.0))
    {
        throw Error(ErrorKind::Parameter, "min_depth must lie in (0, 1)");
    }
    if (!(options.min_separation_pm > 0.0))
    {
        throw Error(ErrorKind::Parameter, "min_separation must be positive");
    }
    const double step_nm = trace.mean_step_nm();
    const double min_sep_nm = units::pm_to_nm(options.min_separation_pm);
    if (min_sep_nm < 2.0 * step_nm)
    {
        throw Error(ErrorKind::Parameter, "min_separation is smaller than two grid steps");
    }
    const double fwhm_nm =
        units::pm_to_nm(options.expected_fwhm_pm > 0.0 ? options.expected_fwhm_pm : options.min_separation_pm / 20.0);

    const auto &x = trace.wavelength_nm;
    const auto &t = trace.transmission;
    const std::size_t n = trace.size();
    const auto half_width = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(25.0 * fwhm_nm / step_nm)));
    const auto baseline = rolling_median(t, half_width);

    struct Candidate
    {
        std::size_t index;
        double relative; // T / baseline
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(baseline[i] > 0.0))
        {
            continue;
        }
        const bool left_ok = i == 0 || t[i] <= t[i - 1];
        const bool right_ok = i + 1 == n || t[i] < t[i + 1];
        if (!left_ok || !right_ok)
        {
            continue;
        }
        const double relative = t[i] / baseline[i];
        if (1.0 - relative > options.min_depth)
        {
            candidates.push_back({i, relative});
        }
    }

    // Deepest first; suppress anything within min_separation of an accepted dip.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate &a, const Candidate &b) { return a.relative < b.relative; });
    std::set<std::size_t> accepted;
    for (const auto &c : candidates)
    {
        const auto next = accepted.lower_bound(c.index);
        if (next != accepted.end() && x[*next] - x[c.index] < min_sep_nm)
        {
            continue;
        }
        if (next != accepted.begin() && x[c.index] - x[*std::prev(next)] < min_sep_nm)
        {
            continue;
        }
        accepted.insert(c.index);
    }

    const std::vector<std::size_t> centers(accepted.begin(), accepted.end());
    std::vector<IndexWindow> windows;
    windows.reserve(centers.size());
    const double half_window_nm = 0.5 * min_sep_nm;
    for (std::size_t k = 0; k < centers.size(); ++k)
    {
        const double center = x[centers[k]];
        double lower = center - half_window_nm;
        double upper = center + half_window_nm;
        if (k > 0)
        {
            lower = std::max(lower, 0.5 * (center + x[centers[k - 1]]));
        }
        if (k + 1 < centers.size())
        {
            upper = std::min(upper, 0.5 * (center + x[centers[k + 1]]));
        }
        // Left edge inclusive, right edge exclusive, so adjacent windows never share a sample.
        IndexWindow w;
        w.begin = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), lower) - x.begin());
        w.end = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), upper) - x.begin());
        if (k + 1 == centers.size() || upper >= center + half_window_nm)
        {
            w.end = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), upper) - x.begin());
        }
        w.minimum = centers[k];
        w.begin = std::min(w.begin, w.minimum);
        w.end = std::max(w.end, w.minimum + 1);
        if (!windows.empty())
        {
            w.begin = std::max(w.begin, windows.back().end);
        }
        windows.push_back(w);
    }
    return windows;
}

ResonanceDip make_dip(double center_wavelength_nm, double fwhm_pm, double depth, double baseline, double fit_residual)
{
    ResonanceDip dip;
    dip.center_wavelength = center_wavelength_nm;
    dip.fwhm_wavelength = fwhm_pm;
    dip.depth = depth;
    dip.baseline = baseline;
    dip.fit_residual = fit_residual;
    dip.center_frequency = units::wavelength_nm_to_hz(center_wavelength_nm);
    dip.fwhm_frequency = dip.center_frequency * units::pm_to_nm(fwhm_pm) / center_wavelength_nm;
    dip.q_factor = quality_factor(center_wavelength_nm, fwhm_pm);
    return dip;
}

ResonanceDip fit_lorentzian_dip(const SpectrumTrace &trace, const IndexWindow &window, const FitOptions &options)
{
    if (window.end > trace.size() || window.begin >= window.end)
    {
        throw Error(ErrorKind::Parameter, "window outside the trace");
    }
    if (window.size() < 5)
    {
        throw Error(ErrorKind::Parameter, "window needs at least 5 samples");
    }
    const std::span<const double> xs(trace.wavelength_nm.data() + window.begin, window.size());
    const std::span<const double> ts(trace.transmission.data() + window.begin, window.size());
    const std::size_t m = xs.size();

    const auto min_it = std::min_element(ts.begin(), ts.end());
    const auto imin = static_cast<std::size_t>(min_it - ts.begin());
    if (imin == 0 || imin + 1 == m)
    {
        throw Error(ErrorKind::RejectedFit, "no interior transmission minimum in window");
    }

    // Local coordinates in pm keep the Jacobian well scaled.
    const double reference_nm = xs[imin];
    Eigen::VectorXd offset_pm(static_cast<Eigen::Index>(m));
    Eigen::VectorXd data(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
    {
        offset_pm[static_cast<Eigen::Index>(i)] = units::nm_to_pm(xs[i] - reference_nm);
        data[static_cast<Eigen::Index>(i)] = ts[i];
    }

    const double baseline0 = median_range(ts);
    double depth0 = baseline0 > 0.0 ? 1.0 - ts[imin] / baseline0 : 0.0;
    if (!(depth0 > 0.0))
    {
        throw Error(ErrorKind::RejectedFit, "window minimum is not below the local baseline");
    }
    depth0 = std::min(depth0, 1.0);

    const double half_level = baseline0 * (1.0 - 0.5 * depth0);
    auto crossing = [&](int direction) -> std::optional<double> {
        std::size_t i = imin;
        while (true)
        {
            const std::size_t j = direction < 0 ? i - 1 : i + 1;
            if (ts[j] >= half_level)
            {
                const double f = (half_level - ts[i]) / (ts[j] - ts[i]);
                const auto a = static_cast<Eigen::Index>(i);
                const auto b = static_cast<Eigen::Index>(j);
                return offset_pm[a] + f * (offset_pm[b] - offset_pm[a]);
            }
            i = j;
            if (i == 0 || i + 1 == m)
            {
                return std::nullopt;
            }
        }
    };
    const auto left = crossing(-1);
    const auto right = crossing(+1);
    const double step_pm = units::nm_to_pm((xs.back() - xs.front()) / static_cast<double>(m - 1));
    double width0 = left && right ? *right - *left : 2.0 * step_pm;
    width0 = std::max(width0, 0.5 * step_pm);

    const auto residual_fn = [&](const Eigen::VectorXd &p, Eigen::VectorXd &r, Eigen::MatrixXd *jac) {
        const double center = p[0];
        const double half = 0.5 * p[1];
        const double depth = p[2];
        const double base = p[3];
        const double h2 = half * half;
        for (Eigen::Index i = 0; i < r.size(); ++i)
        {
            const double u = offset_pm[i] - center;
            const double s = u * u + h2;
            const double shape = h2 / s;
            r[i] = base * (1.0 - depth * shape) - data[i];
            if (jac != nullptr)
            {
                const double s2 = s * s;
                (*jac)(i, 0) = -base * depth * 2.0 * u * h2 / s2;
                (*jac)(i, 1) = -base * depth * half * u * u / s2;
                (*jac)(i, 2) = -base * shape;
                (*jac)(i, 3) = 1.0 - depth * shape;
            }
        }
    };

    Eigen::VectorXd initial(4);
    initial << 0.0, width0, depth0, baseline0;
    optim::LmOptions lm;
    lm.max_iterations = options.max_iterations;
    lm.relative_step_tolerance = options.relative_step_tolerance;
    const auto fit = optim::levenberg_marquardt(residual_fn, initial, static_cast<Eigen::Index>(m), lm);
    if (!fit.converged || !fit.params.allFinite())
    {
        throw FitFailureError(fit.rms_residual, fit.iterations);
    }

    const double center_pm = fit.params[0];
    const double width_pm = fit.params[1];
    const double depth = fit.params[2];
    const double base = fit.params[3];
    if (!(width_pm > 0.0))
    {
        throw Error(ErrorKind::RejectedFit, "fitted width is not positive");
    }
    if (!(depth > 0.0 && depth <= 1.0))
    {
        throw Error(ErrorKind::RejectedFit, "fitted depth " + std::to_string(depth) + " outside (0, 1]");
    }
    if (!(base > 0.0))
    {
        throw Error(ErrorKind::RejectedFit, "fitted baseline is not positive");
    }
    const double center_nm = reference_nm + units::pm_to_nm(center_pm);
    if (center_nm < xs.front() || center_nm > xs.back())
    {
        throw Error(ErrorKind::RejectedFit, "fitted center left the window");
    }

    auto dip = make_dip(center_nm, width_pm, depth, base, fit.rms_residual);
    dip.iterations = fit.iterations;
    return dip;
}

std::vector<ResonanceDip> fit_dips(const SpectrumTrace &trace, std::span<const IndexWindow> windows,
                                   const FitOptions &options, bool skip_failures, unsigned threads)
{
    const std::size_t n = windows.size();
    std::vector<std::optional<ResonanceDip>> results(n);
    std::vector<std::exception_ptr> errors(n);

    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n)));

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < n; i += stride)
        {
            try
            {
                results[i] = fit_lorentzian_dip(trace, windows[i], options);
            }
            catch (const Error &)
            {
                errors[i] = std::current_exception();
            }
        }
    };

    if (threads <= 1)
    {
        work(0, 1);
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k)
        {
            pool.emplace_back(work, k, threads);
        }
    }

    std::vector<ResonanceDip> dips;
    dips.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (results[i])
        {
            dips.push_back(*results[i]);
        }
        else if (!skip_failures && errors[i])
        {
            std::rethrow_exception(errors[i]);
        }
    }
    return dips;
}

double quality_factor(double center_wavelength_nm, double fwhm_wavelength_pm)
{
    if (!(center_wavelength_nm > 0.0) || !(fwhm_wavelength_pm > 0.0))
    {
        throw Error(ErrorKind::Domain, "quality factor needs positive wavelength and width");
    }
    return center_wavelength_nm / units::pm_to_nm(fwhm_wavelength_pm);
}

FsrResult free_spectral_range(const ResonanceSet &set, std::optional<WavelengthRange> window)
{
    if (set.dips.size() < 2)
    {
        throw Error(ErrorKind::InsufficientData, "free spectral range needs at least two dips");
    }
    FsrResult out;
    out.per_pair_hz.reserve(set.dips.size() - 1);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < set.dips.size(); ++i)
    {
        const auto &a = set.dips[i];
        const auto &b = set.dips[i + 1];
        const double fsr = a.center_frequency - b.center_frequency;
        out.per_pair_hz.push_back(fsr);
        const auto inside = [&](const ResonanceDip &d) {
            return !window || (d.center_wavelength >= window->lower_nm && d.center_wavelength <= window->upper_nm);
        };
        if (inside(a) && inside(b))
        {
            sum += fsr;
            ++count;
        }
    }
    if (count == 0)
    {
        throw Error(ErrorKind::InsufficientData, "no adjacent dip pair inside the requested window");
    }
    out.mean_hz = sum / static_cast<double>(count);
    return out;
}

QSummary q_statistics(const ResonanceSet &set, double bin_width)
{
    if (set.dips.empty())
    {
        throw Error(ErrorKind::InsufficientData, "Q statistics need at least one dip");
    }
    if (!(bin_width > 0.0))
    {
        throw Error(ErrorKind::Parameter, "histogram bin width must be positive");
    }
    QSummary summary;
    summary.bin_width = bin_width;
    double lo = set.dips.front().q_factor;
    double hi = lo;
    double sum = 0.0;
    for (const auto &d : set.dips)
    {
        lo = std::min(lo, d.q_factor);
        hi = std::max(hi, d.q_factor);
        sum += d.q_factor;
    }
    summary.max = hi;
    summary.mean = sum / static_cast<double>(set.dips.size());

    const double first = std::floor(lo / bin_width) * bin_width;
    const auto bins = static_cast<std::size_t>(std::floor((hi - first) / bin_width)) + 1;
    summary.histogram.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
    {
        summary.histogram[b].lower = first + static_cast<double>(b) * bin_width;
        summary.histogram[b].upper = summary.histogram[b].lower + bin_width;
    }
    for (const auto &d : set.dips)
    {
        auto b = static_cast<std::size_t>(std::floor((d.q_factor - first) / bin_width));
        summary.histogram[std::min(b, bins - 1)].count += 1;
    }
    return summary;
}

ResonanceSet make_resonance_set(std::vector<ResonanceDip> dips, double q_bin_width)
{
    ResonanceSet set;
    set.dips = std::move(dips);
    std::stable_sort(set.dips.begin(), set.dips.end(), [](const ResonanceDip &a, const ResonanceDip &b) {
        return a.center_wavelength < b.center_wavelength;
    });
    if (set.dips.size() >= 2)
    {
        set.fsr_hz = free_spectral_range(set).per_pair_hz;
    }
    if (!set.dips.empty())
    {
        set.q_summary = q_statistics(set, q_bin_width);
    }
    return set;
}

double mean_linewidth_hz(const ResonanceSet &set)
{
    if (set.dips.empty())
    {
        throw Error(ErrorKind::InsufficientData, "no dips");
    }
    double sum = 0.0;
    for (const auto &d : set.dips)
    {
        sum += d.fwhm_frequency;
    }
    return sum / static_cast<double>(set.dips.size());
}

} // namespace ringkit
