#ifndef RINGKIT_QUADRATURE_HPP
#define RINGKIT_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace ringkit::quad
{

struct QuadratureOptions
{
    double relative_tolerance = 1e-6;
    double absolute_tolerance = 0.0;
    int max_intervals = 4000;
};

struct QuadratureResult
{
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. Throws IntegrationError
// when the tolerance is not met within max_intervals.
QuadratureResult integrate(const Integrand &f, double a, double b, const QuadratureOptions &options = {});

// Integral over the whole real line. `breakpoints` (sorted, at least one)
// split the finite core; the two tails beyond the outer breakpoints are mapped
// onto (0, 1] with length scale `tail_scale`. All pieces share one error budget.
QuadratureResult integrate_real_line(const Integrand &f, std::vector<double> breakpoints, double tail_scale,
                                     const QuadratureOptions &options = {});

} // namespace ringkit::quad

#endif // RINGKIT_QUADRATURE_HPP
