#include "ringkit/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>

namespace ringkit::optim
{

LmResult levenberg_marquardt(const ResidualFunction &fn, Eigen::VectorXd params, Eigen::Index residual_count,
                             const LmOptions &options)
{
    const Eigen::Index n = params.size();
    Eigen::VectorXd residual(residual_count);
    Eigen::VectorXd trial_residual(residual_count);
    Eigen::MatrixXd jacobian(residual_count, n);

    fn(params, residual, &jacobian);
    double cost = 0.5 * residual.squaredNorm();
    Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
    Eigen::VectorXd gradient = jacobian.transpose() * residual;

    // Dimensionless: the damping term is scaled by diag(J^T J) below.
    double damping = 1e-3;
    double growth = 2.0;

    LmResult result;
    int iteration = 0;
    for (; iteration < options.max_iterations; ++iteration)
    {
        if (gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance)
        {
            result.converged = true;
            break;
        }

        Eigen::VectorXd scale = normal.diagonal().cwiseMax(1e-300);
        Eigen::MatrixXd damped = normal;
        damped.diagonal() += damping * scale;
        const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
        if (!step.allFinite())
        {
            break;
        }

        const double tol = options.relative_step_tolerance;
        if (step.norm() <= tol * (params.norm() + tol))
        {
            result.converged = true;
            break;
        }

        const Eigen::VectorXd candidate = params + step;
        fn(candidate, trial_residual, nullptr);
        const double trial_cost = 0.5 * trial_residual.squaredNorm();
        const double predicted = 0.5 * step.dot(damping * scale.asDiagonal() * step - gradient);
        const double gain = predicted > 0.0 ? (cost - trial_cost) / predicted : -1.0;

        if (std::isfinite(trial_cost) && gain > 0.0)
        {
            params = candidate;
            fn(params, residual, &jacobian);
            cost = 0.5 * residual.squaredNorm();
            normal = jacobian.transpose() * jacobian;
            gradient = jacobian.transpose() * residual;
            damping *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
            growth = 2.0;
        }
        else
        {
            damping *= growth;
            growth *= 2.0;
        }
    }

    result.params = params;
    result.iterations = iteration;
    result.gradient_norm = gradient.lpNorm<Eigen::Infinity>();
    result.rms_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, residual_count)));
    return result;
}

} // namespace ringkit::optim
