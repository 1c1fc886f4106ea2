#ifndef RINGKIT_LEVENBERG_MARQUARDT_HPP
#define RINGKIT_LEVENBERG_MARQUARDT_HPP

#include <functional>

#include <Eigen/Dense>

namespace ringkit::optim
{

struct LmOptions
{
    int max_iterations = 200;
    // Converged when ||step|| <= tol * (||params|| + tol).
    double relative_step_tolerance = 1e-10;
    // Converged when max |J^T r| falls to this level.
    double gradient_tolerance = 1e-14;
};

struct LmResult
{
    Eigen::VectorXd params;
    double rms_residual = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Fills the residual vector (model - data) and, when non-null, the Jacobian
// d(residual)/d(params). Both are pre-sized by the caller.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd &params, Eigen::VectorXd &residual, Eigen::MatrixXd *jacobian)>;

// Damped Gauss-Newton with Marquardt diagonal scaling and Nielsen's damping
// update. Does not throw on non-convergence; callers inspect `converged`.
LmResult levenberg_marquardt(const ResidualFunction &fn, Eigen::VectorXd initial, Eigen::Index residual_count,
                             const LmOptions &options = {});

} // namespace ringkit::optim

#endif // RINGKIT_LEVENBERG_MARQUARDT_HPP
