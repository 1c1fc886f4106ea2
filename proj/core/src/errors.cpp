#include "ringkit/errors.hpp"

#include <sstream>

namespace ringkit
{

std::string_view to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::MalformedInput: return "malformed-input";
    case ErrorKind::DuplicateAbscissa: return "duplicate-abscissa";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::RejectedFit: return "rejected-fit";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::PumpNotResonant: return "pump-not-resonant";
    case ErrorKind::AmbiguousLadder: return "ambiguous-ladder";
    case ErrorKind::IllConditioned: return "ill-conditioned-fit";
    case ErrorKind::IncompleteLadder: return "incomplete-ladder";
    case ErrorKind::Integration: return "integration";
    case ErrorKind::DegenerateBudget: return "degenerate-budget";
    }
    return "unknown";
}

bool is_input_error(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::MalformedInput:
    case ErrorKind::DuplicateAbscissa:
    case ErrorKind::Validation:
    case ErrorKind::Parameter:
    case ErrorKind::Domain:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

MalformedInputError::MalformedInputError(std::size_t line, const std::string &message)
    : Error(ErrorKind::MalformedInput, "line " + std::to_string(line) + ": " + message), line_(line)
{
}

namespace
{
std::string fit_failure_message(double residual, int iterations)
{
    std::ostringstream os;
    os << "no convergence after " << iterations << " iterations (last rms residual " << residual << ")";
    return os.str();
}

std::string integration_message(double achieved, double requested)
{
    std::ostringstream os;
    os << "adaptive quadrature reached relative error " << achieved << ", requested " << requested;
    return os.str();
}
} // namespace

FitFailureError::FitFailureError(double last_residual, int iterations)
    : Error(ErrorKind::FitFailure, fit_failure_message(last_residual, iterations)),
      last_residual_(last_residual), iterations_(iterations)
{
}

IntegrationError::IntegrationError(double achieved, double requested)
    : Error(ErrorKind::Integration, integration_message(achieved, requested)), achieved_(achieved)
{
}

} // namespace ringkit
