#ifndef RINGKIT_ERRORS_HPP
#define RINGKIT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ringkit
{

enum class ErrorKind
{
    MalformedInput,
    DuplicateAbscissa,
    Validation,
    Parameter,
    FitFailure,
    RejectedFit,
    Domain,
    InsufficientData,
    PumpNotResonant,
    AmbiguousLadder,
    IllConditioned,
    IncompleteLadder,
    Integration,
    DegenerateBudget,
};

std::string_view to_string(ErrorKind kind);

// True for errors caused by bad user input (files, flags, specs) as opposed
// to a numerical stage of the pipeline failing.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string &message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class MalformedInputError : public Error
{
public:
    MalformedInputError(std::size_t line, const std::string &message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class FitFailureError : public Error
{
public:
    FitFailureError(double last_residual, int iterations);
    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

class IntegrationError : public Error
{
public:
    IntegrationError(double achieved_relative_tolerance, double requested_relative_tolerance);
    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

} // namespace ringkit

#endif // RINGKIT_ERRORS_HPP
