#pragma once

#include <stdexcept>
#include <string>

namespace cac {

// Out-of-domain rates, probabilities, or channel counts.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class UnsupportedSize : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The handoff flow-balance iteration did not settle.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_lambda_h, double residual, int iterations)
        : std::runtime_error(what),
          last_lambda_h_(last_lambda_h),
          residual_(residual),
          iterations_(iterations) {}

    double last_lambda_h() const noexcept { return last_lambda_h_; }
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_lambda_h_;
    double residual_;
    int iterations_;
};

// A simulation run that produced no observations of the counted class.
class DegenerateRun : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& detail)
        : std::runtime_error(field + ": " + detail), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace cac
