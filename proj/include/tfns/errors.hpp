#pragma once

#include <stdexcept>
#include <string>

namespace tfns {

/// The factorization reported a (numerically) singular system.
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// A linear solve finished but its residual contract was not met.
class ResidualError : public std::runtime_error {
public:
    ResidualError(const std::string& what_arg, double achieved)
        : std::runtime_error(what_arg), achieved_residual(achieved) {}

    double achieved_residual;
};

/// Picard iteration exhausted its budget before the increment tolerance.
class PicardError : public std::runtime_error {
public:
    PicardError(const std::string& what_arg, int step_index, double last_increment)
        : std::runtime_error(what_arg), step_index(step_index),
          last_increment(last_increment) {}

    int step_index;
    double last_increment;
};

/// Two internal quadrature resolutions disagreed beyond the requested tolerance.
class QuadratureAccuracyError : public std::runtime_error {
public:
    QuadratureAccuracyError(const std::string& what_arg, double disagreement)
        : std::runtime_error(what_arg), disagreement(disagreement) {}

    double disagreement;
};

} // namespace tfns
