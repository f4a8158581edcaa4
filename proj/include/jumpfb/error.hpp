#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jumpfb {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// The Krylov solver hit a non-positive curvature direction or ran out of
// iterations. Kept distinct from Picard non-convergence.
class SolverBreakdown : public Error {
public:
    SolverBreakdown(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

// The outer fixed-point iteration did not settle. Carries the sup-norm
// increments of every iterate so callers can inspect the history.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

// Continuation stage failure; wraps the stage index.
class StageFailure : public Error {
public:
    StageFailure(const std::string& what, std::size_t stage)
        : Error(what), stage_(stage) {}
    std::size_t stage() const noexcept { return stage_; }

private:
    std::size_t stage_;
};

// Phase is absent on the sampled circle.
class EmptyCap : public Error {
public:
    using Error::Error;
};

// Two conductivity matrices are not scalar multiples of each other.
class ProportionalityFailure : public Error {
public:
    ProportionalityFailure(const std::string& what, double residual_norm)
        : Error(what), residual_norm_(residual_norm) {}
    double residual_norm() const noexcept { return residual_norm_; }

private:
    double residual_norm_;
};

// Positive and negative parts overlap at some node.
class SupportOverlap : public Error {
public:
    using Error::Error;
};

class NotOnBoundary : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace jumpfb
