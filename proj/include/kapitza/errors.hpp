#pragma once

#include <stdexcept>
#include <string>

namespace kapitza {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (cos phi
/// singularity, mu = 0 momentum bound, malformed forcing, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Integrator failures.
class IntegrationError : public Error {
public:
    using Error::Error;
};
class StepBudgetExceeded : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};
class StepUnderflow : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};
class NonFiniteState : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

// Periodic-orbit solver failures.
class OrbitError : public Error {
public:
    using Error::Error;
};
class SingularJacobian : public OrbitError {
public:
    using OrbitError::OrbitError;
};
class NoConvergence : public OrbitError {
public:
    using OrbitError::OrbitError;
};
class LeftDomain : public OrbitError {
public:
    using OrbitError::OrbitError;
};

// Parameter-space analysis failures.
class AnalysisError : public Error {
public:
    using Error::Error;
};
class InvalidBracket : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};
class LostOrbit : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};
class ContinuationBreakdown : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

} // namespace kapitza
