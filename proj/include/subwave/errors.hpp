// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace subwave {

/// Base class of every error the library throws. `kind()` is a stable
/// machine-readable tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Errors caused by invalid user input (geometry, configuration). CLI exit code 4.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Errors raised when a numerical procedure cannot deliver its contract. CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

// --- geometry ---
struct OverlapError : ConfigError {
    explicit OverlapError(const std::string& m) : ConfigError("OverlapError", m) {}
};
struct OutOfCellError : ConfigError {
    explicit OutOfCellError(const std::string& m) : ConfigError("OutOfCellError", m) {}
};

// --- discretization ---
struct MeshFailure : NumericalError {
    explicit MeshFailure(const std::string& m) : NumericalError("MeshFailure", m) {}
};
struct SingularSystem : NumericalError {
    explicit SingularSystem(const std::string& m) : NumericalError("SingularSystem", m) {}
};
struct ConvergenceFailure : NumericalError {
    explicit ConvergenceFailure(const std::string& m) : NumericalError("ConvergenceFailure", m) {}
};

// --- spectra ---
struct ClusterAmbiguity : NumericalError {
    explicit ClusterAmbiguity(const std::string& m) : NumericalError("ClusterAmbiguity", m) {}
};
struct CorrectorFailure : NumericalError {
    explicit CorrectorFailure(const std::string& m) : NumericalError("CorrectorFailure", m) {}
};
struct InsufficientSpectrum : NumericalError {
    explicit InsufficientSpectrum(const std::string& m) : NumericalError("InsufficientSpectrum", m) {}
};

// --- evaluators / root finding ---
struct PoleProximity : NumericalError {
    explicit PoleProximity(const std::string& m) : NumericalError("PoleProximity", m) {}
};
struct ZeroDenominator : NumericalError {
    explicit ZeroDenominator(const std::string& m) : NumericalError("ZeroDenominator", m) {}
};
struct SignAmbiguity : NumericalError {
    explicit SignAmbiguity(const std::string& m) : NumericalError("SignAmbiguity", m) {}
};
struct EmptyInterval : NumericalError {
    explicit EmptyInterval(const std::string& m) : NumericalError("EmptyInterval", m) {}
};
struct GammaCollision : NumericalError {
    explicit GammaCollision(const std::string& m) : NumericalError("GammaCollision", m) {}
};

// --- series recursion ---
struct CompatibilityFailure : NumericalError {
    explicit CompatibilityFailure(const std::string& m) : NumericalError("CompatibilityFailure", m) {}
};
struct SpectralMismatch : NumericalError {
    explicit SpectralMismatch(const std::string& m) : NumericalError("SpectralMismatch", m) {}
};

// --- oracle ---
struct ModeMatchingAmbiguity : NumericalError {
    explicit ModeMatchingAmbiguity(const std::string& m) : NumericalError("ModeMatchingAmbiguity", m) {}
};

// --- cli ---
struct ParseError : ConfigError {
    explicit ParseError(const std::string& m) : ConfigError("ParseError", m) {}
};
struct ValidationError : ConfigError {
    explicit ValidationError(const std::string& m) : ConfigError("ValidationError", m) {}
};

} // namespace subwave
