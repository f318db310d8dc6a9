// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace wnkpz {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure inside a solver (instability, non-convergence).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment or grid configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The (1+zeta) rho_* candidate does not meet the tail constraint.
class CertificateUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wnkpz
