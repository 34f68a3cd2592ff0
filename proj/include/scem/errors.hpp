#pragma once

#include <stdexcept>
#include <string>

namespace scem {

// Base of everything the library throws. Contract-type errors (bad input,
// violated preconditions) derive from ContractError; numerical failures
// derive from NumericalError. The CLI maps the two families to distinct
// exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// Electrode arc endpoint not on the boundary grid of the requested level.
class AlignmentError : public ContractError {
public:
    using ContractError::ContractError;
};

// Overlapping, touching, corner-spanning or otherwise invalid electrode arcs.
class LayoutError : public ContractError {
public:
    using ContractError::ContractError;
};

// Argument outside the domain of a function (e.g. arclength outside [0,4)).
class DomainError : public ContractError {
public:
    using ContractError::ContractError;
};

class IndexError : public ContractError {
public:
    using ContractError::ContractError;
};

// Nonpositive or otherwise inadmissible model parameter.
class ParameterError : public ContractError {
public:
    using ContractError::ContractError;
};

class AssemblyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Factorization failed or the grounded system is singular.
class SolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace scem
