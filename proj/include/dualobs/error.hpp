#pragma once

#include <stdexcept>
#include <string>

namespace dualobs {

// Root of every error raised by the library. The CLI maps the intermediate
// categories (ValidationError, InfeasibleError, MissingArtifact) to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};
class NormalizationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class SupportError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class PriorError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class DegenerateError : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public Error {
public:
    using Error::Error;
};
class ConfigError : public Error {
public:
    using Error::Error;
};
class EmptySequence : public Error {
public:
    using Error::Error;
};
class EmptyBudget : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};
class InfeasibleConstraints : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};
class InfeasibleThresholds : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};
class ThresholdOutOfRange : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};
class BudgetExceeded : public Error {
public:
    using Error::Error;
};
class HorizonTooLarge : public Error {
public:
    using Error::Error;
};

// A decision prefix (or observation/decision history) carries no mass under
// one or both hypotheses, so the accuracy ratio cannot be formed.
class BetaUndefined : public Error {
public:
    using Error::Error;
};
class UnseenHistory : public BetaUndefined {
public:
    using BetaUndefined::BetaUndefined;
};

class MissingArtifact : public Error {
public:
    using Error::Error;
};
class MissingAggModel : public MissingArtifact {
public:
    using MissingArtifact::MissingArtifact;
};
class MissingDecisionLaw : public MissingArtifact {
public:
    using MissingArtifact::MissingArtifact;
};

}  // namespace dualobs
