#pragma once

#include <stdexcept>
#include <string>

namespace blowuplab {

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteField : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteParticle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An (H1)-(H3) hypothesis failed; carries the name and a witness point.
struct HypothesisViolated : std::runtime_error {
    std::string hypothesis;
    HypothesisViolated(std::string name, const std::string& detail)
        : std::runtime_error("hypothesis " + name + " violated: " + detail),
          hypothesis(std::move(name)) {}
};

/// Requested theorem branch is outside its stated (gamma, delta, d) regime.
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gate was true but the necessary inequality never fails up to the scan horizon.
struct NoCrossing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NegativeDensity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IdentityViolation : std::runtime_error {
    std::string identity;
    double time;
    double residual;
    IdentityViolation(std::string name, double t, double r)
        : std::runtime_error("identity " + name + " violated at t=" + std::to_string(t) +
                             ", residual=" + std::to_string(r)),
          identity(std::move(name)), time(t), residual(r) {}
};

struct MissingManifest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace blowuplab
