#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bcrb {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the model.
class domain_error : public error {
public:
    using error::error;
};

/// An optical element violates its own invariants (zero focal length, negative length, ...).
class invalid_element : public domain_error {
public:
    using domain_error::domain_error;
};

/// A closed-form expression divides by a vanishing matrix entry.
class singular_configuration : public domain_error {
public:
    using domain_error::domain_error;
};

/// The cavity is outside its stability region, so no Gaussian mode exists.
class unstable_cavity : public domain_error {
public:
    using domain_error::domain_error;
};

/// A parameter set failed validation. `field()` holds the dotted path, e.g. "receiver.mu".
class validation_error : public domain_error {
public:
    validation_error(std::string field, const std::string& what)
        : domain_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed configuration input (parse failure, unknown unit, unknown key in strict mode).
class config_error : public error {
public:
    using error::error;
};

/// A boundary search or calibration has no admissible solution.
class infeasible_search : public error {
public:
    using error::error;
};

} // namespace bcrb
