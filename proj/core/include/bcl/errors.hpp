// errors.hpp - exception hierarchy shared by every module
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bcl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Array or matrix dimensions disagree with what an operation expects.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A field produced a non-finite value somewhere inside a difference stencil.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::vector<double> point)
        : Error(what), point_(std::move(point)) {}
    const std::vector<double>& point() const { return point_; }

private:
    std::vector<double> point_;
};

// Matrix inversion refused: condition number above the configured ceiling,
// or the matrix is not positive definite.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// Orbit metric lost positive definiteness (action not free at the point).
class FreeActionError : public Error {
public:
    using Error::Error;
};

// Faddeev-Popov matrix singular: the gauge section is not transversal.
class GaugeError : public Error {
public:
    using Error::Error;
};

// Scenario fails one of its construction gates (Killing, section, brackets).
class ScenarioError : public Error {
public:
    using Error::Error;
};

// Group chart evaluated outside its usable domain.
class ChartDomainError : public Error {
public:
    using Error::Error;
};

// Bad user configuration; `key` names the offending entry when known.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key = {})
        : Error(what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace bcl
