#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cusp {

using cplx = std::complex<double>;

// Bad arguments, dimension mismatches and violated model invariants.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Evaluation at a pole.  `where` is the offending nonpositive integer
// (or the integer order that made a Gamma factor singular).
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, long where)
        : std::domain_error(what), where_(where) {}
    long where() const { return where_; }

private:
    long where_;
};

// A numerical result that could not be certified at the requested tolerance.
// The best available value is kept so callers can still report it.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, cplx partial, double estimate)
        : std::runtime_error(what), partial_(partial), estimate_(estimate) {}
    cplx partial() const { return partial_; }
    double estimate() const { return estimate_; }

private:
    cplx partial_;
    double estimate_;
};

// Requested feature is outside what the implementation supports.
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Least-squares problems whose exponents are too close to separate.
class ConditioningError : public std::runtime_error {
public:
    explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cusp
