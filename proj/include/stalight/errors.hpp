#ifndef STALIGHT_ERRORS_HPP
#define STALIGHT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stalight {

// Base class for all library errors so callers can map them to exit codes.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration document violates the schema (unknown key, wrong type,
// unsupported scenario name, ...). Message names the offending key.
class validation_error : public error {
public:
    explicit validation_error(const std::string& msg) : error(msg) {}
};

// A value is syntactically fine but violates an invariant (d <= 0, dt <= 0).
class range_error : public validation_error {
public:
    explicit range_error(const std::string& msg) : validation_error(msg) {}
};

// Operation called outside its mathematical domain (e.g. Delta = 0 in the
// adiabatically eliminated model).
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Requested configuration is valid but not handled by this code path.
class unsupported_error : public error {
public:
    explicit unsupported_error(const std::string& msg) : error(msg) {}
};

// Time integration produced a NaN or overflow. Message names the first bad time.
class diverged_error : public error {
public:
    explicit diverged_error(const std::string& msg) : error(msg) {}
};

// Mismatched array/grid shapes.
class shape_error : public error {
public:
    explicit shape_error(const std::string& msg) : error(msg) {}
};

// A spectral feature is not resolved by the supplied grid.
class resolution_error : public error {
public:
    explicit resolution_error(const std::string& msg) : error(msg) {}
};

} // namespace stalight

#endif
