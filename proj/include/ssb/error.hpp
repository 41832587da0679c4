#pragma once

#include <stdexcept>
#include <string>

namespace ssb {

// Base for all runtime failures raised by the solver. Precondition
// violations on arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Omega comes closer than the required margin to the border of the
// periodic computational box.
class MarginError : public Error {
public:
    using Error::Error;
};

// A field picked up a NaN or Inf during time stepping.
class NonFiniteError : public Error {
public:
    NonFiniteError(std::string substep, std::string component, int i, int j, double t);

    const std::string& substep() const { return substep_; }
    const std::string& component() const { return component_; }
    int i() const { return i_; }
    int j() const { return j_; }
    double time() const { return t_; }

private:
    std::string substep_;
    std::string component_;
    int i_;
    int j_;
    double t_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Quiet mode silences library warnings (they go to stderr otherwise).
void set_quiet(bool quiet);
bool quiet();
void warn(const std::string& message);

} // namespace ssb
