#pragma once

#include <stdexcept>
#include <string>

namespace ewarn {

// Error categories map onto CLI exit codes: config 2, data 3, numerical 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
    virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
    int exit_code() const noexcept override { return 2; }
};

class DataError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data"; }
    int exit_code() const noexcept override { return 3; }
};

class NumericalError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical"; }
    int exit_code() const noexcept override { return 4; }
};

}  // namespace ewarn
