#pragma once

#include <stdexcept>
#include <string>

namespace bogospec {

// Exit codes shared by the library errors and the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitValidation = 3,
    kExitNumerical = 4,
};

class Error : public std::runtime_error {
public:
    Error(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
    int exit_code() const { return code_; }

private:
    int code_;
};

// Bad input: violated preconditions, malformed files, out-of-range parameters.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what, kExitValidation) {}
};

// The computation ran but did not produce a trustworthy result.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what, kExitNumerical) {}
};

// Problem size exceeds what the dense algorithms are allowed to allocate.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(what, kExitValidation) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what, kExitUsage) {}
};

}  // namespace bogospec
