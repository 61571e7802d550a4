#pragma once

#include <stdexcept>
#include <string>

namespace rw {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument fell within the singular threshold of a pole or zero.
/// `argument()` names which input tripped it.
class NearSingular : public Error {
public:
    NearSingular(const std::string& what, std::string argument)
        : Error(what), argument_(std::move(argument)) {}
    const std::string& argument() const noexcept { return argument_; }

private:
    std::string argument_;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A branch-tracking step rotated a factor by more than the allowed angle.
class BranchJump : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what), line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace rw
