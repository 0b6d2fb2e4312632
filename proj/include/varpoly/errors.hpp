#pragma once

#include <stdexcept>
#include <string>

namespace varpoly {

// Input could not be parsed (problem files, tolerance overrides).  CLI exit code 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition does not hold; the operation refuses to run.
// Carries a short machine-checkable name next to the prose.  CLI exit code 3.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// Two routes that must agree disagreed (paired formula/probe checks, cross
// representation checks).  Never downgraded to a warning.  CLI exit code 4.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// The LP kernel itself failed (stall, bad pivot state) -- distinct from a
// well-posed "infeasible" answer.
class LpError : public std::runtime_error {
public:
    explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace varpoly
