#pragma once

#include <stdexcept>
#include <string>

namespace dmckf {

// Every failure raised by the library derives from Error. kind() is a short
// stable token used by the CLI for machine-parsable diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what) : Error("invalid-parameter", what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension-mismatch", what) {}
};

class DecompositionFailure : public Error {
public:
    DecompositionFailure(const std::string& what, long pivot)
        : Error("decomposition-failure", what), pivot_(pivot) {}
    long pivot() const noexcept { return pivot_; }

private:
    long pivot_;
};

class SingularUpdate : public Error {
public:
    explicit SingularUpdate(const std::string& what) : Error("singular-update", what) {}
};

class RankDeficiency : public Error {
public:
    explicit RankDeficiency(const std::string& what) : Error("rank-deficiency", what) {}
};

class PreconditionViolated : public Error {
public:
    explicit PreconditionViolated(const std::string& what) : Error("precondition-violated", what) {}
};

class NoRoot : public Error {
public:
    explicit NoRoot(const std::string& what) : Error("no-root", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace dmckf
