#pragma once

#include <stdexcept>
#include <string>

namespace bv {

// Argument-shaped problems: the caller handed us something malformed.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

struct UnknownName : std::invalid_argument {
    explicit UnknownName(const std::string& what) : std::invalid_argument(what) {}
};

struct BadParameter : std::invalid_argument {
    explicit BadParameter(const std::string& what) : std::invalid_argument(what) {}
};

struct PartitionMismatch : std::invalid_argument {
    explicit PartitionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptyCandidates : std::invalid_argument {
    explicit EmptyCandidates(const std::string& what) : std::invalid_argument(what) {}
};

// State-shaped problems: the request is fine, the representation cannot honor it.
struct UnsupportedRep : std::runtime_error {
    explicit UnsupportedRep(const std::string& what) : std::runtime_error(what) {}
};

struct NotBV : std::runtime_error {
    explicit NotBV(const std::string& what) : std::runtime_error(what) {}
};

struct DiscontinuousInput : std::runtime_error {
    explicit DiscontinuousInput(const std::string& what) : std::runtime_error(what) {}
};

struct DiscontinuousIntegrand : std::runtime_error {
    explicit DiscontinuousIntegrand(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGrid : std::runtime_error {
    explicit DegenerateGrid(const std::string& what) : std::runtime_error(what) {}
};

struct BoundViolated : std::runtime_error {
    explicit BoundViolated(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bv
