#pragma once

#include <stdexcept>
#include <string>

namespace rsc {

/// Cell or matrix dimension outside the range an operation accepts.
class InvalidDimension : public std::invalid_argument {
public:
    explicit InvalidDimension(const std::string& what) : std::invalid_argument(what) {}
};

/// Vertex id or rank outside the ambient index set.
class IndexError : public std::out_of_range {
public:
    explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Dense eigensolve requested above the configured cutoff.
class TooLarge : public std::runtime_error {
public:
    explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration request beyond the supported size limits.
class ResourceGuard : public std::runtime_error {
public:
    explicit ResourceGuard(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rsc
