#pragma once

#include <stdexcept>
#include <string>

namespace gamecall {

// Error taxonomy shared across the library. Everything derives from
// std::runtime_error so callers can catch coarsely; the concrete types
// exist for tests and for precise CLI diagnostics.

struct NonPositiveParameter : std::runtime_error {
    explicit NonPositiveParameter(const std::string& what) : std::runtime_error(what) {}
};

// k = r - sigma^2/2 - delta0/2 numerically zero; the model degenerates to a
// family of one-dimensional problems we do not support.
struct DegenerateK : std::runtime_error {
    explicit DegenerateK(const std::string& what) : std::runtime_error(what) {}
};

struct SingularTransform : std::domain_error {
    explicit SingularTransform(const std::string& what) : std::domain_error(what) {}
};

struct NoBracket : std::runtime_error {
    explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

struct NoRoot : std::runtime_error {
    explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergenceAtSlice : std::runtime_error {
    explicit NoConvergenceAtSlice(const std::string& what) : std::runtime_error(what) {}
};

struct DomainTooSmall : std::runtime_error {
    explicit DomainTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyRegion : std::runtime_error {
    explicit EmptyRegion(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfDomain : std::runtime_error {
    explicit OutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gamecall
