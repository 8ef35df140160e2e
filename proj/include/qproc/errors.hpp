#pragma once

#include <stdexcept>
#include <string>

namespace qproc {

enum class ErrorKind {
    Validation,
    Domain,
    ResourceCap,
    Unrealizable,
    NoClosedForm,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error validationError(const std::string& m) { return Error(ErrorKind::Validation, m); }
inline Error domainError(const std::string& m) { return Error(ErrorKind::Domain, m); }
inline Error capError(const std::string& m) { return Error(ErrorKind::ResourceCap, m); }

// Process-wide resource limits. Mutable so the CLI can apply overrides once at startup.
struct Caps {
    long long denseDim = 4096;     // d^l ceiling for dense density matrices
    long long wordCount = 1 << 20; // |X|^l ceiling for word enumeration
    long long branches = 1 << 20;  // live branches in filter trees
};

Caps& caps();

} // namespace qproc
