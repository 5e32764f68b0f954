#pragma once

#include <stdexcept>
#include <string>

namespace svp {

// Gram matrix failed the pivot threshold (or a solve could not reach its
// residual tolerance, which we treat the same way).
struct SingularGram : std::runtime_error {
    explicit SingularGram(const std::string& what) : std::runtime_error(what) {}
};

// Some leave-one-out principal submatrix K_{\i} is numerically singular.
struct SingularLeaveOneOut : std::runtime_error {
    explicit SingularLeaveOneOut(const std::string& what) : std::runtime_error(what) {}
};

// Hard-margin dual is unbounded: the data admit no separating hyperplane.
struct NotSeparable : std::runtime_error {
    explicit NotSeparable(const std::string& what) : std::runtime_error(what) {}
};

// A diagonal entry K_ii is exactly zero; the coordinate update is undefined.
struct SingularCoordinate : std::runtime_error {
    explicit SingularCoordinate(const std::string& what) : std::runtime_error(what) {}
};

// No k satisfies the anisotropic-converse admissibility constraint.
struct NoAdmissibleK : std::runtime_error {
    explicit NoAdmissibleK(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its stated precondition.
struct PreconditionViolated : std::runtime_error {
    explicit PreconditionViolated(const std::string& what) : std::runtime_error(what) {}
};

// The three equivalence verdicts disagreed on a non-ambiguous instance.
// This falsifies either the solver or the linear algebra; it is never
// reconciled silently.
struct InconsistencyError : std::logic_error {
    explicit InconsistencyError(const std::string& what) : std::logic_error(what) {}
};

// Configuration rejected during validation; `pointer` is a JSON-pointer-style
// path to the offending key.
struct ConfigError : std::runtime_error {
    std::string pointer;
    ConfigError(std::string ptr, const std::string& what)
        : std::runtime_error(ptr + ": " + what), pointer(std::move(ptr)) {}
};

}  // namespace svp
