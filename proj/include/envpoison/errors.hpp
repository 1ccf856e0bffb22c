#pragma once

#include <stdexcept>
#include <string>

namespace envpoison {

// Thrown when a policy-induced chain is reducible (or numerically rank
// deficient beyond the one redundant balance equation).
struct SingularChain : std::runtime_error {
    explicit SingularChain(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative routine exhausts its iteration cap.
struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an optimization backend reports anything other than optimal
// on a problem the caller proved feasible, or when a mandatory post-hoc
// verification of a solution fails.
struct SolverFailure : std::runtime_error {
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a caller violates a documented precondition that is cheap to
// detect (e.g. requesting the mixture construction without its certificate).
struct PreconditionFailed : std::runtime_error {
    explicit PreconditionFailed(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an attack problem has no feasible solution and the operation
// has no way to report that through its result type.
struct InfeasibleProblem : std::runtime_error {
    explicit InfeasibleProblem(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on out-of-domain scalar arguments (non-positive margins, p outside
// the supported set, malformed indices).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace envpoison
