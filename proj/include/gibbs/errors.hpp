#ifndef GIBBS_ERRORS_HPP
#define GIBBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gibbs {

// Base class for all library errors. Subclasses map to CLI exit categories.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A point drifted past the |z| < 1 - eps_boundary guard.
struct GuardViolation : Error {
  explicit GuardViolation(const std::string& w) : Error(w) {}
};

struct XInsideBall : Error {
  explicit XInsideBall(const std::string& w) : Error(w) {}
};

struct CoincidentEndpoints : Error {
  explicit CoincidentEndpoints(const std::string& w) : Error(w) {}
};

struct CoincidentPoints : Error {
  explicit CoincidentPoints(const std::string& w) : Error(w) {}
};

struct NotSameLeaf : Error {
  explicit NotSameLeaf(const std::string& w) : Error(w) {}
};

struct NotLoxodromic : Error {
  explicit NotLoxodromic(const std::string& w) : Error(w) {}
};

struct InvalidDiscs : Error {
  explicit InvalidDiscs(const std::string& w) : Error(w) {}
};

struct NonLoxodromicGenerator : Error {
  explicit NonLoxodromicGenerator(const std::string& w) : Error(w) {}
};

struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& w) : Error(w) {}
};

struct InsufficientData : Error {
  explicit InsufficientData(const std::string& w) : Error(w) {}
};

struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& w) : Error(w) {}
};

struct TruncationCapHit : Error {
  explicit TruncationCapHit(const std::string& w) : Error(w) {}
};

struct EigSolverStall : Error {
  explicit EigSolverStall(const std::string& w) : Error(w) {}
};

struct NoBracket : Error {
  explicit NoBracket(const std::string& w) : Error(w) {}
};

struct EmptyArc : Error {
  explicit EmptyArc(const std::string& w) : Error(w) {}
};

struct ArcContainsVMinus : Error {
  explicit ArcContainsVMinus(const std::string& w) : Error(w) {}
};

struct HorizonExceeded : Error {
  explicit HorizonExceeded(const std::string& w) : Error(w) {}
};

struct UnstableNormalizer : Error {
  explicit UnstableNormalizer(const std::string& w) : Error(w) {}
};

struct BoundaryMassWarning : Error {
  explicit BoundaryMassWarning(const std::string& w) : Error(w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(w) {}
};

}  // namespace gibbs

#endif  // GIBBS_ERRORS_HPP
