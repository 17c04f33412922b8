#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hodgelab {

enum class ErrorKind {
  Precondition,
  ResourceGuard,
  MeshQuality,
  Solver,
  Io,
  Config,
};

// Base exception for every failure raised by the library. The kind lets the
// CLI map failures onto its exit-code contract without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when the eigensolver hits its iteration cap. Carries the best
// residual reached for each requested pair.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> best_residuals)
      : Error(ErrorKind::Solver, what), best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

inline void require(bool condition, const std::string& message,
                    ErrorKind kind = ErrorKind::Precondition) {
  if (!condition) throw Error(kind, message);
}

}  // namespace hodgelab
