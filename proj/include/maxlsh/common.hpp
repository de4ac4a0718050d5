#pragma once

#include <stdexcept>
#include <string>

namespace maxlsh {

/// Outcome classes shared by solvers and the CLI. `infeasible` is a
/// legitimate result (e.g. no symmetric LSH exists), not a failure.
enum class Status { ok, infeasible, too_large, solver_failure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::infeasible: return "infeasible";
    case Status::too_large: return "too-large";
    case Status::solver_failure: return "solver-failure";
  }
  return "unknown";
}

/// An enumeration or tensor dimension would exceed its configured cap.
class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver could not reach the required tolerance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace maxlsh
