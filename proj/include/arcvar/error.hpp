#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace arcvar {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int { ok = 0, usage = 1, data = 2, numerical = 3 };

/// Input data cannot support the requested computation (too short, degenerate,
/// malformed). Maps to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A lag column (or the full regressor matrix) is rank deficient.
class RankDeficientError : public DataError {
 public:
  using DataError::DataError;
};

/// Fewer than one observation falls in the requested upper tail.
class TailTooThinError : public DataError {
 public:
  using DataError::DataError;
};

/// An iterative routine failed. Maps to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver gave up; carries the best point it reached.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_point)
      : NumericalError(what), best_point_(std::move(best_point)) {}

  const std::vector<double>& best_point() const noexcept { return best_point_; }

 private:
  std::vector<double> best_point_;
};

}  // namespace arcvar
