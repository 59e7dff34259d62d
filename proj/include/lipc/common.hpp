#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace lipc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Interior nodal values on a Grid. Length must equal Grid::size().
using GridFunction = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, long expected, long actual)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  long expected() const noexcept { return expected_; }
  long actual() const noexcept { return actual_; }

 private:
  long expected_;
  long actual_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Iterative solver gave up. Carries the last residual and the residual trace.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double final_residual, std::vector<double> trace = {})
      : Error(what + " (final residual " + std::to_string(final_residual) + ")"),
        final_residual_(final_residual),
        trace_(std::move(trace)) {}

  double final_residual() const noexcept { return final_residual_; }
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  double final_residual_;
  std::vector<double> trace_;
};

class TruncationError : public Error {
 public:
  TruncationError(double linf, double level)
      : Error("truncation violated: ||y||_inf = " + std::to_string(linf) +
              " >= truncation level k = " + std::to_string(level) + "; increase k"),
        linf_(linf),
        level_(level) {}

  double linf() const noexcept { return linf_; }
  double level() const noexcept { return level_; }

 private:
  double linf_;
  double level_;
};

}  // namespace lipc
