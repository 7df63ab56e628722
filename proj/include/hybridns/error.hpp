#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hybridns {

/// Bad input to a constructor or operation (counts, bounding boxes, orders).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Polynomial order or quadrature degree outside the tabulated range.
class UnsupportedOrder : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerically singular matrix. `row` is the failing pivot row, or -1 when unknown.
class SingularMatrix : public std::runtime_error {
public:
  SingularMatrix(const std::string& what, long row) : std::runtime_error(what), row_(row) {}
  [[nodiscard]] long row() const noexcept { return row_; }

private:
  long row_;
};

/// Static condensation failed on one cell.
class CondensationError : public std::runtime_error {
public:
  CondensationError(const std::string& what, int cell) : std::runtime_error(what), cell_(cell) {}
  [[nodiscard]] int cell() const noexcept { return cell_; }

private:
  int cell_;
};

/// Fixed-point iteration hit its iteration limit.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  [[nodiscard]] const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

/// Malformed scenario configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace hybridns
