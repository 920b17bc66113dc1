#pragma once

#include <stdexcept>
#include <string>

namespace l1line {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated (dimension mismatch,
/// negative penalty, non-finite data, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The preserved coordinate has an all-zero column, so no line with
/// v_preserved = 1 passes through the data.
class DegenerateColumn : public Error {
 public:
  explicit DegenerateColumn(std::size_t column)
      : Error("preserved column " + std::to_string(column) + " is all zeros"),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// A dual certificate failed feasibility or did not close the duality gap.
class CertificateInfeasible : public Error {
 public:
  using Error::Error;
};

/// Inputs to the path merge are unsorted or do not cover [0, inf).
class PathError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace detail
}  // namespace l1line
