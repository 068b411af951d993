#ifndef HIB_ERRORS_HPP
#define HIB_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "hib/log_signed.hpp"

namespace hib {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A power series failed to meet its tolerance within the term budget.
class SeriesError : public std::runtime_error {
 public:
  SeriesError(const std::string& what, LogSignedd partial_sum, long terms)
      : std::runtime_error(what), partial_sum_(partial_sum), terms_(terms) {}

  LogSignedd partial_sum() const { return partial_sum_; }
  long terms() const { return terms_; }

 private:
  LogSignedd partial_sum_;
  long terms_;
};

/// Quadrature or optimizer failure outside the series kernels.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, flags, configs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hib

#endif  // HIB_ERRORS_HPP
