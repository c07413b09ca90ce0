#pragma once

#include <stdexcept>
#include <string>

namespace kernsupp {

/// Failure category. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Usage = 2,    ///< invalid parameters or malformed specs
  Data = 3,     ///< unreadable, ragged, or dimensionally inconsistent input
  Numeric = 4,  ///< factorization or eigensolver failure, non-PSD input
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace kernsupp
