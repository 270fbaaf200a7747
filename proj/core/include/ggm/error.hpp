#pragma once

#include <stdexcept>
#include <string>

namespace ggm {

enum class ErrorKind {
  domain,         // argument outside a function's domain or invalid parameters
  convergence,    // iteration cap or bracket expansion exceeded
  format,         // malformed file or header
  corrupt_stream  // checksum mismatch or truncated payload
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::domain, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorKind::convergence, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::format, what) {}
};

class CorruptStreamError : public Error {
 public:
  explicit CorruptStreamError(const std::string& what)
      : Error(ErrorKind::corrupt_stream, what) {}
};

}  // namespace ggm
