#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InstanceErrorKind { KTooLarge, TooFewCustomers, BadValue };

/// An instance outside the supported regime k < n <= m*k, or with an
/// unusable relevance value.
class InstanceError : public Error {
 public:
  InstanceError(InstanceErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  InstanceErrorKind kind() const noexcept { return kind_; }

 private:
  InstanceErrorKind kind_;
};

class IdOutOfRange : public Error {
 public:
  using Error::Error;
};

class CyclicGraph : public Error {
 public:
  using Error::Error;
};

class BadBundleSize : public Error {
 public:
  using Error::Error;
};

class DegenerateBase : public Error {
 public:
  using Error::Error;
};

class BadCoordinate : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind { Ragged, BadNumber, Empty, Syntax };

/// Malformed input file. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
      : Error(what), kind_(kind), line_(line) {}
  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

}  // namespace fairrec
