#pragma once

#include <stdexcept>
#include <string>

namespace bmcarpet {

// Malformed input: bad JSON, violated digit-set constraints, bad rational text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (level 0, empty word, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A resource guard fired. `limit` is the configured cap, `requested` what the
// operation would have needed (or the count at which it stopped).
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, long double requested, long double limit)
      : std::runtime_error(what), requested_(requested), limit_(limit) {}

  long double requested() const noexcept { return requested_; }
  long double limit() const noexcept { return limit_; }

 private:
  long double requested_;
  long double limit_;
};

}  // namespace bmcarpet
