#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcn {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed edge-list or config text. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A builder would exceed the configured node cap.
class SizeCapExceeded : public Error {
 public:
  SizeCapExceeded(std::uint64_t requested, std::uint64_t cap)
      : Error("topology needs " + std::to_string(requested) +
              " nodes, size cap is " + std::to_string(cap)),
        requested_(requested) {}
  std::uint64_t requested() const noexcept { return requested_; }

 private:
  std::uint64_t requested_;
};

class DisconnectedError : public Error {
 public:
  using Error::Error;
};

class NoRouteError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcn
