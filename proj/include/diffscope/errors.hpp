#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diffscope {

enum class Errc {
  MalformedRecord,
  InvalidKind,
  BadTimestamp,
  SelfFollowing,
  TextTooLong,
  DuplicateUser,
  SourceOrderViolation,
  OrderViolation,
  UnknownField,
  EmptyPopulation,
  InsufficientPoints,
  InvalidParams,
  InvalidConfig,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `line()` is the 1-based line of the
/// offending record when the error comes from a file, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::size_t line = 0);

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

  Error with_line(std::size_t line) const;

 private:
  Errc code_;
  std::size_t line_;
  std::string message_;
};

}  // namespace diffscope
