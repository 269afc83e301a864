#include "diffscope/errors.hpp"

namespace diffscope {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::InvalidKind: return "InvalidKind";
    case Errc::BadTimestamp: return "BadTimestamp";
    case Errc::SelfFollowing: return "SelfFollowing";
    case Errc::TextTooLong: return "TextTooLong";
    case Errc::DuplicateUser: return "DuplicateUser";
    case Errc::SourceOrderViolation: return "SourceOrderViolation";
    case Errc::OrderViolation: return "OrderViolation";
    case Errc::UnknownField: return "UnknownField";
    case Errc::EmptyPopulation: return "EmptyPopulation";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string decorate(Errc code, const std::string& what, std::size_t line) {
  std::string out(errc_name(code));
  if (line != 0) out += " at line " + std::to_string(line);
  out += ": ";
  out += what;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& what, std::size_t line)
    : std::runtime_error(decorate(code, what, line)), code_(code), line_(line), message_(what) {}

Error Error::with_line(std::size_t line) const { return Error(code_, message_, line); }

}  // namespace diffscope
