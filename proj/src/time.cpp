#include "diffscope/time.hpp"

#include <charconv>
#include <cstdio>

#include "diffscope/errors.hpp"

namespace diffscope {

namespace {

using namespace std::chrono;

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  void skip() { ++pos_; }

  int digits(std::size_t n) {
    int value = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char c = peek();
      if (c < '0' || c > '9') fail();
      value = value * 10 + (c - '0');
      skip();
    }
    return value;
  }

  void expect(char c) {
    if (peek() != c) fail();
    skip();
  }

  [[noreturn]] void fail() const {
    throw Error(Errc::BadTimestamp, "invalid RFC 3339 timestamp '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  Cursor in(text);
  int y = in.digits(4);
  in.expect('-');
  int mo = in.digits(2);
  in.expect('-');
  int d = in.digits(2);
  char sep = in.peek();
  if (sep != 'T' && sep != 't' && sep != ' ') in.fail();
  in.skip();
  int h = in.digits(2);
  in.expect(':');
  int mi = in.digits(2);
  in.expect(':');
  int s = in.digits(2);

  int ms = 0;
  if (in.peek() == '.') {
    in.skip();
    int scale = 100;
    bool any = false;
    while (in.peek() >= '0' && in.peek() <= '9') {
      ms += (in.peek() - '0') * scale;
      scale /= 10;
      any = true;
      in.skip();
    }
    if (!any) in.fail();
  }

  int offset_min = 0;
  char z = in.peek();
  if (z == 'Z' || z == 'z') {
    in.skip();
  } else if (z == '+' || z == '-') {
    in.skip();
    int oh = in.digits(2);
    in.expect(':');
    int om = in.digits(2);
    if (oh > 23 || om > 59) in.fail();
    offset_min = (z == '+' ? 1 : -1) * (oh * 60 + om);
  } else {
    in.fail();
  }
  if (!in.done()) in.fail();

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) in.fail();

  auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
  return time_point_cast<milliseconds>(local - minutes{offset_min});
}

std::string format_rfc3339(Timestamp ts, int offset_minutes) {
  auto shifted = ts + minutes{offset_minutes};
  auto day_point = floor<days>(shifted);
  year_month_day ymd{day_point};
  hh_mm_ss tod{shifted - day_point};

  char buf[48];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                        static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                        static_cast<int>(tod.seconds().count()));
  std::string out(buf, static_cast<std::size_t>(n));
  if (auto ms = tod.subseconds().count(); ms != 0) {
    std::snprintf(buf, sizeof buf, ".%03d", static_cast<int>(ms));
    out += buf;
  }
  if (offset_minutes == 0) {
    out += 'Z';
  } else {
    int a = offset_minutes < 0 ? -offset_minutes : offset_minutes;
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset_minutes < 0 ? '-' : '+', a / 60, a % 60);
    out += buf;
  }
  return out;
}

Duration parse_duration(std::string_view text) {
  auto bad = [&]() -> Error {
    return Error(Errc::InvalidConfig, "invalid duration '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || value < 0) throw bad();
  std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
  double scale;
  if (unit.empty() || unit == "s") scale = 1000.0;
  else if (unit == "ms") scale = 1.0;
  else if (unit == "m" || unit == "min") scale = 60'000.0;
  else if (unit == "h") scale = 3'600'000.0;
  else if (unit == "d") scale = 86'400'000.0;
  else throw bad();
  return Duration{static_cast<std::int64_t>(value * scale + 0.5)};
}

std::string format_duration(Duration d) {
  auto ms = d.count();
  if (ms % 3'600'000 == 0) return std::to_string(ms / 3'600'000) + "h";
  if (ms % 60'000 == 0) return std::to_string(ms / 60'000) + "m";
  if (ms % 1000 == 0) return std::to_string(ms / 1000) + "s";
  return std::to_string(ms) + "ms";
}

int parse_utc_offset(std::string_view text) {
  auto bad = [&]() -> Error {
    return Error(Errc::InvalidConfig, "invalid UTC offset '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  int sign = 1;
  if (text.front() == '+' || text.front() == '-') {
    sign = text.front() == '-' ? -1 : 1;
    text.remove_prefix(1);
  }
  int hours = 0;
  int mins = 0;
  auto colon = text.find(':');
  auto hpart = text.substr(0, colon);
  auto [p, ec] = std::from_chars(hpart.data(), hpart.data() + hpart.size(), hours);
  if (ec != std::errc{} || p != hpart.data() + hpart.size() || hours > 14) throw bad();
  if (colon != std::string_view::npos) {
    auto mpart = text.substr(colon + 1);
    auto [p2, ec2] = std::from_chars(mpart.data(), mpart.data() + mpart.size(), mins);
    if (ec2 != std::errc{} || p2 != mpart.data() + mpart.size() || mins > 59) throw bad();
  }
  return sign * (hours * 60 + mins);
}

}  // namespace diffscope
