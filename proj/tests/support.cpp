#include "support.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <cmath>
#include <sstream>

#include <unistd.h>

namespace diffscope::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("diffscope-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace diffscope::testing

namespace diffscope::testing {

std::optional<std::string> subset_mismatch(const nlohmann::json& expected, const nlohmann::json& actual,
                                           const std::string& path) {
  if (expected.is_object()) {
    if (!actual.is_object()) return path + " is not an object";
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      auto found = actual.find(it.key());
      if (found == actual.end()) return path + "." + it.key() + " missing";
      if (auto m = subset_mismatch(*it, *found, path + "." + it.key())) return m;
    }
    return std::nullopt;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size()) return path + " length differs";
    for (std::size_t i = 0; i < expected.size(); ++i)
      if (auto m = subset_mismatch(expected[i], actual[i], path + "[" + std::to_string(i) + "]")) return m;
    return std::nullopt;
  }
  if (expected.is_number() && actual.is_number()) {
    double e = expected.get<double>();
    double a = actual.get<double>();
    if (std::abs(e - a) <= 1e-12 * std::max(1.0, std::abs(e))) return std::nullopt;
    return path + ": expected " + expected.dump() + ", got " + actual.dump();
  }
  if (expected != actual) return path + ": expected " + expected.dump() + ", got " + actual.dump();
  return std::nullopt;
}

std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DIFFSCOPE_SOURCE_DIR) / "tests" / "fixtures" / name;
}

}  // namespace diffscope::testing
