#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace ttc::testing {

inline bool near(double a, double b, double abs_tol) {
  return std::abs(a - b) <= abs_tol;
}

// Self-deleting scratch directory under the build tree.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ttc_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Compares against a checked-in golden file; TTC_REGEN_GOLDEN=1 rewrites
// instead. Returns an empty string on match, a diagnostic otherwise.
inline std::string check_golden(const std::filesystem::path& golden,
                                const std::string& actual) {
  if (const char* regen = std::getenv("TTC_REGEN_GOLDEN"); regen && *regen == '1') {
    write_file(golden, actual);
    return {};
  }
  if (!std::filesystem::exists(golden)) {
    return "golden file missing: " + golden.string() +
           " (run with TTC_REGEN_GOLDEN=1 to create)";
  }
  const std::string expected = read_file(golden);
  if (expected == actual) return {};
  std::size_t at = 0;
  while (at < expected.size() && at < actual.size() && expected[at] == actual[at]) ++at;
  return "golden mismatch for " + golden.string() + " at byte " + std::to_string(at) +
         " (expected " + std::to_string(expected.size()) + " bytes, got " +
         std::to_string(actual.size()) + ")";
}

}  // namespace ttc::testing
