#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rpsde::app {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Plain-text run record written as `manifest.txt`: one `key = value` line
/// per entry, in insertion order, after a comment line.
class Manifest {
 public:
  void add(std::string key, std::string value);
  std::string to_string() const;
  void write(const std::filesystem::path& file) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses the text form back into key/value pairs.
std::vector<std::pair<std::string, std::string>> parse_manifest(const std::string& text);

}  // namespace rpsde::app
