#include "app/manifest.hpp"

#include <fstream>
#include <sstream>

#include "rpsde/error.hpp"

namespace rpsde::app {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void Manifest::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

std::string Manifest::to_string() const {
  std::ostringstream out;
  out << "# rpsde run manifest\n";
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  return out.str();
}

void Manifest::write(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write manifest '" + file.string() + "'");
  out << to_string();
}

std::vector<std::pair<std::string, std::string>> parse_manifest(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw Error("malformed manifest line '" + line + "'");
    out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return out;
}

}  // namespace rpsde::app
