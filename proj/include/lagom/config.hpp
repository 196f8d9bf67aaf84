#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lagom/kernel.hpp"

namespace lagom {

/// Plain "key = value" lines; '#' starts a comment. Later keys win.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<int> get_int(const std::string& key) const;
  std::optional<double> get_real(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// "1..6" or "1,2,3".
std::vector<int> parse_int_list(const std::string& text);

/// Built-in kernel named by kernel.name (default compact-1d), with kernel.delta
/// and kernel.L / kernel.S / kernel.D overriding its defaults.
CompactCZKernel kernel_from_config(const Config& cfg);

}  // namespace lagom
