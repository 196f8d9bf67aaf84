#include "lagom/config.hpp"

#include <fstream>
#include <sstream>

#include "lagom/error.hpp"

namespace lagom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, "line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Parse, "line " + std::to_string(n) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse(in);
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Config::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::size_t used = 0;
  try {
    const int x = std::stoi(*v, &used);
    if (used == v->size()) return x;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorKind::Parse, key + ": '" + *v + "' is not an integer");
}

std::optional<double> Config::get_real(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::size_t used = 0;
  try {
    const double x = std::stod(*v, &used);
    if (used == v->size()) return x;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorKind::Parse, key + ": '" + *v + "' is not a number");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  try {
    if (const auto dots = text.find(".."); dots != std::string::npos) {
      const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
      if (b < a) throw Error(ErrorKind::Parse, "empty range '" + text + "'");
      for (int i = a; i <= b; ++i) out.push_back(i);
      return out;
    }
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(std::stoi(trim(cell)));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Parse, "bad integer list '" + text + "'");
  }
  if (out.empty()) throw Error(ErrorKind::Parse, "empty integer list");
  return out;
}

CompactCZKernel kernel_from_config(const Config& cfg) {
  const std::string name = cfg.get("kernel.name").value_or("compact-1d");
  std::optional<AdmissibleTriple> triple;
  if (cfg.has("kernel.L") || cfg.has("kernel.S") || cfg.has("kernel.D")) {
    AdmissibleTriple t = make_kernel(name).triple;
    if (auto v = cfg.get("kernel.L")) t.L = AdmissibleFunction::parse(*v);
    if (auto v = cfg.get("kernel.S")) t.S = AdmissibleFunction::parse(*v);
    if (auto v = cfg.get("kernel.D")) t.D = AdmissibleFunction::parse(*v);
    triple = t;
  }
  return make_kernel(name, triple, cfg.get_real("kernel.delta"));
}

}  // namespace lagom
