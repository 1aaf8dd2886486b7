#include "lfvs/config.hpp"

#include <fstream>
#include <sstream>

#include "lfvs/common.hpp"

namespace lfvs {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  require_data(bool(in), "cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    require_data(eq != std::string::npos,
                 origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    require_data(!key.empty(),
                 origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_str(const std::string& key) const {
  auto it = entries_.find(key);
  require_data(it != entries_.end(), origin_ + ": missing required key '" + key + "'");
  touched_[key] = true;
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  touched_[key] = true;
  return it->second;
}

long Config::get_int(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    size_t pos = 0;
    long r = std::stol(v, &pos);
    require_data(pos == v.size(), "");
    return r;
  } catch (...) {
    throw DataError(origin_ + ": key '" + key + "' is not an integer: " + v);
  }
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    require_data(pos == v.size(), "");
    return r;
  } catch (...) {
    throw DataError(origin_ + ": key '" + key + "' is not a number: " + v);
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DataError(origin_ + ": key '" + key + "' is not a boolean: " + v);
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (!touched_.count(k)) out.push_back(k);
  return out;
}

}  // namespace lfvs
