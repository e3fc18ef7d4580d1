#include "standoff/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "standoff/errors.hpp"

namespace standoff {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Config config = parse(buffer.str());
  config.base_dir_ = path.parent_path();
  return config;
}

Config Config::parse(std::string_view text) {
  Config config;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key=value",
                       lineno, 0);
    }
    config.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return config;
}

void Config::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::string Config::env_name(std::string_view key) {
  std::string name = "STANDOFF_";
  for (char c : key) {
    name += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

std::optional<std::string> Config::get(std::string_view key) const {
  if (const char* env = std::getenv(env_name(key).c_str()); env != nullptr) return std::string(env);
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  return std::nullopt;
}

std::string Config::get_or(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

std::optional<long long> Config::get_int(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  long long out = 0;
  const char* first = v->data();
  const char* last = first + v->size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("config key " + std::string(key) + " is not an integer: " + *v);
  }
  return out;
}

std::optional<std::filesystem::path> Config::get_path(std::string_view key) const {
  // Environment values are taken relative to the working directory.
  if (const char* env = std::getenv(env_name(key).c_str()); env != nullptr) {
    if (*env == '\0') return std::nullopt;
    return std::filesystem::path(env);
  }
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) return std::nullopt;
  std::filesystem::path p(it->second);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

}  // namespace standoff
