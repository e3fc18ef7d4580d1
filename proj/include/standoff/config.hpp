#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace standoff {

// Plain key=value settings. Blank lines and lines starting with '#' are
// ignored; whitespace around keys and values is trimmed.
//
// Any key can be overridden from the environment: "lexicon.terms" is read
// from STANDOFF_LEXICON_TERMS.
class Config {
 public:
  Config() = default;

  // Throws ParseError (with the line number) on a line without '='.
  static Config load(const std::filesystem::path& path);
  static Config parse(std::string_view text);

  void set(std::string key, std::string value);
  // Environment first, then the file.
  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  // Throws ValidationError when the value is not an integer.
  std::optional<long long> get_int(std::string_view key) const;

  // Relative paths in the file are resolved against this directory.
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }
  std::optional<std::filesystem::path> get_path(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& entries() const noexcept {
    return values_;
  }

  static std::string env_name(std::string_view key);

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::filesystem::path base_dir_;
};

}  // namespace standoff
