#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trendboot::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyKind { integer, real, text, path, integer_list, real_list, text_list };

struct KeySpec {
  std::string key;
  KeyKind kind = KeyKind::text;
  std::string default_value;  // empty = unset
  std::string help;
  double min = 0.0;  // numeric kinds, applied to every list element
  double max = 0.0;
  std::vector<std::string> choices;  // text kinds; empty = free text
  bool required = false;
};

// "[lo, hi], default x" style summary used in --help.
[[nodiscard]] std::string describe(const KeySpec& spec);

/// Validated key-value settings for one command. Values come from the
/// schema defaults, then a config file, then command-line overrides.
class RunConfig {
 public:
  explicit RunConfig(std::vector<KeySpec> schema);

  // Throws ConfigError for unknown keys and out-of-bounds or malformed values.
  void set(std::string_view key, std::string_view value);

  // `key = value` lines; blank lines and '#' comments ignored.
  void load(std::istream& in, std::string_view source);
  void load(const std::filesystem::path& path);

  // Throws ConfigError naming any required key that is still unset.
  void require_complete() const;

  [[nodiscard]] bool has(std::string_view key) const;
  [[nodiscard]] long long integer(std::string_view key) const;
  [[nodiscard]] double real(std::string_view key) const;
  [[nodiscard]] std::string text(std::string_view key) const;
  [[nodiscard]] std::vector<long long> integer_list(std::string_view key) const;
  [[nodiscard]] std::vector<double> real_list(std::string_view key) const;
  [[nodiscard]] std::vector<std::string> text_list(std::string_view key) const;

  [[nodiscard]] const std::vector<KeySpec>& schema() const noexcept { return schema_; }

  // Every set key as `key=value`, in schema order.
  void echo(std::ostream& out) const;

 private:
  const KeySpec& spec(std::string_view key) const;
  const std::string& raw(std::string_view key) const;

  std::vector<KeySpec> schema_;
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace trendboot::cli
