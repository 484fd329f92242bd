#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "trendboot/csv.hpp"

namespace trendboot::cli {

namespace {

bool is_list(KeyKind kind) {
  return kind == KeyKind::integer_list || kind == KeyKind::real_list || kind == KeyKind::text_list;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::string_view v = csv::trim(value);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  for (auto item : csv::split(v)) {
    item = csv::trim(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::optional<long long> to_integer(std::string_view s) { return csv::parse_integer(csv::trim(s)); }

std::optional<double> to_real(std::string_view s) {
  bool ok = true;
  const auto v = csv::parse_real(s, ok);
  if (!ok || !v) return std::nullopt;
  return v;
}

std::string format_bound(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

std::string describe(const KeySpec& spec) {
  std::string out = spec.help;
  if (spec.kind == KeyKind::integer || spec.kind == KeyKind::real || spec.kind == KeyKind::integer_list ||
      spec.kind == KeyKind::real_list) {
    out += " [" + format_bound(spec.min) + ", " + format_bound(spec.max) + "]";
  }
  if (!spec.choices.empty()) {
    out += " {";
    for (std::size_t i = 0; i < spec.choices.size(); ++i) out += (i ? "," : "") + spec.choices[i];
    out += "}";
  }
  if (is_list(spec.kind)) out += " (comma-separated)";
  if (spec.required) {
    out += " (required)";
  } else if (!spec.default_value.empty()) {
    out += " default " + spec.default_value;
  }
  return out;
}

RunConfig::RunConfig(std::vector<KeySpec> schema) : schema_(std::move(schema)) {
  for (const auto& s : schema_) {
    if (!s.default_value.empty()) set(s.key, s.default_value);
  }
}

const KeySpec& RunConfig::spec(std::string_view key) const {
  for (const auto& s : schema_) {
    if (s.key == key) return s;
  }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec& s = spec(key);
  const std::string v(csv::trim(value));
  const auto fail = [&](const std::string& why) {
    throw ConfigError("key '" + s.key + "': " + why + " (got '" + v + "')");
  };
  const auto check_number = [&](double x) {
    if (!(x >= s.min && x <= s.max)) fail("value outside [" + format_bound(s.min) + ", " + format_bound(s.max) + "]");
  };
  const auto check_choice = [&](const std::string& x) {
    if (s.choices.empty()) return;
    for (const auto& c : s.choices) {
      if (c == x) return;
    }
    fail("not one of the accepted values");
  };

  switch (s.kind) {
    case KeyKind::integer: {
      const auto x = to_integer(v);
      if (!x) fail("expected an integer");
      check_number(static_cast<double>(*x));
      break;
    }
    case KeyKind::real: {
      const auto x = to_real(v);
      if (!x) fail("expected a number");
      check_number(*x);
      break;
    }
    case KeyKind::text:
    case KeyKind::path:
      if (v.empty()) fail("empty value");
      check_choice(v);
      break;
    case KeyKind::integer_list:
    case KeyKind::real_list:
    case KeyKind::text_list: {
      const auto items = split_list(v);
      if (items.empty()) fail("empty list");
      for (const auto& item : items) {
        if (s.kind == KeyKind::integer_list) {
          const auto x = to_integer(item);
          if (!x) fail("expected integers");
          check_number(static_cast<double>(*x));
        } else if (s.kind == KeyKind::real_list) {
          const auto x = to_real(item);
          if (!x) fail("expected numbers");
          check_number(*x);
        } else {
          check_choice(item);
        }
      }
      break;
    }
  }
  values_[s.key] = v;
}

void RunConfig::load(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  while (csv::read_line(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = csv::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set(csv::trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  load(in, path.string());
}

void RunConfig::require_complete() const {
  for (const auto& s : schema_) {
    if (s.required && !has(s.key)) throw ConfigError("missing required key '" + s.key + "'");
  }
}

bool RunConfig::has(std::string_view key) const {
  spec(key);
  return values_.find(key) != values_.end();
}

const std::string& RunConfig::raw(std::string_view key) const {
  spec(key);
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("key '" + std::string(key) + "' is not set");
  return it->second;
}

long long RunConfig::integer(std::string_view key) const { return *to_integer(raw(key)); }

double RunConfig::real(std::string_view key) const { return *to_real(raw(key)); }

std::string RunConfig::text(std::string_view key) const { return raw(key); }

std::vector<long long> RunConfig::integer_list(std::string_view key) const {
  std::vector<long long> out;
  for (const auto& item : split_list(raw(key))) out.push_back(*to_integer(item));
  return out;
}

std::vector<double> RunConfig::real_list(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) out.push_back(*to_real(item));
  return out;
}

std::vector<std::string> RunConfig::text_list(std::string_view key) const { return split_list(raw(key)); }

void RunConfig::echo(std::ostream& out) const {
  for (const auto& s : schema_) {
    const auto it = values_.find(s.key);
    if (it != values_.end()) out << s.key << '=' << it->second << '\n';
  }
}

}  // namespace trendboot::cli
