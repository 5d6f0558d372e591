#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pawnprint::toml {

// Minimal TOML reader covering what the config files actually use: [table]
// headers, key = value pairs, strings, integers, floats, booleans,
// YYYY-MM-DD dates (kept as strings), arrays of scalars, and # comments.
// No multi-line strings, no inline tables, no arrays of tables.

using Value =
    std::variant<std::string, std::int64_t, double, bool,
                 std::vector<std::string>, std::vector<std::int64_t>,
                 std::vector<double>>;

class Document {
 public:
  // Keys are fully qualified ("table.key"; bare "key" outside tables).
  const std::map<std::string, Value>& entries() const { return entries_; }

  bool contains(const std::string& key) const {
    return entries_.count(key) != 0;
  }

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  // Accepts integer literals where a float is requested.
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<double>> get_double_array(
      const std::string& key) const;
  std::optional<std::vector<std::int64_t>> get_int_array(
      const std::string& key) const;

  void set(const std::string& key, Value v) { entries_[key] = std::move(v); }

 private:
  std::map<std::string, Value> entries_;
};

// Throws std::runtime_error with a line number on malformed input.
Document parse(const std::string& text);
Document parse_file(const std::string& path);

}  // namespace pawnprint::toml
