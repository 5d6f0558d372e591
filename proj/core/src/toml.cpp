#include "pawnprint/util/toml.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

#include "pawnprint/util/io.hpp"

namespace pawnprint::toml {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("toml: line " + std::to_string(line) + ": " + what);
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool is_bare_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

std::string parse_basic_string(std::string_view s, std::size_t line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
    fail(line, "expected quoted string");
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      if (i + 2 >= s.size()) fail(line, "dangling escape");
      char e = s[++i];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(line, std::string("unsupported escape \\") + e);
      }
    } else {
      out += c;
    }
  }
  return out;
}

Value parse_scalar(std::string_view raw, std::size_t line) {
  std::string_view s = strip(raw);
  if (s.empty()) fail(line, "empty value");
  if (s.front() == '"') return parse_basic_string(s, line);
  if (s == "true") return true;
  if (s == "false") return false;
  if (is_bare_date(s)) return std::string(s);

  const bool looks_float = s.find_first_of(".eE") != std::string_view::npos &&
                           !(s.size() > 1 && (s[0] == '0' && s[1] == 'x'));
  if (!looks_float) {
    std::int64_t iv = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), iv);
    if (ec == std::errc() && p == s.data() + s.size()) return iv;
  }
  double dv = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), dv);
  if (ec == std::errc() && p == s.data() + s.size()) return dv;
  fail(line, "cannot parse value: '" + std::string(s) + "'");
}

Value parse_array(std::string_view s, std::size_t line) {
  // s includes the brackets.
  std::string_view body = strip(s.substr(1, s.size() - 2));
  std::vector<std::string> strings;
  std::vector<std::int64_t> ints;
  std::vector<double> doubles;
  bool any_string = false, any_double = false, any_int = false;

  std::size_t start = 0;
  bool in_string = false;
  auto flush = [&](std::string_view item) {
    item = strip(item);
    if (item.empty()) return;
    Value v = parse_scalar(item, line);
    if (std::holds_alternative<std::string>(v)) {
      any_string = true;
      strings.push_back(std::get<std::string>(v));
    } else if (std::holds_alternative<std::int64_t>(v)) {
      any_int = true;
      ints.push_back(std::get<std::int64_t>(v));
      doubles.push_back(static_cast<double>(std::get<std::int64_t>(v)));
    } else if (std::holds_alternative<double>(v)) {
      any_double = true;
      doubles.push_back(std::get<double>(v));
    } else {
      fail(line, "unsupported array element");
    }
  };
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || (body[i] == ',' && !in_string)) {
      flush(body.substr(start, i - start));
      start = i + 1;
    } else if (body[i] == '"') {
      in_string = !in_string;
    }
  }
  if (any_string && (any_int || any_double)) fail(line, "mixed array types");
  if (any_string) return strings;
  if (any_double) return doubles;
  if (any_int) return ints;
  return std::vector<std::int64_t>{};
}

}  // namespace

Document parse(const std::string& text) {
  Document doc;
  std::string table;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    ++lineno;
    std::string_view line = strip(strip_comment(
        std::string_view(text).substr(pos, eol - pos)));
    pos = eol + 1;
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(lineno, "bad table header");
      table = std::string(strip(line.substr(1, line.size() - 2)));
      if (table.empty()) fail(lineno, "empty table name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(lineno, "expected key = value");
    std::string key(strip(line.substr(0, eq)));
    if (key.empty()) fail(lineno, "empty key");
    if (!table.empty()) key = table + "." + key;
    std::string_view value = strip(line.substr(eq + 1));
    if (value.empty()) fail(lineno, "missing value");
    if (value.front() == '[') {
      if (value.back() != ']') fail(lineno, "unterminated array");
      doc.set(key, parse_array(value, lineno));
    } else {
      doc.set(key, parse_scalar(value, lineno));
    }
    if (eol == text.size()) break;
  }
  return doc;
}

Document parse_file(const std::string& path) {
  return parse(read_text_file(path));
}

std::optional<std::string> Document::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

std::optional<std::int64_t> Document::get_int(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  return std::nullopt;
}

std::optional<double> Document::get_double(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (auto* d = std::get_if<double>(&it->second)) return *d;
  if (auto* v = std::get_if<std::int64_t>(&it->second)) {
    return static_cast<double>(*v);
  }
  return std::nullopt;
}

std::optional<bool> Document::get_bool(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (auto* b = std::get_if<bool>(&it->second)) return *b;
  return std::nullopt;
}

std::optional<std::vector<double>> Document::get_double_array(
    const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (auto* d = std::get_if<std::vector<double>>(&it->second)) return *d;
  if (auto* v = std::get_if<std::vector<std::int64_t>>(&it->second)) {
    std::vector<double> out(v->begin(), v->end());
    return out;
  }
  return std::nullopt;
}

std::optional<std::vector<std::int64_t>> Document::get_int_array(
    const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (auto* v = std::get_if<std::vector<std::int64_t>>(&it->second)) return *v;
  return std::nullopt;
}

}  // namespace pawnprint::toml
