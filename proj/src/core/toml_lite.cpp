#include "core/toml_lite.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace morsekit::toml {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Value parse_scalar(const std::string& raw, int line_no) {
  const std::string t = trim(raw);
  if (t.empty()) throw ParseError("toml: empty value at line " + std::to_string(line_no));
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ParseError("toml: unterminated string at line " + std::to_string(line_no));
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) {
        ++i;
        switch (t[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: out += t[i];
        }
      } else {
        out += t[i];
      }
    }
    return out;
  }
  if (t.front() == '[') {
    if (t.back() != ']')
      throw ParseError("toml: unterminated array at line " + std::to_string(line_no));
    std::vector<double> arr;
    std::string body = t.substr(1, t.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string it = trim(item);
      if (it.empty()) continue;
      arr.push_back(std::stod(it));
    }
    return arr;
  }
  // number: integer when it parses cleanly without . e E
  if (t.find('.') == std::string::npos && t.find('e') == std::string::npos &&
      t.find('E') == std::string::npos && t != "inf" && t != "-inf" && t != "nan") {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(t, &pos);
      if (pos == t.size()) return v;
    } catch (...) {
    }
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos == t.size()) return v;
  } catch (...) {
  }
  throw ParseError("toml: cannot parse value '" + t + "' at line " +
                   std::to_string(line_no));
}

}  // namespace

double Table::number(const std::string& k) const {
  auto it = values.find(k);
  if (it == values.end()) throw ParseError("toml: missing key '" + k + "'");
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<long long>(&it->second))
    return static_cast<double>(*i);
  throw ParseError("toml: key '" + k + "' is not a number");
}

long long Table::integer(const std::string& k) const {
  auto it = values.find(k);
  if (it == values.end()) throw ParseError("toml: missing key '" + k + "'");
  if (const auto* i = std::get_if<long long>(&it->second)) return *i;
  throw ParseError("toml: key '" + k + "' is not an integer");
}

std::string Table::text(const std::string& k) const {
  auto it = values.find(k);
  if (it == values.end()) throw ParseError("toml: missing key '" + k + "'");
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ParseError("toml: key '" + k + "' is not a string");
}

std::vector<double> Table::array(const std::string& k) const {
  auto it = values.find(k);
  if (it == values.end()) throw ParseError("toml: missing key '" + k + "'");
  if (const auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
  throw ParseError("toml: key '" + k + "' is not an array");
}

Document parse(const std::string& text) {
  Document doc;
  Table* current = &doc.root;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      // keep # inside quotes
      bool quoted = false;
      for (std::size_t i = 0; i < hash; ++i)
        if (line[i] == '"') quoted = !quoted;
      if (!quoted) line = line.substr(0, hash);
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("[[", 0) == 0) {
      if (t.size() < 5 || t.substr(t.size() - 2) != "]]")
        throw ParseError("toml: bad table array header at line " + std::to_string(line_no));
      const std::string name = trim(t.substr(2, t.size() - 4));
      doc.arrays[name].emplace_back();
      current = &doc.arrays[name].back();
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError("toml: bad table header at line " + std::to_string(line_no));
      const std::string name = trim(t.substr(1, t.size() - 2));
      current = &doc.tables[name];
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("toml: expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ParseError("toml: empty key at line " + std::to_string(line_no));
    current->values[key] = parse_scalar(t.substr(eq + 1), line_no);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string serialize_value(const Value& v) {
  char buf[64];
  if (const auto* i = std::get_if<long long>(&v)) {
    std::snprintf(buf, sizeof buf, "%lld", *i);
    return buf;
  }
  if (const auto* d = std::get_if<double>(&v)) {
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
      s += ".0";
    return s;
  }
  if (const auto* s = std::get_if<std::string>(&v)) {
    std::string out = "\"";
    for (char c : *s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  }
  const auto& arr = std::get<std::vector<double>>(v);
  std::string out = "[";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (i) out += ", ";
    out += serialize_value(arr[i]);
  }
  return out + "]";
}

}  // namespace morsekit::toml
