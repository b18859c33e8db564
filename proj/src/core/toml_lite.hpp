#pragma once

// Minimal TOML subset used for calibration files and configs: top-level
// key = value pairs, [table] sections, [[array-of-table]] sections; values
// are integers, floats, strings, and arrays of numbers.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "core/errors.hpp"

namespace morsekit::toml {

using Value = std::variant<long long, double, std::string, std::vector<double>>;

struct Table {
  std::map<std::string, Value> values;

  bool has(const std::string& k) const { return values.count(k) > 0; }
  double number(const std::string& k) const;
  long long integer(const std::string& k) const;
  std::string text(const std::string& k) const;
  std::vector<double> array(const std::string& k) const;
};

struct Document {
  Table root;
  std::map<std::string, Table> tables;                 // [name]
  std::map<std::string, std::vector<Table>> arrays;    // [[name]]
};

Document parse(const std::string& text);
Document parse_file(const std::string& path);

std::string serialize_value(const Value& v);

}  // namespace morsekit::toml
