#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace specmon {

struct Text {
  std::string value;
  friend bool operator==(const Text&, const Text&) = default;
};

struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

// Runtime value observed in a trace or computed by a condition.
class Value {
 public:
  using List = std::vector<Value>;

  Value() : data_(0.0) {}
  Value(double v) : data_(v) {}
  Value(int v) : data_(static_cast<double>(v)) {}
  Value(bool v) : data_(v) {}
  Value(Text v) : data_(std::move(v)) {}
  Value(Symbol v) : data_(std::move(v)) {}
  Value(List v) : data_(std::move(v)) {}
  Value(const char*) = delete;

  static Value text(std::string s) { return Value(Text{std::move(s)}); }
  static Value symbol(std::string s) { return Value(Symbol{std::move(s)}); }

  bool is_number() const { return std::holds_alternative<double>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_text() const { return std::holds_alternative<Text>(data_); }
  bool is_symbol() const { return std::holds_alternative<Symbol>(data_); }
  bool is_list() const { return std::holds_alternative<List>(data_); }

  double as_number() const { return std::get<double>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const std::string& as_text() const { return std::get<Text>(data_).value; }
  const std::string& as_symbol() const { return std::get<Symbol>(data_).name; }
  const List& as_list() const { return std::get<List>(data_); }

  // One of: number, boolean, string, symbol, list.
  std::string_view type_name() const;

  // Exact structural equality (no tolerance).
  friend bool operator==(const Value&, const Value&) = default;

 private:
  std::variant<double, bool, Text, Symbol, List> data_;
};

// Store: identifier -> value. Ordered so reports are deterministic.
using Bindings = std::map<std::string, Value, std::less<>>;

std::string to_string(const Value& v);

// Numeric tolerance used by `equal`.
struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-9;
};

// |a-b| <= atol + rtol*max(|a|,|b|) for numbers; structural equality otherwise.
bool values_equal(const Value& a, const Value& b, const Tolerance& tol);

// True when every number inside v is finite.
bool all_finite(const Value& v);

}  // namespace specmon
