#include "specmon/value.hpp"

#include <algorithm>
#include <cmath>

#include "specmon/sexpr.hpp"

namespace specmon {

std::string_view Value::type_name() const {
  switch (data_.index()) {
    case 0: return "number";
    case 1: return "boolean";
    case 2: return "string";
    case 3: return "symbol";
    default: return "list";
  }
}

std::string to_string(const Value& v) {
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_symbol()) return v.as_symbol();
  if (v.is_text()) return print_sexpr(SExpr::str(v.as_text()));
  std::string out = "(";
  const auto& items = v.as_list();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(' ');
    out += to_string(items[i]);
  }
  out.push_back(')');
  return out;
}

bool values_equal(const Value& a, const Value& b, const Tolerance& tol) {
  if (a.is_number() && b.is_number()) {
    const double x = a.as_number();
    const double y = b.as_number();
    if (x == y) return true;
    return std::fabs(x - y) <= tol.atol + tol.rtol * std::max(std::fabs(x), std::fabs(y));
  }
  if (a.is_list() && b.is_list()) {
    const auto& xs = a.as_list();
    const auto& ys = b.as_list();
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!values_equal(xs[i], ys[i], tol)) return false;
    }
    return true;
  }
  return a == b;
}

bool all_finite(const Value& v) {
  if (v.is_number()) return std::isfinite(v.as_number());
  if (v.is_list()) {
    return std::all_of(v.as_list().begin(), v.as_list().end(), [](const Value& x) { return all_finite(x); });
  }
  return true;
}

}  // namespace specmon
