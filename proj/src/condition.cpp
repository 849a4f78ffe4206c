#include "specmon/condition.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace specmon {

CondExpr CondExpr::lit(Value v, SourceLoc loc) {
  CondExpr e;
  e.kind = Kind::Literal;
  e.literal = std::move(v);
  e.loc = loc;
  return e;
}

CondExpr CondExpr::ref(std::string id, SourceLoc loc) {
  CondExpr e;
  e.kind = Kind::Ref;
  e.name = std::move(id);
  e.loc = loc;
  return e;
}

CondExpr CondExpr::call(std::string head, std::vector<CondExpr> args, SourceLoc loc) {
  CondExpr e;
  e.kind = Kind::Call;
  e.name = std::move(head);
  e.args = std::move(args);
  e.loc = loc;
  return e;
}

CondExpr cond_from_sexpr(const SExpr& expr) {
  switch (expr.kind) {
    case SExpr::Kind::Number:
      return CondExpr::lit(expr.number, expr.loc);
    case SExpr::Kind::String:
      return CondExpr::lit(Value::text(expr.text), expr.loc);
    case SExpr::Kind::Atom:
      if (expr.is_keyword("true")) return CondExpr::lit(true, expr.loc);
      if (expr.is_keyword("false")) return CondExpr::lit(false, expr.loc);
      return CondExpr::ref(expr.text, expr.loc);
    case SExpr::Kind::List:
      break;
  }
  if (expr.items.empty()) throw ParseError("empty condition", expr.loc);
  const SExpr& head = expr.items.front();
  if (!head.is_atom()) throw ParseError("condition head must be an operator name", head.loc);
  std::vector<CondExpr> args;
  args.reserve(expr.items.size() - 1);
  for (std::size_t i = 1; i < expr.items.size(); ++i) args.push_back(cond_from_sexpr(expr.items[i]));
  return CondExpr::call(to_lower(head.text), std::move(args), expr.loc);
}

namespace {

SExpr value_to_sexpr(const Value& v) {
  if (v.is_number()) return SExpr::num(v.as_number());
  if (v.is_bool()) return SExpr::atom(v.as_bool() ? "true" : "false");
  if (v.is_text()) return SExpr::str(v.as_text());
  if (v.is_symbol()) return SExpr::atom(v.as_symbol());
  // Lists have no literal syntax; render their elements for diagnostics.
  std::vector<SExpr> items;
  for (const auto& x : v.as_list()) items.push_back(value_to_sexpr(x));
  return SExpr::list(std::move(items));
}

}  // namespace

SExpr cond_to_sexpr(const CondExpr& expr) {
  switch (expr.kind) {
    case CondExpr::Kind::Literal:
      return value_to_sexpr(expr.literal);
    case CondExpr::Kind::Ref:
      return SExpr::atom(expr.name);
    case CondExpr::Kind::Call: {
      std::vector<SExpr> items;
      items.reserve(expr.args.size() + 1);
      items.push_back(SExpr::atom(expr.name));
      for (const auto& a : expr.args) items.push_back(cond_to_sexpr(a));
      return SExpr::list(std::move(items));
    }
  }
  return SExpr::atom("?");
}

std::string print_cond(const CondExpr& expr) { return print_sexpr(cond_to_sexpr(expr)); }

std::string_view to_string(EvalErrorKind kind) {
  switch (kind) {
    case EvalErrorKind::UnboundRef: return "unbound identifier";
    case EvalErrorKind::TypeMismatch: return "type mismatch";
    case EvalErrorKind::DivZero: return "division by zero";
    case EvalErrorKind::NonFinite: return "non-finite result";
    case EvalErrorKind::BadCall: return "bad call";
  }
  return "error";
}

EvalError::EvalError(EvalErrorKind kind, std::string name, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), name_(std::move(name)) {}

namespace {

constexpr std::array<std::string_view, 12> kCoreOperators = {
    "and", "or", "not", "equal", "less-than", "greater-than", "member", "data-type-of", "+", "-", "*", "/"};

constexpr std::array<std::string_view, 5> kTypeTags = {"number", "boolean", "string", "symbol", "list"};

bool require_bool(const Value& v, const CondExpr& call) {
  if (!v.is_bool()) {
    throw EvalError(EvalErrorKind::TypeMismatch, call.name,
                    "'" + call.name + "' expects booleans, got " + std::string(v.type_name()));
  }
  return v.as_bool();
}

double require_number(const Value& v, const CondExpr& call) {
  if (!v.is_number()) {
    throw EvalError(EvalErrorKind::TypeMismatch, call.name,
                    "'" + call.name + "' expects numbers, got " + std::string(v.type_name()));
  }
  return v.as_number();
}

void require_arity(const CondExpr& call, std::size_t lo, std::size_t hi) {
  if (call.args.size() < lo || call.args.size() > hi) {
    throw EvalError(EvalErrorKind::BadCall, call.name,
                    "'" + call.name + "' called with " + std::to_string(call.args.size()) + " arguments");
  }
}

std::string tag_of(const CondExpr& e) {
  if (e.kind == CondExpr::Kind::Ref) return to_lower(e.name);
  if (e.kind == CondExpr::Kind::Literal && e.literal.is_symbol()) return to_lower(e.literal.as_symbol());
  if (e.kind == CondExpr::Kind::Literal && e.literal.is_text()) return to_lower(e.literal.as_text());
  return {};
}

double checked(double v, const CondExpr& call) {
  if (!std::isfinite(v)) throw EvalError(EvalErrorKind::NonFinite, call.name, "'" + call.name + "' overflowed");
  return v;
}

Value eval_arith(const CondExpr& call, const Bindings& env, const EvalContext& ctx) {
  require_arity(call, 1, static_cast<std::size_t>(-1));
  const char op = call.name[0];
  double acc = require_number(eval_expr(call.args[0], env, ctx), call);
  if (call.args.size() == 1) {
    if (op == '-') return -acc;
    if (op == '/') {
      if (acc == 0.0) throw EvalError(EvalErrorKind::DivZero, call.name, "reciprocal of zero");
      return checked(1.0 / acc, call);
    }
    return acc;
  }
  for (std::size_t i = 1; i < call.args.size(); ++i) {
    const double x = require_number(eval_expr(call.args[i], env, ctx), call);
    switch (op) {
      case '+': acc = acc + x; break;
      case '-': acc = acc - x; break;
      case '*': acc = acc * x; break;
      default:
        if (x == 0.0) throw EvalError(EvalErrorKind::DivZero, call.name, "division by zero");
        acc = acc / x;
        break;
    }
    checked(acc, call);
  }
  return acc;
}

Value eval_call(const CondExpr& call, const Bindings& env, const EvalContext& ctx) {
  const std::string& h = call.name;
  if (h == "and" || h == "or") {
    const bool is_and = h == "and";
    for (const auto& a : call.args) {
      const bool v = require_bool(eval_expr(a, env, ctx), call);
      if (is_and && !v) return false;
      if (!is_and && v) return true;
    }
    return is_and;
  }
  if (h == "not") {
    require_arity(call, 1, 1);
    return !require_bool(eval_expr(call.args[0], env, ctx), call);
  }
  if (h == "equal") {
    require_arity(call, 2, 2);
    return values_equal(eval_expr(call.args[0], env, ctx), eval_expr(call.args[1], env, ctx), ctx.tolerance);
  }
  if (h == "less-than" || h == "greater-than") {
    require_arity(call, 2, 2);
    const double a = require_number(eval_expr(call.args[0], env, ctx), call);
    const double b = require_number(eval_expr(call.args[1], env, ctx), call);
    return h == "less-than" ? a < b : a > b;
  }
  if (h == "member") {
    require_arity(call, 2, 2);
    const Value needle = eval_expr(call.args[0], env, ctx);
    const Value hay = eval_expr(call.args[1], env, ctx);
    if (!hay.is_list()) throw EvalError(EvalErrorKind::TypeMismatch, h, "'member' expects a list");
    return std::any_of(hay.as_list().begin(), hay.as_list().end(),
                       [&](const Value& x) { return values_equal(needle, x, ctx.tolerance); });
  }
  if (h == "data-type-of") {
    require_arity(call, 1, 2);
    const Value v = eval_expr(call.args[0], env, ctx);
    if (call.args.size() == 1) return Value::symbol(std::string(v.type_name()));
    const std::string tag = tag_of(call.args[1]);
    if (!is_type_tag(tag)) throw EvalError(EvalErrorKind::BadCall, h, "unknown type tag");
    return v.type_name() == tag;
  }
  if (h == "+" || h == "-" || h == "*" || h == "/") return eval_arith(call, env, ctx);
  if (ctx.predicates && *ctx.predicates) {
    if (auto v = (*ctx.predicates)(call)) return *v;
  }
  throw EvalError(EvalErrorKind::BadCall, h, "unknown operator '" + h + "'");
}

void collect_values(const CondExpr& e, const Bindings& env, Bindings& out) {
  if (e.kind == CondExpr::Kind::Ref) {
    if (auto it = env.find(e.name); it != env.end()) out.insert(*it);
    return;
  }
  for (const auto& a : e.args) collect_values(a, env, out);
}

}  // namespace

Value eval_expr(const CondExpr& expr, const Bindings& env, const EvalContext& ctx) {
  switch (expr.kind) {
    case CondExpr::Kind::Literal:
      return expr.literal;
    case CondExpr::Kind::Ref: {
      auto it = env.find(expr.name);
      if (it == env.end()) throw EvalError(EvalErrorKind::UnboundRef, expr.name, "'" + expr.name + "'");
      return it->second;
    }
    case CondExpr::Kind::Call:
      return eval_call(expr, env, ctx);
  }
  return {};
}

std::vector<ConditionResult> ConditionReport::failures() const {
  std::vector<ConditionResult> out;
  for (const auto& r : results) {
    if (r.status != CondStatus::Pass) out.push_back(r);
  }
  return out;
}

ConditionReport check_conditions(std::span<const CondExpr> conds, const Bindings& env, const EvalContext& ctx) {
  ConditionReport report;
  report.results.reserve(conds.size());
  for (const auto& c : conds) {
    ConditionResult r;
    try {
      const Value v = eval_expr(c, env, ctx);
      if (!v.is_bool()) {
        r.status = CondStatus::Error;
        r.error = "condition evaluated to " + std::string(v.type_name()) + ", not boolean";
      } else {
        r.status = v.as_bool() ? CondStatus::Pass : CondStatus::Fail;
      }
    } catch (const EvalError& e) {
      r.status = CondStatus::Error;
      r.error = e.what();
    }
    if (r.status != CondStatus::Pass) {
      report.passed = false;
      r.condition = print_cond(c);
      collect_values(c, env, r.values);
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

bool is_core_operator(std::string_view head) {
  return std::find(kCoreOperators.begin(), kCoreOperators.end(), head) != kCoreOperators.end();
}

bool is_type_tag(std::string_view name) {
  return std::find(kTypeTags.begin(), kTypeTags.end(), name) != kTypeTags.end();
}

void collect_free_identifiers(const CondExpr& expr, std::set<std::string>& out) {
  switch (expr.kind) {
    case CondExpr::Kind::Literal:
      return;
    case CondExpr::Kind::Ref:
      out.insert(expr.name);
      return;
    case CondExpr::Kind::Call:
      for (std::size_t i = 0; i < expr.args.size(); ++i) {
        if (expr.name == "data-type-of" && i == 1) continue;
        collect_free_identifiers(expr.args[i], out);
      }
      return;
  }
}

void check_shape(const CondExpr& expr, const std::set<std::string, std::less<>>& extra_operators,
                 std::vector<ShapeProblem>& out) {
  if (expr.kind != CondExpr::Kind::Call) return;
  const std::string& h = expr.name;
  const std::size_t n = expr.args.size();
  auto bad = [&](const std::string& why) { out.push_back({"'" + h + "' " + why, expr.loc}); };
  if (is_core_operator(h)) {
    if (h == "not" && n != 1) bad("takes 1 argument");
    if ((h == "equal" || h == "member" || h == "less-than" || h == "greater-than") && n != 2) bad("takes 2 arguments");
    if (h == "data-type-of") {
      if (n < 1 || n > 2) {
        bad("takes 1 or 2 arguments");
      } else if (n == 2 && !is_type_tag(tag_of(expr.args[1]))) {
        bad("second argument must be one of number, boolean, string, symbol, list");
      }
    }
    if ((h == "+" || h == "-" || h == "*" || h == "/") && n < 1) bad("takes at least 1 argument");
  } else if (!extra_operators.contains(h)) {
    out.push_back({"unknown operator '" + h + "'", expr.loc});
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (h == "data-type-of" && i == 1) continue;
    check_shape(expr.args[i], extra_operators, out);
  }
}

}  // namespace specmon
