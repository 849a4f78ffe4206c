#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "specmon/sexpr.hpp"
#include "specmon/value.hpp"

namespace specmon {

// First-order condition / expression over named values.
struct CondExpr {
  enum class Kind { Literal, Ref, Call };

  Kind kind = Kind::Literal;
  Value literal;
  std::string name;  // identifier (Ref) or lower-cased operator (Call)
  std::vector<CondExpr> args;
  SourceLoc loc;

  static CondExpr lit(Value v, SourceLoc loc = {});
  static CondExpr ref(std::string id, SourceLoc loc = {});
  static CondExpr call(std::string head, std::vector<CondExpr> args, SourceLoc loc = {});

  friend bool operator==(const CondExpr&, const CondExpr&) = default;
};

// Numbers and strings become literals, `true`/`false` booleans, other atoms
// references, lists calls. Throws ParseError on an empty list or a list whose
// head is not an atom.
CondExpr cond_from_sexpr(const SExpr& expr);
SExpr cond_to_sexpr(const CondExpr& expr);
std::string print_cond(const CondExpr& expr);

enum class EvalErrorKind { UnboundRef, TypeMismatch, DivZero, NonFinite, BadCall };

std::string_view to_string(EvalErrorKind kind);

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, std::string name, const std::string& detail);

  EvalErrorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  EvalErrorKind kind_;
  std::string name_;
};

// Resolves operators outside the core set (attack-rule predicates). Returns
// nullopt when the head is not recognised.
using PredicateHook = std::function<std::optional<Value>(const CondExpr& call)>;

struct EvalContext {
  Tolerance tolerance;
  const PredicateHook* predicates = nullptr;
};

Value eval_expr(const CondExpr& expr, const Bindings& env, const EvalContext& ctx = {});

enum class CondStatus { Pass, Fail, Error };

struct ConditionResult {
  std::string condition;  // printed form
  CondStatus status = CondStatus::Pass;
  std::string error;      // set when status == Error
  Bindings values;        // bindings of the identifiers the condition mentions
};

struct ConditionReport {
  bool passed = true;
  std::vector<ConditionResult> results;

  std::vector<ConditionResult> failures() const;
};

// Conjunction of `conds`; a condition that raises EvalError or evaluates to a
// non-boolean counts as failed and is recorded. Empty input passes.
ConditionReport check_conditions(std::span<const CondExpr> conds, const Bindings& env,
                                 const EvalContext& ctx = {});

// Operators understood by eval_expr.
bool is_core_operator(std::string_view head);

// Type tags accepted by data-type-of.
bool is_type_tag(std::string_view name);

// Identifiers referenced by the expression (type tags of data-type-of excluded).
void collect_free_identifiers(const CondExpr& expr, std::set<std::string>& out);

// Arity / operator problems, as human-readable messages with their locations.
struct ShapeProblem {
  std::string message;
  SourceLoc loc;
};
void check_shape(const CondExpr& expr, const std::set<std::string, std::less<>>& extra_operators,
                 std::vector<ShapeProblem>& out);

}  // namespace specmon
