#include <gtest/gtest.h>

#include <cmath>

#include "specmon/condition.hpp"
#include "specmon/sexpr.hpp"

using namespace specmon;

namespace {

CondExpr cond(std::string_view text) { return cond_from_sexpr(parse_sexprs(text).at(0)); }

Value eval(std::string_view text, const Bindings& env = {}, Tolerance tol = {}) {
  return eval_expr(cond(text), env, EvalContext{tol, nullptr});
}

EvalErrorKind error_of(std::string_view text, const Bindings& env = {}) {
  try {
    eval(text, env);
  } catch (const EvalError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no EvalError for " << text;
  return EvalErrorKind::BadCall;
}

const Bindings kDer = {{"der-term", 4.0}, {"kd", 2.0}, {"new-error", 5.0}, {"old-error", 3.0}, {"time-step", 1.0}};

}  // namespace

TEST(Condition, ArithmeticShape) { EXPECT_EQ(eval("(* 2 (/ (- 5 3) 1))"), Value(4.0)); }

TEST(Condition, DataTypeOf) {
  EXPECT_EQ(eval("[data-type-of the-error number]", {{"the-error", 0.25}}), Value(true));
  EXPECT_EQ(eval("[data-type-of the-error number]", {{"the-error", Value::text("x")}}), Value(false));
  EXPECT_EQ(eval("(data-type-of x)", {{"x", true}}), Value::symbol("boolean"));
  EXPECT_EQ(eval("(data-type-of x list)", {{"x", Value::List{1.0}}}), Value(true));
}

TEST(Condition, DerivativeFormula) {
  EXPECT_EQ(eval("[equal der-term (* kd (/ (- new-error old-error) time-step))]", kDer), Value(true));
}

TEST(Condition, Errors) {
  EXPECT_EQ(error_of("(+ x 1)"), EvalErrorKind::UnboundRef);
  EXPECT_EQ(error_of("(+ x 1)", {{"x", Value::text("a")}}), EvalErrorKind::TypeMismatch);
  EXPECT_EQ(error_of("(/ 1 0)"), EvalErrorKind::DivZero);
  EXPECT_EQ(error_of("(* x x)", {{"x", 1e200}}), EvalErrorKind::NonFinite);
  EXPECT_EQ(error_of("(frobnicate 1)"), EvalErrorKind::BadCall);
  EXPECT_EQ(error_of("(and 1 true)"), EvalErrorKind::TypeMismatch);
}

TEST(Condition, ShortCircuit) {
  EXPECT_EQ(eval("(and false (/ 1 0))"), Value(false));
  EXPECT_EQ(eval("(or true unbound)"), Value(true));
}

TEST(Condition, UnaryArithmetic) {
  EXPECT_EQ(eval("(- 3)"), Value(-3.0));
  EXPECT_EQ(eval("(/ 4)"), Value(0.25));
  EXPECT_EQ(eval("(+ 1 2 3)"), Value(6.0));
}

TEST(Condition, Member) {
  Bindings env = {{"xs", Value::List{1.0, Value::text("a")}}, {"x", 1.0}};
  EXPECT_EQ(eval("(member x xs)", env), Value(true));
  EXPECT_EQ(eval("(member 2 xs)", env), Value(false));
}

TEST(Condition, EmptySetIsVacuous) {
  std::vector<CondExpr> none;
  EXPECT_TRUE(check_conditions(none, {}).passed);
  EXPECT_TRUE(check_conditions(none, {{"x", Value::text("anything")}}).passed);
}

TEST(Condition, NormalPostconditionsPass) {
  std::vector<CondExpr> post = {
      cond("[and [data-type-of der-term number] [equal der-term (* kd (/ (- new-error old-error) time-step))]]")};
  EXPECT_TRUE(check_conditions(post, kDer).passed);
}

TEST(Condition, PerturbedBeyondToleranceFails) {
  // tolerance at 4 is 1e-9 + 1e-9*4 = 5e-9; move by ten times that
  const Tolerance tol;
  const double band = tol.atol + tol.rtol * 4.0;
  Bindings env = kDer;
  env["der-term"] = 4.0 + 10 * band;
  std::vector<CondExpr> post = {cond("(data-type-of der-term number)"),
                                cond("[equal der-term (* kd (/ (- new-error old-error) time-step))]")};
  ConditionReport r = check_conditions(post, env);
  EXPECT_FALSE(r.passed);
  auto failures = r.failures();
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_NE(failures[0].condition.find("equal"), std::string::npos);
  EXPECT_TRUE(failures[0].values.contains("der-term"));
  EXPECT_TRUE(failures[0].values.contains("kd"));

  env["der-term"] = 4.0 + 0.5 * band;
  EXPECT_TRUE(check_conditions(post, env).passed);
}

TEST(Condition, ErrorsBecomeFailureRecords) {
  std::vector<CondExpr> c = {cond("(less-than x 1)")};
  ConditionReport r = check_conditions(c, {{"x", Value::text("oops")}});
  ASSERT_FALSE(r.passed);
  EXPECT_EQ(r.results[0].status, CondStatus::Error);
  EXPECT_FALSE(r.results[0].error.empty());
}

TEST(Condition, NonBooleanConditionFails) {
  std::vector<CondExpr> c = {cond("(+ 1 2)")};
  EXPECT_FALSE(check_conditions(c, {}).passed);
}

TEST(Condition, ToleranceFormula) {
  const Tolerance tol{1e-3, 1e-2};
  EXPECT_TRUE(values_equal(100.0, 101.0, tol));   // 1 <= 0.001 + 1.01
  EXPECT_FALSE(values_equal(100.0, 102.0, tol));  // 2 > 0.001 + 1.02
  EXPECT_TRUE(values_equal(Value::text("a"), Value::text("a"), tol));
  EXPECT_FALSE(values_equal(Value(1.0), Value(true), tol));
}

TEST(Condition, RoundTripPrint) {
  const char* text = "(or (not (less-than a 1.5)) (equal s \"txt\") (data-type-of a number))";
  CondExpr c = cond(text);
  EXPECT_EQ(cond(print_cond(c)), c);
}

TEST(Condition, FreeIdentifiers) {
  std::set<std::string> ids;
  collect_free_identifiers(cond("(and (data-type-of x number) (equal y (+ z 1)))"), ids);
  EXPECT_EQ(ids, (std::set<std::string>{"x", "y", "z"}));
}
