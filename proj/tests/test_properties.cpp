#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "oracle/random_spec.hpp"
#include "specmon/report.hpp"
#include "specmon/sexpr.hpp"
#include "specmon/spec_printer.hpp"
#include "specmon/validator.hpp"

using namespace specmon;
using namespace specmon::testing;

TEST(Properties, RandomSpecsRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    RandomSpec r = random_spec(rng);
    const std::string printed = print_spec(r.spec);
    AppSpec again = parse_spec(printed);
    ASSERT_EQ(again, r.spec) << r.text;
    ASSERT_EQ(print_spec(again), printed);
  }
}

TEST(Properties, RandomSpecsValidate) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    RandomSpec r = random_spec(rng);
    ValidationReport rep = validate_spec(r.spec);
    ASSERT_TRUE(rep.ok()) << r.text << "\n" << format_report(rep);
  }
}

// Mutated input either parses or fails with ParseError; nothing else escapes.
TEST(Properties, ParserIsTotal) {
  std::mt19937_64 rng(13);
  const std::string base(bundled_spec());
  const std::string alphabet = "()[]:;\" \n\tabc-*0.9e+";
  std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits; ++k) {
      const std::size_t p = pos(rng) % text.size();
      switch (rng() % 3) {
        case 0: text[p] = alphabet[ch(rng)]; break;
        case 1: text.erase(p, 1 + rng() % 8); break;
        default: text.insert(p, 1, alphabet[ch(rng)]); break;
      }
      if (text.empty()) text = "(";
    }
    try {
      AppSpec s = parse_spec(text);
      (void)validate_spec(s);
    } catch (const ParseError&) {
    }
  }
}

TEST(Properties, ToleranceIsSymmetric) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_real_distribution<double> eps(0, 1e-6);
  for (int i = 0; i < 5000; ++i) {
    const double a = u(rng);
    const double b = rng() % 2 ? a + u(rng) * eps(rng) : u(rng);
    const Tolerance t{eps(rng), eps(rng)};
    ASSERT_EQ(values_equal(a, b, t), values_equal(b, a, t)) << a << " " << b;
    ASSERT_TRUE(values_equal(a, a, t));
  }
}

TEST(Properties, MonitorIsDeterministic) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    RandomSpec r = random_spec(rng);
    auto trace = random_trace(r, rng, 50);
    try {
      const std::string a = format_json_report(run_monitor(r.spec, trace));
      const std::string b = format_json_report(run_monitor(r.spec, trace));
      ASSERT_EQ(a, b);
    } catch (const EngineError&) {
      EXPECT_THROW(run_monitor(r.spec, trace), EngineError);
    }
  }
}

TEST(Properties, CheckerHoldsOnRandomTraces) {
  std::mt19937_64 rng(16);
  MonitorConfig c;
  c.check_invariants = true;
  for (int i = 0; i < 300; ++i) {
    RandomSpec r = random_spec(rng);
    auto trace = random_trace(r, rng, 50);
    try {
      InvariantChecker::check_verdict(run_monitor(r.spec, trace, c));
    } catch (const EngineError&) {
    }
  }
}

// A prefix never has fewer alarms than it had at that point in the full run.
TEST(Properties, AlarmsArePrefixStable) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    RandomSpec r = random_spec(rng);
    auto trace = random_trace(r, rng, 50);
    Verdict full;
    try {
      full = run_monitor(r.spec, trace);
    } catch (const EngineError&) {
      continue;
    }
    const std::size_t cut = trace.size() / 2;
    std::vector<RuntimeEvent> prefix(trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(cut));
    Verdict part = run_monitor(r.spec, prefix);
    std::size_t expected = 0;
    for (const auto& a : full.alarms) expected += cut > 0 && a.seq <= prefix.back().seq;
    ASSERT_EQ(part.alarms.size(), expected);
  }
}

TEST(Properties, CleanTankRunsStayClean) {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> gain(0.1, 2.0), sp(1.0, 10.0);
  for (int i = 0; i < 10; ++i) {
    tank::ControllerParams p;
    p.kp = gain(rng);
    p.ki = gain(rng);
    p.kd = gain(rng);
    p.set_point = sp(rng);
    Verdict v = run_monitor(tank_spec(), tank::simulate_trace(p, {}, tank::AttackScenario::none(), 150), tank_config(p));
    ASSERT_EQ(v.kind, VerdictKind::Ok);
  }
}
