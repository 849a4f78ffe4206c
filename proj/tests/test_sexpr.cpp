#include <gtest/gtest.h>

#include "specmon/sexpr.hpp"

using namespace specmon;

TEST(Sexpr, MinimalList) {
  auto forms = parse_sexprs("(a 1)");
  ASSERT_EQ(forms.size(), 1u);
  EXPECT_EQ(forms[0], SExpr::list({SExpr::atom("a"), SExpr::num(1)}));
}

TEST(Sexpr, BracketsAreLists) {
  auto forms = parse_sexprs("[equal der-term 4]");
  ASSERT_EQ(forms.size(), 1u);
  EXPECT_EQ(forms[0], SExpr::list({SExpr::atom("equal"), SExpr::atom("der-term"), SExpr::num(4)}));
  EXPECT_EQ(parse_sexprs("[a (b)]"), parse_sexprs("(a [b])"));
}

TEST(Sexpr, UnbalancedReportsLine) {
  try {
    parse_sexprs("(a (b");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 1);
  }
}

TEST(Sexpr, StrayCloser) {
  EXPECT_THROW(parse_sexprs("a)"), ParseError);
  EXPECT_THROW(parse_sexprs("(a]"), ParseError);
}

TEST(Sexpr, CommentsStripped) {
  auto forms = parse_sexprs("; header\n(a ; trailing\n b) ; done");
  ASSERT_EQ(forms.size(), 1u);
  EXPECT_EQ(forms[0].items.size(), 2u);
}

TEST(Sexpr, LocationsTracked) {
  auto forms = parse_sexprs("\n  (x\n   y)");
  EXPECT_EQ(forms[0].loc.line, 2);
  EXPECT_EQ(forms[0].loc.column, 3);
  EXPECT_EQ(forms[0].items[1].loc.line, 3);
}

TEST(Sexpr, NumbersVersusAtoms) {
  auto f = parse_sexprs("(-1.5 - +2 1e3 1x -x)")[0];
  EXPECT_EQ(f.items[0].kind, SExpr::Kind::Number);
  EXPECT_EQ(f.items[1].kind, SExpr::Kind::Atom);
  EXPECT_EQ(f.items[2].kind, SExpr::Kind::Number);
  EXPECT_DOUBLE_EQ(f.items[3].number, 1000);
  EXPECT_EQ(f.items[4].kind, SExpr::Kind::Atom);
  EXPECT_EQ(f.items[5].kind, SExpr::Kind::Atom);
}

TEST(Sexpr, StringsRoundTrip) {
  auto f = parse_sexprs(R"((say "a \"b\" ; c"))")[0];
  EXPECT_EQ(f.items[1].kind, SExpr::Kind::String);
  EXPECT_EQ(parse_sexprs(print_sexpr(f))[0], f);
}

TEST(Sexpr, FormatNumberShortest) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(4), "4");
  EXPECT_EQ(std::stod(format_number(1.0 / 3)), 1.0 / 3);
}

TEST(Sexpr, KeywordsCaseInsensitive) {
  EXPECT_TRUE(SExpr::atom(":Entry-Events").is_keyword(":entry-events"));
  EXPECT_FALSE(SExpr::atom("abc").is_keyword("abd"));
}
