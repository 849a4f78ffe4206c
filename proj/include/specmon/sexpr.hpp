#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specmon {

// Position of a node in its source text (1-based). Locations are metadata:
// they never take part in structural equality.
struct SourceLoc {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

std::string to_string(const SourceLoc& loc);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourceLoc loc);

  const SourceLoc& loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  SourceLoc loc_;
};

struct SExpr {
  enum class Kind { Atom, Number, String, List };

  Kind kind = Kind::Atom;
  std::string text;  // atom name or string contents
  double number = 0.0;
  std::vector<SExpr> items;
  SourceLoc loc;

  static SExpr atom(std::string name, SourceLoc loc = {});
  static SExpr num(double value, SourceLoc loc = {});
  static SExpr str(std::string value, SourceLoc loc = {});
  static SExpr list(std::vector<SExpr> items, SourceLoc loc = {});

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  // Atom whose text equals `name` ignoring ASCII case.
  bool is_keyword(std::string_view name) const;

  friend bool operator==(const SExpr&, const SExpr&) = default;
};

// Reads every top-level form. `;` starts a comment running to end of line;
// `[ ]` and `( )` are interchangeable list delimiters.
std::vector<SExpr> parse_sexprs(std::string_view text);

// Canonical single-line rendering; parse_sexprs(print(x)) == {x}.
std::string print_sexpr(const SExpr& expr);

// Shortest text that reads back as exactly `value`.
std::string format_number(double value);

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);

}  // namespace specmon
