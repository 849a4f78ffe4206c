#include "specmon/sexpr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace specmon {

std::string to_string(const SourceLoc& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

ParseError::ParseError(const std::string& message, SourceLoc loc)
    : std::runtime_error("line " + std::to_string(loc.line) + ", column " +
                         std::to_string(loc.column) + ": " + message),
      message_(message),
      loc_(loc) {}

SExpr SExpr::atom(std::string name, SourceLoc loc) {
  SExpr e;
  e.kind = Kind::Atom;
  e.text = std::move(name);
  e.loc = loc;
  return e;
}

SExpr SExpr::num(double value, SourceLoc loc) {
  SExpr e;
  e.kind = Kind::Number;
  e.number = value;
  e.loc = loc;
  return e;
}

SExpr SExpr::str(std::string value, SourceLoc loc) {
  SExpr e;
  e.kind = Kind::String;
  e.text = std::move(value);
  e.loc = loc;
  return e;
}

SExpr SExpr::list(std::vector<SExpr> items, SourceLoc loc) {
  SExpr e;
  e.kind = Kind::List;
  e.items = std::move(items);
  e.loc = loc;
  return e;
}

bool SExpr::is_keyword(std::string_view name) const {
  return kind == Kind::Atom && iequals(text, name);
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "0";
  return std::string(buf.data(), end);
}

namespace {

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '"' || c == ';' ||
         std::isspace(static_cast<unsigned char>(c));
}

// A token is numeric when it starts like a number and converts completely.
bool try_number(std::string_view token, double& out) {
  std::string_view body = token;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  std::string_view digits = body;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (!digits.empty() && digits.front() == '.') digits.remove_prefix(1);
  if (digits.empty() || !std::isdigit(static_cast<unsigned char>(digits.front()))) return false;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size()) return false;
  if (!std::isfinite(value)) return false;
  out = value;
  return true;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> forms;
    for (;;) {
      skip_blank();
      if (at_end()) break;
      char c = peek();
      if (c == ')' || c == ']') throw ParseError(std::string("unexpected '") + c + "'", here());
      forms.push_back(read_form());
    }
    return forms;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  SourceLoc here() const { return {line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_form() {
    SourceLoc start = here();
    char c = peek();
    if (c == '(' || c == '[') return read_list(start);
    if (c == '"') return read_string(start);
    return read_token(start);
  }

  SExpr read_list(SourceLoc start) {
    const char open = peek();
    const char close = open == '(' ? ')' : ']';
    advance();
    std::vector<SExpr> items;
    for (;;) {
      skip_blank();
      if (at_end()) throw ParseError(std::string("unbalanced '") + open + "'", start);
      char c = peek();
      if (c == ')' || c == ']') {
        if (c != close) {
          throw ParseError(std::string("mismatched '") + c + "' closing '" + open + "' opened at " +
                               to_string(start),
                           here());
        }
        advance();
        return SExpr::list(std::move(items), start);
      }
      items.push_back(read_form());
    }
  }

  SExpr read_string(SourceLoc start) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      if (at_end()) throw ParseError("unterminated string", start);
      char c = peek();
      if (c == '"') {
        advance();
        return SExpr::str(std::move(value), start);
      }
      if (c == '\\') {
        advance();
        if (at_end()) throw ParseError("unterminated string", start);
        char e = peek();
        value.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
  }

  SExpr read_token(SourceLoc start) {
    std::size_t begin = pos_;
    while (!at_end() && !is_delimiter(peek())) advance();
    std::string_view token = text_.substr(begin, pos_ - begin);
    double value = 0.0;
    if (try_number(token, value)) return SExpr::num(value, start);
    return SExpr::atom(std::string(token), start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

void print_into(const SExpr& e, std::string& out) {
  switch (e.kind) {
    case SExpr::Kind::Atom:
      out += e.text;
      break;
    case SExpr::Kind::Number:
      out += format_number(e.number);
      break;
    case SExpr::Kind::String:
      out.push_back('"');
      for (char c : e.text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
          out += "\\n";
          continue;
        }
        out.push_back(c);
      }
      out.push_back('"');
      break;
    case SExpr::Kind::List:
      out.push_back('(');
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out.push_back(' ');
        print_into(e.items[i], out);
      }
      out.push_back(')');
      break;
  }
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).read_all(); }

std::string print_sexpr(const SExpr& expr) {
  std::string out;
  print_into(expr, out);
  return out;
}

}  // namespace specmon
