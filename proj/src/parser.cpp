// Problem-file grammar:
//
//   vars: <ident>+
//   objective: <expr>
//   eq: <expr>                 h(x) = 0
//   ineq: <expr>               g(x) >= 0
//   switch: <expr> | <expr>    F1(x) * F2(x) = 0
//
// One declaration per line, '#' starts a comment. Expressions use + - * / ^
// with the usual precedence, parentheses, sin cos exp log and decimal
// literals. The exponent of '^' is a signed integer literal.

#include <algorithm>
#include <charconv>
#include <cctype>
#include <optional>
#include <sstream>

#include "mpsc/expr.hpp"

namespace mpsc {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Bar, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int column = 1;
};

bool is_function_name(const std::string& s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "log";
}

class Lexer {
 public:
  Lexer(const std::string& text, int line, int column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      Token t;
      t.column = offset_ + static_cast<int>(i) + 1;
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t j = i;
        while (j < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '.')) ++j;
        if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
          if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
            while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) ++k;
            j = k;
          }
        }
        t.kind = Tok::Number;
        t.text = text_.substr(i, j - i);
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
          throw ParseError(ParseError::Kind::Syntax, line_, t.column, "malformed number '" + t.text + "'");
        }
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) ++j;
        t.kind = Tok::Ident;
        t.text = text_.substr(i, j - i);
        i = j;
      } else {
        switch (c) {
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '*': t.kind = Tok::Star; break;
          case '/': t.kind = Tok::Slash; break;
          case '^': t.kind = Tok::Caret; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '|': t.kind = Tok::Bar; break;
          default:
            throw ParseError(ParseError::Kind::Syntax, line_, t.column,
                             std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
        ++i;
      }
      out.push_back(std::move(t));
    }
    Token end;
    end.column = offset_ + static_cast<int>(text_.size()) + 1;
    out.push_back(end);
    return out;
  }

 private:
  const std::string& text_;
  int line_;
  int offset_;
};

class ExprParser {
 public:
  ExprParser(std::vector<Token> tokens, const std::vector<std::string>& names, int line)
      : tokens_(std::move(tokens)), names_(names), line_(line) {}

  Expr expression() {
    Expr e = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Tok op = next().kind;
      Expr rhs = term();
      e = (op == Tok::Plus) ? e + rhs : e - rhs;
    }
    return e;
  }

  const Token& peek() const { return tokens_[pos_]; }

  Token next() { return tokens_[pos_++]; }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? "end of line" : "'" + t.text + "'";
    throw ParseError(ParseError::Kind::Syntax, line_, t.column, message + ", found " + found);
  }

 private:
  Expr term() {
    Expr e = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Tok op = next().kind;
      Expr rhs = unary();
      e = (op == Tok::Star) ? e * rhs : e / rhs;
    }
    return e;
  }

  Expr unary() {
    if (peek().kind == Tok::Minus) {
      next();
      return -unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek().kind != Tok::Caret) return base;
    next();
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      next();
      negative = true;
    }
    const Token& t = peek();
    int k = 0;
    if (t.kind != Tok::Number ||
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), k).ptr != t.text.data() + t.text.size()) {
      fail("expected integer exponent");
    }
    next();
    return pow(base, negative ? -k : k);
  }

  Expr primary() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Number:
        next();
        return Expr::constant(t.number);
      case Tok::LParen: {
        next();
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        next();
        if (is_function_name(t.text)) {
          expect(Tok::LParen, "'(' after function name");
          Expr arg = expression();
          expect(Tok::RParen, "')'");
          if (t.text == "sin") return sin(arg);
          if (t.text == "cos") return cos(arg);
          if (t.text == "exp") return exp(arg);
          return log(arg);
        }
        auto it = std::find(names_.begin(), names_.end(), t.text);
        if (it == names_.end()) {
          throw ParseError(ParseError::Kind::UndeclaredVariable, line_, t.column,
                           "undeclared variable '" + t.text + "'");
        }
        return Expr::variable(static_cast<int>(it - names_.begin()));
      }
      default:
        fail("expected an expression");
    }
  }

  std::vector<Token> tokens_;
  const std::vector<std::string>& names_;
  int line_;
  std::size_t pos_ = 0;
};

Expr parse_full(const std::string& text, const std::vector<std::string>& names, int line, int offset) {
  ExprParser parser(Lexer(text, line, offset).run(), names, line);
  Expr e = parser.expression();
  if (parser.peek().kind != Tok::End) parser.fail("unexpected trailing input");
  return e;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Expr parse_expression(const std::string& text, const std::vector<std::string>& names) {
  return parse_full(text, names, 1, 0);
}

Problem parse_problem(const std::string& text) {
  std::vector<std::string> names;
  bool have_vars = false;
  std::optional<Expr> objective;
  std::vector<Expr> equalities;
  std::vector<Expr> inequalities;
  std::vector<SwitchPair> switches;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    if (trim(line).empty()) continue;

    const auto colon = line.find(':');
    const auto key_start = line.find_first_not_of(" \t");
    if (colon == std::string::npos) {
      throw ParseError(ParseError::Kind::Syntax, line_no, static_cast<int>(key_start) + 1,
                       "expected '<keyword>: ...'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string body = line.substr(colon + 1);
    const int body_offset = static_cast<int>(colon) + 1;
    const int key_column = static_cast<int>(key_start) + 1;

    if (key == "vars") {
      if (have_vars) throw ParseError(ParseError::Kind::Syntax, line_no, key_column, "duplicate 'vars' line");
      Lexer lexer(body, line_no, body_offset);
      for (const Token& t : lexer.run()) {
        if (t.kind == Tok::End) break;
        if (t.kind != Tok::Ident || is_function_name(t.text)) {
          throw ParseError(ParseError::Kind::Syntax, line_no, t.column, "invalid variable name '" + t.text + "'");
        }
        if (std::find(names.begin(), names.end(), t.text) != names.end()) {
          throw ParseError(ParseError::Kind::Syntax, line_no, t.column, "duplicate variable '" + t.text + "'");
        }
        names.push_back(t.text);
      }
      if (names.empty()) throw ParseError(ParseError::Kind::Syntax, line_no, key_column, "no variables declared");
      have_vars = true;
      continue;
    }

    if (key != "objective" && key != "eq" && key != "ineq" && key != "switch") {
      throw ParseError(ParseError::Kind::Syntax, line_no, key_column, "unknown keyword '" + key + "'");
    }
    if (!have_vars) {
      throw ParseError(ParseError::Kind::Syntax, line_no, key_column, "'vars' must be declared first");
    }

    if (key == "objective") {
      if (objective) throw ParseError(ParseError::Kind::Syntax, line_no, key_column, "duplicate objective");
      if (trim(body).empty()) {
        throw ParseError(ParseError::Kind::EmptyObjective, line_no, body_offset + 1, "empty objective");
      }
      objective = parse_full(body, names, line_no, body_offset);
    } else if (key == "eq") {
      equalities.push_back(parse_full(body, names, line_no, body_offset));
    } else if (key == "ineq") {
      inequalities.push_back(parse_full(body, names, line_no, body_offset));
    } else {
      ExprParser parser(Lexer(body, line_no, body_offset).run(), names, line_no);
      Expr first = parser.expression();
      parser.expect(Tok::Bar, "'|' between switching functions");
      Expr second = parser.expression();
      if (parser.peek().kind != Tok::End) parser.fail("unexpected trailing input");
      switches.push_back({std::move(first), std::move(second)});
    }
  }

  if (!have_vars) throw ParseError(ParseError::Kind::Syntax, line_no + 1, 1, "missing 'vars' line");
  if (!objective) throw ParseError(ParseError::Kind::EmptyObjective, line_no + 1, 1, "missing objective");
  return Problem(std::move(names), std::move(*objective), std::move(equalities), std::move(inequalities),
                 std::move(switches));
}

}  // namespace mpsc
