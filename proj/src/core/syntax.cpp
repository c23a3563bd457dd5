#include "datamon/core.hpp"

#include <cctype>
#include <sstream>

namespace datamon {

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

const std::set<std::string> kKeywords = {"tt",     "ff",     "exists", "forall", "min",  "max",
                                         "gforall", "guard", "frees",  "true"};

class Lexer {
public:
  explicit Lexer(const std::string &s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = src_.substr(start, pos_ - start);
      } else if (c == '!' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
        advance();
        advance();
        t.kind = Tok::Sym;
        t.text = "!=";
      } else if (std::string("<>[].|&!=*(){},").find(c) != std::string::npos) {
        advance();
        t.kind = Tok::Sym;
        t.text = std::string(1, c);
      } else {
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      out.push_back(t);
    }
  }

private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
      } else {
        return;
      }
    }
  }

  const std::string &src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  explicit Parser(const std::string &text) : toks_(Lexer(text).run()) {}

  FormulaPtr formula_eof() {
    FormulaPtr f = formula();
    if (peek().kind != Tok::End)
      fail("unexpected '" + peek().text + "'");
    return f;
  }

  BExprPtr bexpr_eof() {
    BExprPtr b = bexpr();
    if (peek().kind != Tok::End)
      fail("unexpected '" + peek().text + "'");
    return b;
  }

private:
  const Token &peek() const { return toks_[i_]; }
  Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool at_sym(const char *s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_kw(const char *s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    throw SyntaxError(t.kind == Tok::End ? msg + " (at end of input)" : msg, t.line, t.col);
  }
  void expect_sym(const char *s) {
    if (!at_sym(s))
      fail(std::string("expected '") + s + "'");
    take();
  }
  void expect_kw(const char *s) {
    if (!at_kw(s))
      fail(std::string("expected '") + s + "'");
    take();
  }
  std::string data_var() {
    const Token &t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text) || is_rvar_name(t.text))
      fail("expected data variable");
    return take().text;
  }
  std::string rec_var() {
    const Token &t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text) || !is_rvar_name(t.text))
      fail("expected recursion variable");
    return take().text;
  }

  FormulaPtr formula() {
    FormulaPtr l = conj();
    while (at_sym("|")) {
      Span s{peek().line, peek().col};
      take();
      l = with_span(f_or(l, conj()), s);
    }
    return l;
  }

  FormulaPtr conj() {
    FormulaPtr l = unary();
    while (at_sym("&")) {
      Span s{peek().line, peek().col};
      take();
      l = with_span(f_and(l, unary()), s);
    }
    return l;
  }

  FormulaPtr unary() {
    const Token t = peek();
    Span s{t.line, t.col};
    if (t.kind == Tok::Ident) {
      if (t.text == "tt") {
        take();
        return with_span(f_tt(), s);
      }
      if (t.text == "ff") {
        take();
        return with_span(f_ff(), s);
      }
      if (t.text == "exists" || t.text == "forall") {
        take();
        std::string x = data_var();
        expect_sym(".");
        FormulaPtr body = formula();
        return with_span(t.text == "exists" ? f_exists(x, body) : f_forall(x, body), s);
      }
      if (t.text == "min" || t.text == "max") {
        take();
        std::string X = rec_var();
        expect_sym(".");
        FormulaPtr body = formula();
        return with_span(t.text == "min" ? f_min(X, body) : f_max(X, body), s);
      }
      if (t.text == "gforall") {
        take();
        std::string x = data_var();
        expect_kw("guard");
        expect_sym("{");
        FormulaPtr g = formula();
        expect_sym("}");
        expect_kw("frees");
        expect_sym("{");
        std::vector<std::string> frees;
        if (!at_sym("}")) {
          frees.push_back(data_var());
          while (at_sym(",")) {
            take();
            frees.push_back(data_var());
          }
        }
        expect_sym("}");
        expect_sym(".");
        FormulaPtr body = formula();
        return with_span(f_gforall(x, g, frees, body), s);
      }
      if (!kKeywords.count(t.text) && is_rvar_name(t.text)) {
        take();
        return with_span(f_var(t.text), s);
      }
      fail("unexpected '" + t.text + "'");
    }
    if (at_sym("(")) {
      take();
      FormulaPtr f = formula();
      expect_sym(")");
      return f;
    }
    if (at_sym("<") || at_sym("[")) {
      bool diamond = at_sym("<");
      take();
      BExprPtr g = (diamond ? at_sym(">") : at_sym("]")) ? b_true() : bexpr();
      expect_sym(diamond ? ">" : "]");
      FormulaPtr body = unary();
      return with_span(diamond ? f_diamond(g, body) : f_box(g, body), s);
    }
    if (t.kind == Tok::End)
      fail("unexpected end of input");
    fail("unknown operator '" + t.text + "'");
  }

  BExprPtr bexpr() {
    BExprPtr l = batom();
    while (at_sym("&")) {
      take();
      l = b_and(l, batom());
    }
    return l;
  }

  Term term() {
    if (at_sym("*")) {
      take();
      return Term::Star();
    }
    return Term::Var(data_var());
  }

  BExprPtr batom() {
    if (at_sym("!")) {
      take();
      return b_not(batom());
    }
    if (at_sym("(")) {
      take();
      BExprPtr b = bexpr();
      expect_sym(")");
      return b;
    }
    if (at_kw("true") || at_kw("tt")) {
      take();
      return b_true();
    }
    Term l = term();
    if (at_sym("=")) {
      take();
      return b_eq(l, term());
    }
    if (at_sym("!=")) {
      take();
      BExprPtr acc = b_neq(l, term());
      // "* != x, y" abbreviates "* != x & * != y"
      while (at_sym(",")) {
        take();
        acc = b_and(acc, b_neq(l, term()));
      }
      return acc;
    }
    fail("expected '=' or '!='");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

std::string term_str(const Term &t) { return t.star ? "*" : t.var; }

void render_b(const BExprPtr &b, std::ostringstream &os, bool nested) {
  switch (b->kind) {
  case BExpr::Kind::True:
    os << "true";
    return;
  case BExpr::Kind::Eq:
    os << term_str(b->lhs) << "=" << term_str(b->rhs);
    return;
  case BExpr::Kind::Not:
    if (b->a->kind == BExpr::Kind::Eq) {
      os << term_str(b->a->lhs) << "!=" << term_str(b->a->rhs);
      return;
    }
    os << "!";
    render_b(b->a, os, true);
    return;
  case BExpr::Kind::And:
    if (nested)
      os << "(";
    render_b(b->a, os, false);
    os << " & ";
    render_b(b->b, os, b->b->kind == BExpr::Kind::And);
    if (nested)
      os << ")";
    return;
  }
}

// ctx: 0 top/binder body, 1 operand of '|', 2 operand of '&', 3 modal body
void render_f(const FormulaPtr &f, std::ostringstream &os, int ctx) {
  switch (f->kind) {
  case FKind::Tt:
    os << "tt";
    return;
  case FKind::Ff:
    os << "ff";
    return;
  case FKind::RecVar:
    os << f->name;
    return;
  case FKind::Diamond:
  case FKind::Box: {
    bool d = f->kind == FKind::Diamond;
    os << (d ? "<" : "[");
    if (f->guard->kind != BExpr::Kind::True)
      render_b(f->guard, os, false);
    os << (d ? ">" : "]");
    render_f(f->a, os, 3);
    return;
  }
  case FKind::Or:
  case FKind::And: {
    bool isor = f->kind == FKind::Or;
    bool paren = isor ? ctx >= 2 : ctx >= 3;
    if (paren)
      os << "(";
    render_f(f->a, os, isor ? 1 : 2);
    os << (isor ? " | " : " & ");
    // right operand of the same operator renders flat; parser is left-assoc
    render_f(f->b, os, isor ? 2 : 3);
    if (paren)
      os << ")";
    return;
  }
  default:
    break;
  }
  bool paren = ctx != 0;
  if (paren)
    os << "(";
  switch (f->kind) {
  case FKind::Exists:
  case FKind::Forall:
    os << (f->kind == FKind::Exists ? "exists " : "forall ") << f->name << ". ";
    render_f(f->a, os, 0);
    break;
  case FKind::Min:
  case FKind::Max:
    os << (f->kind == FKind::Min ? "min " : "max ") << f->name << ". ";
    render_f(f->a, os, 0);
    break;
  case FKind::GForall: {
    os << "gforall " << f->name << " guard { ";
    render_f(f->a, os, 0);
    os << " } frees { ";
    for (std::size_t i = 0; i < f->frees.size(); ++i)
      os << (i ? ", " : "") << f->frees[i];
    os << (f->frees.empty() ? "} . " : " } . ");
    render_f(f->b, os, 0);
    break;
  }
  default:
    break;
  }
  if (paren)
    os << ")";
}

} // namespace

bool is_rvar_name(const std::string &id) {
  return !id.empty() && std::isupper(static_cast<unsigned char>(id[0]));
}

FormulaPtr parse_formula(const std::string &text) { return Parser(text).formula_eof(); }

BExprPtr parse_bexpr(const std::string &text) { return Parser(text).bexpr_eof(); }

std::string render_bexpr(const BExprPtr &b) {
  std::ostringstream os;
  render_b(b, os, false);
  return os.str();
}

std::string render_formula(const FormulaPtr &f) {
  std::ostringstream os;
  render_f(f, os, 0);
  return os.str();
}

} // namespace datamon
