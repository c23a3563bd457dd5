#include "datamon/monitor.hpp"

#include <cctype>
#include <sstream>

namespace datamon {

namespace {

MonitorPtr make(MKind k, BExprPtr g, std::string n, MonitorPtr a, MonitorPtr b) {
  auto m = std::make_shared<Monitor>();
  m->kind = k;
  m->guard = std::move(g);
  m->name = std::move(n);
  m->a = std::move(a);
  m->b = std::move(b);
  return m;
}

class Parser {
public:
  explicit Parser(const std::string &t) : s_(t) {}

  MonitorPtr parse() {
    MonitorPtr m = sum();
    skip();
    if (i_ < s_.size())
      error("unexpected input");
    return m;
  }

private:
  const std::string &s_;
  std::size_t i_ = 0;

  [[noreturn]] void error(const std::string &msg) const {
    int line = 1, col = 1;
    for (std::size_t k = 0; k < i_ && k < s_.size(); ++k) {
      if (s_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, line, col);
  }

  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n')
          ++i_;
      } else {
        break;
      }
    }
  }

  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c))
      error(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip();
    std::size_t st = i_;
    if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ++i_;
    }
    if (st == i_)
      error("expected identifier");
    return s_.substr(st, i_ - st);
  }

  MonitorPtr sum() {
    MonitorPtr m = prod();
    while (eat('+'))
      m = m_or(m, prod());
    return m;
  }

  MonitorPtr prod() {
    MonitorPtr m = unary();
    while (eat('&'))
      m = m_and(m, unary());
    return m;
  }

  MonitorPtr unary() {
    skip();
    if (i_ >= s_.size())
      error("unexpected end of input");
    if (s_[i_] == '(') {
      // a guard prefix is a parenthesized expression followed by '.'
      std::size_t depth = 0, j = i_;
      for (; j < s_.size(); ++j) {
        if (s_[j] == '(')
          ++depth;
        else if (s_[j] == ')' && --depth == 0)
          break;
      }
      if (j >= s_.size())
        error("unbalanced parenthesis");
      std::size_t k = j + 1;
      while (k < s_.size() && std::isspace(static_cast<unsigned char>(s_[k])))
        ++k;
      if (k < s_.size() && s_[k] == '.') {
        std::string inner = s_.substr(i_ + 1, j - i_ - 1);
        BExprPtr b;
        try {
          b = inner.find_first_not_of(" \t\r\n") == std::string::npos ? b_true() : parse_bexpr(inner);
        } catch (const SyntaxError &e) {
          error(std::string("in guard: ") + e.what());
        }
        i_ = k + 1;
        return m_guard(b, unary());
      }
      ++i_;
      MonitorPtr m = sum();
      expect(')');
      return m;
    }
    std::string id = ident();
    if (id == "yes")
      return m_yes();
    if (id == "end")
      return m_end();
    if (id == "guess") {
      std::string x = ident();
      expect('.');
      return m_guess(x, sum());
    }
    if (id == "rec") {
      std::string X = ident();
      if (!is_rvar_name(X))
        error("recursion variables start with an uppercase letter");
      expect('.');
      return m_rec(X, sum());
    }
    if (is_rvar_name(id))
      return m_var(id);
    error("unexpected identifier '" + id + "'");
  }
};

// ctx: 0 top or binder body, 1 operand of '+', 2 operand of '&', 3 guard body
void render(const MonitorPtr &m, std::ostringstream &os, int ctx) {
  switch (m->kind) {
  case MKind::Yes:
    os << "yes";
    return;
  case MKind::End:
    os << "end";
    return;
  case MKind::Var:
    os << m->name;
    return;
  case MKind::Guard:
    os << "(" << render_bexpr(m->guard) << ").";
    render(m->a, os, 3);
    return;
  case MKind::Guess:
  case MKind::Rec: {
    bool paren = ctx != 0;
    if (paren)
      os << "(";
    os << (m->kind == MKind::Guess ? "guess " : "rec ") << m->name << ". ";
    render(m->a, os, 0);
    if (paren)
      os << ")";
    return;
  }
  case MKind::Or: {
    bool paren = ctx >= 2;
    if (paren)
      os << "(";
    render(m->a, os, 1);
    os << " + ";
    render(m->b, os, m->b->kind == MKind::Or ? 2 : 1);
    if (paren)
      os << ")";
    return;
  }
  case MKind::And: {
    bool paren = ctx >= 3;
    if (paren)
      os << "(";
    render(m->a, os, 2);
    os << " & ";
    render(m->b, os, m->b->kind == MKind::And ? 3 : 2);
    if (paren)
      os << ")";
    return;
  }
  }
}

bool guarded_from(const MonitorPtr &m, std::set<std::string> &open) {
  switch (m->kind) {
  case MKind::Yes:
  case MKind::End:
    return true;
  case MKind::Var:
    return !open.count(m->name);
  case MKind::Guard: {
    std::set<std::string> none;
    return guarded_from(m->a, none);
  }
  case MKind::Guess:
    return guarded_from(m->a, open);
  case MKind::Rec: {
    bool had = open.count(m->name);
    open.insert(m->name);
    bool ok = guarded_from(m->a, open);
    if (!had)
      open.erase(m->name);
    return ok;
  }
  case MKind::Or:
  case MKind::And:
    return guarded_from(m->a, open) && guarded_from(m->b, open);
  }
  return false;
}

} // namespace

MonitorPtr m_yes() { return make(MKind::Yes, nullptr, {}, nullptr, nullptr); }
MonitorPtr m_end() { return make(MKind::End, nullptr, {}, nullptr, nullptr); }
MonitorPtr m_guard(BExprPtr b, MonitorPtr m) { return make(MKind::Guard, std::move(b), {}, std::move(m), nullptr); }
MonitorPtr m_guess(std::string x, MonitorPtr m) { return make(MKind::Guess, nullptr, std::move(x), std::move(m), nullptr); }
MonitorPtr m_or(MonitorPtr l, MonitorPtr r) { return make(MKind::Or, nullptr, {}, std::move(l), std::move(r)); }
MonitorPtr m_and(MonitorPtr l, MonitorPtr r) { return make(MKind::And, nullptr, {}, std::move(l), std::move(r)); }
MonitorPtr m_rec(std::string X, MonitorPtr m) { return make(MKind::Rec, nullptr, std::move(X), std::move(m), nullptr); }
MonitorPtr m_var(std::string X) { return make(MKind::Var, nullptr, std::move(X), nullptr, nullptr); }

MonitorPtr parse_monitor(const std::string &text) { return Parser(text).parse(); }

std::string render_monitor(const MonitorPtr &m) {
  std::ostringstream os;
  render(m, os, 0);
  return os.str();
}

bool monitor_equal(const MonitorPtr &a, const MonitorPtr &b) {
  if (a->kind != b->kind || a->name != b->name)
    return false;
  if (a->kind == MKind::Guard && !bexpr_equal(a->guard, b->guard))
    return false;
  if (static_cast<bool>(a->a) != static_cast<bool>(b->a) || static_cast<bool>(a->b) != static_cast<bool>(b->b))
    return false;
  return (!a->a || monitor_equal(a->a, b->a)) && (!a->b || monitor_equal(a->b, b->b));
}

std::size_t monitor_size(const MonitorPtr &m) {
  return 1 + (m->a ? monitor_size(m->a) : 0) + (m->b ? monitor_size(m->b) : 0);
}

std::set<std::string> monitor_data_vars(const MonitorPtr &m) {
  std::set<std::string> out;
  std::function<void(const MonitorPtr &)> go = [&](const MonitorPtr &n) {
    if (n->kind == MKind::Guess)
      out.insert(n->name);
    if (n->kind == MKind::Guard)
      bexpr_vars(n->guard, out);
    if (n->a)
      go(n->a);
    if (n->b)
      go(n->b);
  };
  go(m);
  return out;
}

bool monitor_guarded(const MonitorPtr &m) {
  std::set<std::string> open;
  return guarded_from(m, open);
}

MonitorPtr synthesize(const FormulaPtr &f) {
  NormalizeResult nr = normalize(f, true);
  if (!nr.guarded)
    throw DomainError("synthesize: recursion variable not under a modality: " +
                      (nr.warnings.empty() ? std::string() : nr.warnings.front()));
  std::function<MonitorPtr(const FormulaPtr &, const std::string &)> go = [&](const FormulaPtr &g,
                                                                                const std::string &path) {
    std::string pre = path.empty() ? "" : path + ".";
    switch (g->kind) {
    case FKind::Tt:
      return m_yes();
    case FKind::Ff:
      return m_end();
    case FKind::Diamond:
      return m_guard(g->guard, go(g->a, pre + "0"));
    case FKind::Exists:
      return m_guess(g->name, go(g->a, pre + "0"));
    case FKind::Or:
      return m_or(go(g->a, pre + "0"), go(g->b, pre + "1"));
    case FKind::And:
      return m_and(go(g->a, pre + "0"), go(g->b, pre + "1"));
    case FKind::Min:
      return m_rec(g->name, go(g->a, pre + "0"));
    case FKind::RecVar:
      return m_var(g->name);
    default:
      throw DomainError("synthesize: formula outside cHMLd at subterm '" + path + "'");
    }
  };
  if (!free_data_vars(nr.formula).empty())
    throw DomainError("synthesize: formula has free data variables");
  return go(nr.formula, "");
}

} // namespace datamon
