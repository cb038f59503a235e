#include "pbt/parser.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "pbt/errors.hpp"

namespace pbt {

const char* const kHoleName = "_hole";

namespace {

enum class Tk {
  LIdent,
  UIdent,
  Int,
  Dot,
  Comma,
  Semi,
  LParen,
  RParen,
  LBrack,
  RBrack,
  Backslash,
  ColonDash,
  ColonEq,
  ColonColon,
  Colon,
  FatArrow,
  Lolli,
  Eq,
  Bang,
  Minus,
  Pair,
  End
};

struct Token {
  Tk k;
  std::string text;
  long long ival = 0;
  int line = 1;
  int col = 1;
};

bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& src, const std::string& where) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace((unsigned char)c)) {
      ++col;
      ++i;
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int tl = line, tc = col;
    auto sym = [&](Tk k, const char* text, int n) {
      out.push_back({k, text, 0, tl, tc});
      i += n;
      col += n;
    };
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) ++j;
      Token t{Tk::Int, src.substr(i, j - i), 0, tl, tc};
      t.ival = std::stoll(t.text);
      out.push_back(t);
      col += (int)(j - i);
      i = j;
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string text = src.substr(i, j - i);
      Tk k = (std::isupper((unsigned char)c) || c == '_') ? Tk::UIdent
                                                          : Tk::LIdent;
      out.push_back({k, std::move(text), 0, tl, tc});
      col += (int)(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '.':
        sym(Tk::Dot, ".", 1);
        continue;
      case ',':
        sym(Tk::Comma, ",", 1);
        continue;
      case ';':
        sym(Tk::Semi, ";", 1);
        continue;
      case '(':
        sym(Tk::LParen, "(", 1);
        continue;
      case ')':
        sym(Tk::RParen, ")", 1);
        continue;
      case '[':
        sym(Tk::LBrack, "[", 1);
        continue;
      case ']':
        sym(Tk::RBrack, "]", 1);
        continue;
      case '\\':
        sym(Tk::Backslash, "\\", 1);
        continue;
      case '!':
        sym(Tk::Bang, "!", 1);
        continue;
      case ':':
        if (i + 1 < src.size() && src[i + 1] == '-') {
          sym(Tk::ColonDash, ":-", 2);
        } else if (i + 1 < src.size() && src[i + 1] == ':') {
          sym(Tk::ColonColon, "::", 2);
        } else if (i + 1 < src.size() && src[i + 1] == '=') {
          sym(Tk::ColonEq, ":=", 2);
        } else {
          sym(Tk::Colon, ":", 1);
        }
        continue;
      case '=':
        if (i + 1 < src.size() && src[i + 1] == '>') {
          sym(Tk::FatArrow, "=>", 2);
        } else {
          sym(Tk::Eq, "=", 1);
        }
        continue;
      case '-':
        if (i + 1 < src.size() && src[i + 1] == 'o' &&
            (i + 2 >= src.size() || !ident_char(src[i + 2]))) {
          sym(Tk::Lolli, "-o", 2);
        } else {
          sym(Tk::Minus, "-", 1);
        }
        continue;
      case '<':
        if (i + 2 < src.size() && src[i + 1] == 'c' && src[i + 2] == '>') {
          sym(Tk::Pair, "<c>", 3);
          continue;
        }
        throw ParseError(where + ": unexpected '<'", tl, tc);
      default:
        throw ParseError(
            where + ": unexpected character '" + std::string(1, c) + "'", tl,
            tc);
    }
  }
  out.push_back({Tk::End, "", 0, line, col});
  return out;
}

const std::set<std::string> kKeywords = {"mode", "ctor",    "axiom",
                                         "weights", "prop", "some",
                                         "pi",   "tt",      "ff"};

// Names with a meaning in certificates or in collected/recorded output
// terms; user programs may not declare them.
const std::set<std::string> kCertReserved = {
    "height", "sze",   "max",  "random", "noweight", "cases", "collect",
    "huniv",  "any",   "subterm", "proper", "hcons", "hnil",  "hole",
    "mtt",    "meq",   "mand", "mor",    "msome",    "mbc",   "minit",
    "mimp",   "mall",  "mlimp", "mbang"};

const std::map<std::string, int> kMaxTreeCtors = {
    {"mtt", 0},  {"meq", 0},  {"minit", 0}, {"mand", 2}, {"mor", 2},
    {"msome", 2}, {"mbc", 1}, {"mimp", 1},  {"mlimp", 1}, {"mbang", 1},
    {"mall", 1}, {"hcons", 2}, {"hnil", 0}};

struct Use {
  enum Ctx { TermPos, GoalHead, Antecedent };
  std::string name;
  int arity;
  int line, col;
  Ctx ctx;
};

struct Parser {
  std::vector<Token> ts;
  size_t pos = 0;
  std::string where;

  SurfaceProgram sp;
  bool mode_set = false;
  std::vector<Use> uses;
  std::vector<std::string>* cur_vars = nullptr;
  int anon_counter = 0;
  std::vector<std::string> binders;

  const Program* prog = nullptr;  // standalone goal/term/cert parsing
  bool cert_mode = false;

  const Token& peek(int k = 0) const {
    size_t i = pos + k;
    return i < ts.size() ? ts[i] : ts.back();
  }
  Token next() { return ts[pos < ts.size() - 1 ? pos++ : pos]; }
  bool at(Tk k) const { return peek().k == k; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(where + ": " + msg, t.line, t.col);
  }
  Token expect(Tk k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return next();
  }

  // ---- terms -----------------------------------------------------------

  bool starts_atom() const {
    switch (peek().k) {
      case Tk::LIdent:
      case Tk::UIdent:
      case Tk::Int:
      case Tk::LParen:
        return true;
      default:
        return false;
    }
  }

  Term parse_term_prec() {
    Term l = parse_app();
    if (at(Tk::ColonColon)) {
      Token t = next();
      Term r = parse_term_prec();
      uses.push_back({"::", 2, t.line, t.col, Use::TermPos});
      return mk_app(mk_app(mk_const("::"), l), r);
    }
    return l;
  }

  Term parse_app() {
    const Token& h = peek();
    Term head = parse_atom_term();
    std::vector<Term> args;
    while (starts_atom()) args.push_back(parse_atom_term());
    if (head->tag == Tag::Const)
      uses.push_back({head->name, (int)args.size(), h.line, h.col,
                      Use::TermPos});
    return mk_apps(head, args);
  }

  int binder_index(const std::string& name) const {
    for (int i = (int)binders.size() - 1; i >= 0; --i)
      if (binders[i] == name) return (int)binders.size() - 1 - i;
    return -1;
  }

  Term parse_atom_term() {
    const Token& t = peek();
    switch (t.k) {
      case Tk::Int:
        return mk_int(next().ival);
      case Tk::LParen: {
        next();
        if (at(Tk::Minus) && peek(1).k == Tk::Int) {
          next();
          long long v = next().ival;
          expect(Tk::RParen, ")");
          return mk_int(-v);
        }
        Term inner = parse_term_prec();
        expect(Tk::RParen, ")");
        return inner;
      }
      case Tk::LIdent:
      case Tk::UIdent: {
        if (peek(1).k == Tk::Backslash) {
          std::string name = next().text;
          if (kKeywords.count(name)) fail("'" + name + "' cannot bind");
          next();  // backslash
          binders.push_back(name);
          Term body = parse_term_prec();
          binders.pop_back();
          return mk_abs(body, name);
        }
        std::string name = next().text;
        if (int ix = binder_index(name); ix >= 0) return mk_bound(ix);
        if (t.k == Tk::LIdent) {
          if (kKeywords.count(name))
            fail("keyword '" + name + "' in term position");
          return mk_const(name);
        }
        // capitalized: a variable
        if (cert_mode) {
          if (name == "_") return mk_const(kHoleName);
          fail("variables are not allowed in certificates");
        }
        if (!cur_vars) fail("free variable " + name + " not allowed here");
        if (name == "_") name = "_" + std::to_string(++anon_counter);
        bool seen = false;
        for (const auto& v : *cur_vars) seen = seen || v == name;
        if (!seen) cur_vars->push_back(name);
        return mk_fvar(name);
      }
      default:
        fail("expected a term");
    }
  }

  // ---- goals -----------------------------------------------------------

  Goal parse_goal_top() { return parse_disj(); }

  Goal parse_disj() {
    Goal l = parse_conj();
    if (at(Tk::Semi)) {
      next();
      return mk_or(l, parse_disj());
    }
    return l;
  }

  Goal parse_conj() {
    Goal l = parse_imp();
    if (at(Tk::Comma)) {
      next();
      return mk_and(l, parse_conj());
    }
    return l;
  }

  Goal parse_imp() {
    const Token& h = peek();
    Goal l = parse_unary();
    if (at(Tk::FatArrow) || at(Tk::Lolli)) {
      bool lin = at(Tk::Lolli);
      next();
      if (l->tag != GoalTag::Atom)
        throw ParseError(
            where + ": the left side of an implication must be an atom",
            h.line, h.col);
      auto [head, args] = raw_spine(l->t1);
      if (head->tag == Tag::Const)
        uses.push_back({head->name, (int)args.size(), h.line, h.col,
                        Use::Antecedent});
      Goal r = parse_imp();
      return lin ? mk_impl(l->t1, r) : mk_impi(l->t1, r);
    }
    return l;
  }

  Goal finish_atom_or_eq(Term t) {
    if (at(Tk::Eq)) {
      next();
      Term r = parse_term_prec();
      return mk_eq(std::move(t), r);
    }
    auto [head, args] = raw_spine(t);
    switch (head->tag) {
      case Tag::Const: {
        // mark the spine use as a goal head rather than a term position
        for (auto it = uses.rbegin(); it != uses.rend(); ++it)
          if (it->name == head->name && it->arity == (int)args.size() &&
              it->ctx == Use::TermPos) {
            it->ctx = Use::GoalHead;
            break;
          }
        return mk_atom(std::move(t));
      }
      case Tag::FVar:
      case Tag::Bound:
        return mk_atom(std::move(t));  // resolved at run time
      default:
        fail("this term cannot be used as a goal");
    }
  }

  Goal parse_unary() {
    const Token& t = peek();
    if (t.k == Tk::Bang) {
      next();
      return mk_bang(parse_unary());
    }
    if (t.k == Tk::LIdent && (t.text == "tt" || t.text == "ff")) {
      next();
      return t.text == "tt" ? mk_tt() : mk_ff();
    }
    if (t.k == Tk::LIdent && (t.text == "some" || t.text == "pi")) {
      bool ex = t.text == "some";
      next();
      if (!at(Tk::LIdent) && !at(Tk::UIdent)) fail("expected a binder name");
      std::string name = next().text;
      if (kKeywords.count(name)) fail("'" + name + "' cannot bind");
      expect(Tk::Backslash, "\\");
      binders.push_back(name);
      Goal body = parse_goal_top();
      binders.pop_back();
      return ex ? mk_some(name, body) : mk_all(name, body);
    }
    if (t.k == Tk::LParen) {
      // Could be a parenthesized term heading an atom/equation, or a
      // parenthesized goal. Try the term reading first; rewind on failure.
      size_t save_pos = pos;
      size_t save_uses = uses.size();
      size_t save_vars = cur_vars ? cur_vars->size() : 0;
      int save_anon = anon_counter;
      size_t save_binders = binders.size();
      try {
        Term tm = parse_term_prec();
        return finish_atom_or_eq(std::move(tm));
      } catch (const ParseError&) {
        pos = save_pos;
        uses.resize(save_uses);
        if (cur_vars) cur_vars->resize(save_vars);
        anon_counter = save_anon;
        binders.resize(save_binders);
      }
      next();  // '('
      Goal g = parse_goal_top();
      expect(Tk::RParen, ")");
      return g;
    }
    Term tm = parse_term_prec();
    return finish_atom_or_eq(std::move(tm));
  }

  // ---- program items ----------------------------------------------------

  void check_declarable(const std::string& name, int line, int col) {
    if (kKeywords.count(name) || kCertReserved.count(name))
      throw ParseError(where + ": '" + name + "' is reserved", line, col);
  }

  void parse_item() {
    const Token& t = peek();
    if (t.k == Tk::LIdent && t.text == "mode" && peek(1).k == Tk::LIdent) {
      next();
      Token m = expect(Tk::LIdent, "horn, hh, or linear");
      if (m.text == "horn")
        sp.mode = Mode::Horn;
      else if (m.text == "hh")
        sp.mode = Mode::HH;
      else if (m.text == "linear")
        sp.mode = Mode::Linear;
      else
        throw ParseError(where + ": unknown mode " + m.text, m.line, m.col);
      if (mode_set)
        throw ParseError(where + ": mode declared twice", m.line, m.col);
      mode_set = true;
      expect(Tk::Dot, ".");
      return;
    }
    if (t.k == Tk::LIdent && t.text == "ctor") {
      next();
      std::string name;
      if (at(Tk::ColonColon))
        name = next().text;
      else
        name = expect(Tk::LIdent, "a constructor name").text;
      check_declarable(name, t.line, t.col);
      if (sp.ctors.count(name))
        throw ParseError(where + ": constructor " + name + " declared twice",
                         t.line, t.col);
      Token a = expect(Tk::Int, "an arity");
      sp.ctors[name] = (int)a.ival;
      expect(Tk::Dot, ".");
      return;
    }
    if (t.k == Tk::LIdent && t.text == "axiom") {
      next();
      Token n = expect(Tk::LIdent, "an axiom name");
      check_declarable(n.text, n.line, n.col);
      sp.axioms.insert(n.text);
      expect(Tk::Dot, ".");
      return;
    }
    if (t.k == Tk::LIdent && t.text == "weights") {
      next();
      Token n = expect(Tk::LIdent, "a predicate name");
      expect(Tk::LBrack, "[");
      std::vector<long long> ws;
      for (;;) {
        ws.push_back(expect(Tk::Int, "a weight").ival);
        if (at(Tk::Comma)) {
          next();
          continue;
        }
        break;
      }
      expect(Tk::RBrack, "]");
      expect(Tk::Dot, ".");
      sp.weights[n.text] = std::move(ws);
      return;
    }
    if (t.k == Tk::LIdent && t.text == "prop") {
      next();
      Token n = expect(Tk::LIdent, "a property name");
      check_declarable(n.text, n.line, n.col);
      for (const auto& p : sp.props)
        if (p.name == n.text)
          throw ParseError(where + ": property " + n.text + " declared twice",
                           n.line, n.col);
      expect(Tk::ColonEq, ":=");
      PropertySpec ps;
      ps.name = n.text;
      ps.line = n.line;
      cur_vars = &ps.vars;
      anon_counter = 0;
      auto part = [&](const char* label) {
        Token lt = expect(Tk::LIdent, label);
        if (lt.text != label)
          throw ParseError(where + ": expected '" + label + "'", lt.line,
                           lt.col);
        expect(Tk::Colon, ":");
        Goal g = parse_goal_top();
        expect(Tk::Dot, ".");
        return g;
      };
      Goal gen = part("gen");
      Goal when = nullptr;
      if (at(Tk::LIdent) && peek().text == "when" && peek(1).k == Tk::Colon)
        when = part("when");
      Goal then = part("then");
      cur_vars = nullptr;
      std::map<std::string, int> offsets;
      for (size_t i = 0; i < ps.vars.size(); ++i)
        offsets[ps.vars[i]] = (int)i;
      ps.gen = close_fvars_goal(gen, offsets, 0);
      ps.when = when ? close_fvars_goal(when, offsets, 0) : nullptr;
      ps.then = close_fvars_goal(then, offsets, 0);
      sp.props.push_back(std::move(ps));
      return;
    }
    // a clause
    Clause c;
    c.line = t.line;
    c.vars.clear();
    cur_vars = &c.vars;
    anon_counter = 0;
    c.head = parse_term_prec();
    auto [head, hargs] = raw_spine(c.head);
    if (head->tag != Tag::Const)
      throw ParseError(where + ": clause head must be a predicate atom",
                       t.line, t.col);
    check_declarable(head->name, t.line, t.col);
    // the head spine was recorded as a term use; drop that entry
    for (auto it = uses.rbegin(); it != uses.rend(); ++it)
      if (it->name == head->name && it->ctx == Use::TermPos) {
        uses.erase(std::next(it).base());
        break;
      }
    if (at(Tk::ColonDash)) {
      next();
      c.body = parse_goal_top();
    } else {
      c.body = mk_tt();
    }
    expect(Tk::Dot, ".");
    cur_vars = nullptr;
    sp.clauses.push_back(std::move(c));
  }

  // ---- validation --------------------------------------------------------

  void validate_program() {
    std::map<std::string, int> pred_arity;
    for (const auto& c : sp.clauses) {
      auto [head, hargs] = raw_spine(c.head);
      auto [it, fresh] = pred_arity.emplace(head->name, (int)hargs.size());
      if (!fresh && it->second != (int)hargs.size())
        throw ArityError(
            where + ": predicate " + head->name + " used with differing arities",
            c.line);
      if (sp.ctors.count(head->name))
        throw ParseError(
            where + ": " + head->name + " is declared as a constructor", c.line);
    }
    for (const auto& a : sp.axioms) {
      if (pred_arity.count(a) || sp.ctors.count(a))
        throw ParseError(where + ": axiom " + a + " clashes with a declaration");
      pred_arity[a] = 0;
    }
    // antecedent-only predicates
    for (const auto& u : uses) {
      if (u.ctx != Use::Antecedent) continue;
      if (pred_arity.count(u.name)) {
        if (pred_arity[u.name] != u.arity)
          throw ArityError(where + ": predicate " + u.name +
                               " used with differing arities",
                           u.line, u.col);
        continue;
      }
      if (sp.ctors.count(u.name))
        throw ParseError(where + ": constructor " + u.name +
                             " cannot be hypothesized",
                         u.line, u.col);
      auto [it, fresh] = sp.hyp_preds.emplace(u.name, u.arity);
      if (!fresh && it->second != u.arity)
        throw ArityError(where + ": predicate " + u.name +
                             " used with differing arities",
                         u.line, u.col);
    }
    auto arity_of = [&](const std::string& name) -> const int* {
      if (auto it = pred_arity.find(name); it != pred_arity.end())
        return &it->second;
      if (auto it = sp.hyp_preds.find(name); it != sp.hyp_preds.end())
        return &it->second;
      return nullptr;
    };
    for (const auto& u : uses) {
      if (u.ctx == Use::GoalHead) {
        const int* pa = arity_of(u.name);
        if (!pa) {
          if (sp.ctors.count(u.name))
            throw ParseError(where + ": constructor " + u.name +
                                 " used as a goal",
                             u.line, u.col);
          throw UnboundPredicate(where + ": unknown predicate " + u.name,
                                 u.line, u.col);
        }
        if (*pa != u.arity)
          throw ArityError(where + ": " + u.name + " takes " +
                               std::to_string(*pa) + " arguments, not " +
                               std::to_string(u.arity),
                           u.line, u.col);
      } else if (u.ctx == Use::TermPos) {
        if (auto it = sp.ctors.find(u.name); it != sp.ctors.end()) {
          if (it->second != u.arity)
            throw ArityError(where + ": constructor " + u.name + " takes " +
                                 std::to_string(it->second) + " arguments",
                             u.line, u.col);
          continue;
        }
        const int* pa = arity_of(u.name);
        if (!pa)
          throw ParseError(where + ": unknown constant " + u.name, u.line,
                           u.col);
        if (u.arity > *pa)
          throw ArityError(where + ": " + u.name + " takes at most " +
                               std::to_string(*pa) + " arguments",
                           u.line, u.col);
      }
    }
    // connectives must fit the mode
    for (const auto& c : sp.clauses) check_mode_goal(c.body, c.line);
    for (const auto& p : sp.props) {
      check_mode_goal(p.gen, p.line);
      if (p.when) check_mode_goal(p.when, p.line);
      check_mode_goal(p.then, p.line);
    }
  }

  void check_mode_goal(const Goal& g, int line) {
    switch (g->tag) {
      case GoalTag::All:
      case GoalTag::ImpI:
        if (sp.mode == Mode::Horn)
          throw ParseError(where +
                               ": hypothetical goals need 'mode hh.' or "
                               "'mode linear.'",
                           line);
        break;
      case GoalTag::ImpL:
      case GoalTag::Bang:
        if (sp.mode != Mode::Linear)
          throw ParseError(where + ": linear goals need 'mode linear.'", line);
        break;
      default:
        break;
    }
    if (g->g1) check_mode_goal(g->g1, line);
    if (g->g2) check_mode_goal(g->g2, line);
  }

  // Standalone validation against a compiled program.
  void validate_against_program() {
    for (const auto& u : uses) {
      const CompiledPred* p = prog->find_pred(u.name);
      bool is_axiom = prog->axioms.count(u.name) != 0;
      auto ct = prog->ctors.find(u.name);
      if (u.ctx == Use::GoalHead || u.ctx == Use::Antecedent) {
        int pa = p ? p->arity : (is_axiom ? 0 : -1);
        if (pa < 0) {
          if (ct != prog->ctors.end())
            throw ParseError(where + ": constructor " + u.name +
                                 " used as a goal",
                             u.line, u.col);
          throw UnboundPredicate(where + ": unknown predicate " + u.name,
                                 u.line, u.col);
        }
        if (pa != u.arity)
          throw ArityError(where + ": " + u.name + " takes " +
                               std::to_string(pa) + " arguments, not " +
                               std::to_string(u.arity),
                           u.line, u.col);
      } else {
        if (ct != prog->ctors.end()) {
          if (ct->second != u.arity)
            throw ArityError(where + ": constructor " + u.name + " takes " +
                                 std::to_string(ct->second) + " arguments",
                             u.line, u.col);
          continue;
        }
        if (cert_mode) {
          if (auto mt = kMaxTreeCtors.find(u.name); mt != kMaxTreeCtors.end()) {
            if (mt->second != u.arity)
              throw ArityError(where + ": " + u.name + " takes " +
                                   std::to_string(mt->second) + " arguments",
                               u.line, u.col);
            continue;
          }
          if (u.name == kHoleName) continue;
        }
        int pa = p ? p->arity : (is_axiom ? 0 : -1);
        if (pa < 0)
          throw ParseError(where + ": unknown constant " + u.name, u.line,
                           u.col);
        if (u.arity > pa)
          throw ArityError(where + ": " + u.name + " takes at most " +
                               std::to_string(pa) + " arguments",
                           u.line, u.col);
      }
    }
  }

  // ---- certificates ------------------------------------------------------

  Term hole() { return mk_const(kHoleName); }

  Term parse_cert_term_atom() {
    // '_' | integer | '(' term ')' -- in certificate term mode
    if (at(Tk::UIdent) && peek().text == "_") {
      next();
      return hole();
    }
    return parse_atom_term();
  }

  Term parse_cert_list() {
    expect(Tk::LBrack, "[");
    std::vector<Term> items;
    if (!at(Tk::RBrack)) {
      for (;;) {
        items.push_back(parse_term_prec());
        if (at(Tk::Comma)) {
          next();
          continue;
        }
        break;
      }
    }
    expect(Tk::RBrack, "]");
    Term l = mk_const("hnil");
    for (auto it = items.rbegin(); it != items.rend(); ++it)
      l = mk_app(mk_app(mk_const("hcons"), *it), l);
    return l;
  }

  Term parse_cert_app() {
    if (at(Tk::LParen)) {
      next();
      Term c = parse_cert_expr();
      expect(Tk::RParen, ")");
      return c;
    }
    if (at(Tk::UIdent) && peek().text == "_") {
      next();
      return hole();
    }
    Token t = expect(Tk::LIdent, "a certificate");
    const std::string& n = t.text;
    if (n == "any" || n == "random" || n == "noweight") return mk_const(n);
    if (n == "height") {
      Token a = expect(Tk::Int, "a height bound");
      return mk_app(mk_const("height"), mk_int(a.ival));
    }
    if (n == "sze") {
      Token a = expect(Tk::Int, "a size bound");
      Term out = hole();
      if (at(Tk::Int)) out = mk_int(next().ival);
      else if (at(Tk::UIdent) && peek().text == "_") { next(); }
      return mk_app(mk_app(mk_const("sze"), mk_int(a.ival)), out);
    }
    if (n == "max") {
      Term arg = hole();
      if (at(Tk::UIdent) && peek().text == "_") {
        next();
      } else if (at(Tk::LParen)) {
        arg = parse_cert_term_atom();
      }
      return mk_app(mk_const("max"), arg);
    }
    if (n == "collect") {
      std::vector<Term> args;
      while ((int)args.size() < 2 &&
             (at(Tk::LParen) || at(Tk::LBrack) ||
              (at(Tk::UIdent) && peek().text == "_") || at(Tk::LIdent))) {
        if (at(Tk::LBrack))
          args.push_back(parse_cert_list());
        else if (at(Tk::LIdent) && peek().text != "hnil" &&
                 peek().text != "hcons")
          break;
        else
          args.push_back(parse_cert_term_atom());
      }
      if (args.empty()) return mk_apps(mk_const("collect"), {mk_const("hnil"), hole()});
      if (args.size() == 1)
        return mk_apps(mk_const("collect"), {mk_const("hnil"), args[0]});
      return mk_apps(mk_const("collect"), args);
    }
    if (n == "huniv") {
      Term universe = parse_cert_list();
      Token f = expect(Tk::LIdent, "subterm or proper");
      if (f.text != "subterm" && f.text != "proper")
        throw ParseError(where + ": expected subterm or proper", f.line,
                         f.col);
      return mk_app(mk_app(mk_const("huniv"), universe), mk_const(f.text));
    }
    throw ParseError(where + ": unknown certificate " + n, t.line, t.col);
  }

  Term parse_cert_expr() {
    Term l = parse_cert_app();
    if (at(Tk::Pair)) {
      next();
      Term r = parse_cert_expr();
      return mk_app(mk_app(mk_const("<c>"), l), r);
    }
    return l;
  }
};

}  // namespace

SurfaceProgram parse_program(const std::string& src,
                             const std::string& filename) {
  Parser p;
  p.where = filename.empty() ? "input" : filename;
  p.ts = lex(src, p.where);
  while (!p.at(Tk::End)) p.parse_item();
  p.validate_program();
  return std::move(p.sp);
}

SurfaceProgram parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), path);
}

ParsedGoal parse_goal(const std::string& src, const Program& prog) {
  Parser p;
  p.where = "goal";
  p.ts = lex(src, p.where);
  p.prog = &prog;
  ParsedGoal out;
  p.cur_vars = &out.vars;
  Goal g = p.parse_goal_top();
  if (!p.at(Tk::End) && !(p.at(Tk::Dot) && p.peek(1).k == Tk::End))
    p.fail("trailing input after goal");
  p.validate_against_program();
  std::map<std::string, int> offsets;
  for (size_t i = 0; i < out.vars.size(); ++i)
    offsets[out.vars[i]] = (int)i;
  out.goal = close_fvars_goal(g, offsets, 0);
  return out;
}

Term parse_term(const std::string& src, const Program& prog) {
  Parser p;
  p.where = "term";
  p.ts = lex(src, p.where);
  p.prog = &prog;
  Term t = p.parse_term_prec();
  if (!p.at(Tk::End)) p.fail("trailing input after term");
  p.validate_against_program();
  return t;
}

Term parse_cert(const std::string& src, const Program& prog) {
  Parser p;
  p.where = "certificate";
  p.ts = lex(src, p.where);
  p.prog = &prog;
  p.cert_mode = true;
  Term c = p.parse_cert_expr();
  if (!p.at(Tk::End)) p.fail("trailing input after certificate");
  p.validate_against_program();
  return c;
}

}  // namespace pbt
