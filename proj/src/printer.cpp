#include "pbt/printer.hpp"

namespace pbt {

Printer::Printer(const Store& st, const Program* prog) : st_(st) {
  if (prog) {
    for (const auto& [n, a] : prog->ctors) avoid_.insert(n);
    for (const auto& [n, p] : prog->preds) avoid_.insert(n);
    for (const auto& n : prog->axioms) avoid_.insert(n);
  }
}

std::string Printer::fresh_binder() {
  static const char* base[] = {"x", "y", "z", "w", "u", "v"};
  auto taken = [&](const std::string& n) {
    if (avoid_.count(n)) return true;
    for (const auto& e : env_)
      if (e == n) return true;
    return false;
  };
  for (const char* b : base)
    if (!taken(b)) return b;
  for (int i = 1;; ++i) {
    std::string n = "x" + std::to_string(i);
    if (!taken(n)) return n;
  }
}

std::string Printer::meta_name(const Term& m) {
  auto [it, fresh] = metas_.emplace(m->id, (int)metas_.size());
  (void)fresh;
  return "_" + std::to_string(it->second);
}

std::string Printer::term(const Term& t) { return term_p(t, false); }

std::string Printer::term_p(const Term& t0, bool arg_pos) {
  Term t = st_.whnf(t0);
  auto [head, args] = spine(st_, t);
  // infix pairs: cons cells and certificate pairing
  if (head->tag == Tag::Const && args.size() == 2 &&
      (head->name == "::" || head->name == "<c>")) {
    const char* op = head->name == "::" ? " :: " : " <c> ";
    std::string lhs = term_p(args[0], true);
    // right-associative: the right operand keeps the infix bare
    Term r = st_.whnf(args[1]);
    auto [rh, ra] = spine(st_, r);
    std::string rhs;
    if (rh->tag == Tag::Const && rh->name == head->name && ra.size() == 2)
      rhs = term_p(args[1], false);
    else
      rhs = term_p(args[1], true);
    std::string s = lhs + op + rhs;
    return arg_pos ? "(" + s + ")" : s;
  }
  std::string hs;
  switch (head->tag) {
    case Tag::Const:
    case Tag::FVar:
      hs = head->name;
      break;
    case Tag::Int:
      if (head->ival < 0)
        hs = "(- " + std::to_string(-head->ival) + ")";
      else
        hs = std::to_string(head->ival);
      break;
    case Tag::Meta:
      hs = meta_name(head);
      break;
    case Tag::Eigen:
      hs = (head->name.empty() ? std::string("e") : head->name) + "#" +
           std::to_string(head->id);
      break;
    case Tag::Bound: {
      int i = (int)env_.size() - 1 - head->index;
      hs = (i >= 0 && i < (int)env_.size())
               ? env_[i]
               : "?" + std::to_string(head->index);
      break;
    }
    case Tag::Abs: {
      std::string b = fresh_binder();
      env_.push_back(b);
      std::string body = term_p(head->body, false);
      env_.pop_back();
      std::string s = b + "\\ " + body;
      // an abstraction swallows everything to its right
      return (arg_pos || !args.empty()) ? "(" + s + ")" : s;
    }
    default:
      hs = "?";
  }
  if (args.empty()) return hs;
  std::string s = hs;
  for (const auto& a : args) s += " " + term_p(a, true);
  return arg_pos ? "(" + s + ")" : s;
}

std::string Printer::goal(const Goal& g) { return goal_p(g, 0); }

std::string Printer::goal_p(const Goal& g, int lvl) {
  auto wrap = [&](const std::string& s, int mylvl) {
    return mylvl < lvl ? "(" + s + ")" : s;
  };
  switch (g->tag) {
    case GoalTag::Tt:
      return "tt";
    case GoalTag::Ff:
      return "ff";
    case GoalTag::Eq:
      return wrap(term_p(g->t1, true) + " = " + term_p(g->t2, true), 3);
    case GoalTag::Atom:
      return wrap(term(g->t1), 3);
    case GoalTag::And:
      return wrap(goal_p(g->g1, 2) + ", " + goal_p(g->g2, 1), 1);
    case GoalTag::Or:
      return wrap(goal_p(g->g1, 1) + "; " + goal_p(g->g2, 0), 0);
    case GoalTag::ImpI:
    case GoalTag::ImpL: {
      std::string op = g->tag == GoalTag::ImpI ? " => " : " -o ";
      return wrap(term(g->t1) + op + goal_p(g->g1, 2), 2);
    }
    case GoalTag::Bang:
      return wrap("! " + goal_p(g->g1, 3), 3);
    case GoalTag::Some:
    case GoalTag::All: {
      std::string b = fresh_binder();
      env_.push_back(b);
      std::string body = goal_p(g->g1, 0);
      env_.pop_back();
      const char* q = g->tag == GoalTag::Some ? "some " : "pi ";
      return wrap(q + b + "\\ " + body, 0);
    }
  }
  return "?";
}

std::string print_term(const Store& st, const Term& t, const Program* prog) {
  Printer p(st, prog);
  return p.term(t);
}

std::string print_goal(const Store& st, const Goal& g, const Program* prog) {
  Printer p(st, prog);
  return p.goal(g);
}

}  // namespace pbt
