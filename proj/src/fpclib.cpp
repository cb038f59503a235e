#include "pbt/fpclib.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "pbt/errors.hpp"
#include "pbt/parser.hpp"
#include "pbt/unify.hpp"

namespace pbt {

// ---------------------------------------------------------------------------
// RandomSource

std::shared_ptr<RandomSource> RandomSource::seeded(uint64_t seed) {
  auto r = std::shared_ptr<RandomSource>(new RandomSource());
  r->scripted_ = false;
  r->rng_.seed(seed);
  return r;
}

std::shared_ptr<RandomSource> RandomSource::scripted(std::vector<int> bits) {
  auto r = std::shared_ptr<RandomSource>(new RandomSource());
  r->scripted_ = true;
  r->bits_ = std::move(bits);
  return r;
}

uint64_t RandomSource::derive(uint64_t master, uint64_t index) {
  // splitmix64 of the master seed advanced by the sample index
  uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int RandomSource::next_bit() {
  if (scripted_) {
    if (pos_ >= bits_.size())
      throw EngineError("scripted random source exhausted");
    return bits_[pos_++] ? 1 : 0;
  }
  return static_cast<int>(rng_() & 1u);
}

int RandomSource::next_7bits() {
  int v = 0;
  for (int i = 0; i < 7; ++i) v = (v << 1) | next_bit();
  return v;
}

// ---------------------------------------------------------------------------
// Certificate terms

namespace {

Term c_(const std::string& n) { return mk_const(n); }

Term mk_height(long long h) { return mk_app(c_("height"), mk_int(h)); }
Term mk_sze(const Term& in, const Term& out) {
  return mk_apps(c_("sze"), {in, out});
}
Term mk_max(const Term& slot) { return mk_app(c_("max"), slot); }
Term mk_pair(const Term& a, const Term& b) {
  return mk_apps(c_("<c>"), {a, b});
}
Term mk_cases(const Term& rnd, const Term& ws, const Term& acc) {
  return mk_apps(c_("cases"), {rnd, ws, acc});
}
Term mk_collect(const Term& in, const Term& out) {
  return mk_apps(c_("collect"), {in, out});
}

struct View {
  std::string name;
  std::vector<Term> args;
};

View view(Store& st, const Term& cert) {
  auto [h, args] = spine(st, cert);
  if (h->tag != Tag::Const)
    throw BadCertificate("certificate has no concrete head");
  return View{h->name, std::move(args)};
}

long long int_of(Store& st, const Term& t) {
  Term w = st.whnf(t);
  if (w->tag != Tag::Int)
    throw BadCertificate("certificate argument is not a number");
  return w->ival;
}

std::vector<Term> list_of(Store& st, const Term& t) {
  std::vector<Term> out;
  Term cur = t;
  for (;;) {
    auto [h, args] = spine(st, cur);
    if (h->tag != Tag::Const)
      throw BadCertificate("certificate list has no concrete spine");
    if (h->name == "hnil" && args.empty()) return out;
    if (h->name == "hcons" && args.size() == 2) {
      out.push_back(args[0]);
      cur = args[1];
      continue;
    }
    throw BadCertificate("malformed certificate list");
  }
}

Term list_term(const std::vector<long long>& ws) {
  Term t = c_("hnil");
  for (auto it = ws.rbegin(); it != ws.rend(); ++it)
    t = mk_apps(c_("hcons"), {mk_int(*it), t});
  return t;
}

// mark/unify/continue/undo bracket shared by every recording certificate.
bool unify_and(Store& st, const Term& a, const Term& b, const Kont& k) {
  auto m = st.mark();
  if (unify(st, a, b)) {
    if (k()) return true;
  }
  st.undo_to(m);
  return false;
}

struct Env {
  const Program* prog;
  RandomSource* rnd;
};

RandomSource* need_rnd(const Env& env) {
  if (!env.rnd)
    throw BadCertificate("random certificate without a random source");
  return env.rnd;
}

[[noreturn]] void misplaced_cases() {
  throw MalformedBody(
      "weighted certificate met a non-disjunctive goal; "
      "clause bodies must branch only between disjuncts");
}

[[noreturn]] void unknown(const std::string& name) {
  throw BadCertificate("unknown certificate constructor: " + name);
}

using K1 = std::function<bool(const Term&)>;
using K2 = std::function<bool(const Term&, const Term&)>;
using KOr = std::function<bool(const Term&, int)>;

enum class Leaf { Tt, Eq, Init };

bool do_leaf(const Env& env, Store& st, const Term& cert, Leaf kind,
             const Kont& k);
bool do_and(const Env& env, Store& st, const Term& cert, const K2& k);
bool do_or(const Env& env, Store& st, const Term& cert, const KOr& k);
bool do_some(const Env& env, Store& st, const Term& cert, const Term& w,
             const K1& k);
bool do_all(const Env& env, Store& st, const Term& cert, const Term& e,
            const K1& k);
bool do_bc(const Env& env, Store& st, const Term& cert, const Term& atom,
           const K1& k);
bool do_struct(const Env& env, Store& st, const Term& cert,
               const std::string& ctor, const K1& k);

bool do_leaf(const Env& env, Store& st, const Term& cert, Leaf kind,
             const Kont& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "random" || v.name == "noweight" ||
      v.name == "huniv")
    return k();
  if (v.name == "height") {
    if (kind == Leaf::Init && int_of(st, v.args[0]) <= 0) return false;
    return k();
  }
  if (v.name == "sze") {
    long long n = int_of(st, v.args[0]);
    if (kind == Leaf::Init) {
      if (n <= 0) return false;
      return unify_and(st, v.args[1], mk_int(n - 1), k);
    }
    return unify_and(st, v.args[1], mk_int(n), k);
  }
  if (v.name == "max") {
    const char* ctor = kind == Leaf::Tt   ? "mtt"
                       : kind == Leaf::Eq ? "meq"
                                          : "minit";
    return unify_and(st, v.args[0], c_(ctor), k);
  }
  if (v.name == "collect") return unify_and(st, v.args[1], v.args[0], k);
  if (v.name == "<c>")
    return do_leaf(env, st, v.args[0], kind,
                   [&] { return do_leaf(env, st, v.args[1], kind, k); });
  if (v.name == "cases") misplaced_cases();
  unknown(v.name);
}

bool do_and(const Env& env, Store& st, const Term& cert, const K2& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "height" || v.name == "random" ||
      v.name == "noweight" || v.name == "huniv")
    return k(cert, cert);
  if (v.name == "sze") {
    Term mid = st.fresh_meta("Sz");
    return k(mk_sze(v.args[0], mid), mk_sze(mid, v.args[1]));
  }
  if (v.name == "max") {
    Term t1 = st.fresh_meta("T");
    Term t2 = st.fresh_meta("T");
    return unify_and(st, v.args[0], mk_apps(c_("mand"), {t1, t2}),
                     [&] { return k(mk_max(t1), mk_max(t2)); });
  }
  if (v.name == "collect") {
    Term mid = st.fresh_meta("Cl");
    return k(mk_collect(v.args[0], mid), mk_collect(mid, v.args[1]));
  }
  if (v.name == "<c>")
    return do_and(env, st, v.args[0], [&](const Term& a1, const Term& a2) {
      return do_and(env, st, v.args[1], [&](const Term& b1, const Term& b2) {
        return k(mk_pair(a1, b1), mk_pair(a2, b2));
      });
    });
  if (v.name == "cases") misplaced_cases();
  unknown(v.name);
}

bool do_or(const Env& env, Store& st, const Term& cert, const KOr& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "height" || v.name == "sze" ||
      v.name == "collect" || v.name == "huniv") {
    if (k(cert, 1)) return true;
    return k(cert, 2);
  }
  if (v.name == "max") {
    for (int side = 1; side <= 2; ++side) {
      Term t = st.fresh_meta("T");
      if (unify_and(st, v.args[0], mk_apps(c_("mor"), {mk_int(side), t}),
                    [&] { return k(mk_max(t), side); }))
        return true;
    }
    return false;
  }
  if (v.name == "random" || v.name == "noweight") {
    int side = need_rnd(env)->next_bit() == 0 ? 1 : 2;
    return k(cert, side);
  }
  if (v.name == "cases") {
    std::vector<Term> ws_terms = list_of(st, v.args[1]);
    if (ws_terms.empty()) misplaced_cases();
    long long acc = int_of(st, v.args[2]);
    long long rnd = int_of(st, v.args[0]);
    long long w1 = int_of(st, ws_terms[0]);
    long long total = acc;
    for (const Term& w : ws_terms) total += int_of(st, w);
    if (rnd * total < 128 * (acc + w1)) return k(noweight_cert(), 1);
    std::vector<long long> tail;
    for (size_t i = 1; i < ws_terms.size(); ++i)
      tail.push_back(int_of(st, ws_terms[i]));
    return k(mk_cases(v.args[0], list_term(tail), mk_int(acc + w1)), 2);
  }
  if (v.name == "<c>")
    return do_or(env, st, v.args[0], [&](const Term& a, int s1) {
      return do_or(env, st, v.args[1], [&](const Term& b, int s2) {
        if (s1 != s2) return false;
        return k(mk_pair(a, b), s1);
      });
    });
  unknown(v.name);
}

bool do_some(const Env& env, Store& st, const Term& cert, const Term& w,
             const K1& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "height" || v.name == "sze" ||
      v.name == "random" || v.name == "noweight")
    return k(cert);
  if (v.name == "max") {
    Term t = st.fresh_meta("T");
    return unify_and(st, v.args[0], mk_apps(c_("msome"), {w, t}),
                     [&] { return k(mk_max(t)); });
  }
  if (v.name == "collect")
    return k(mk_collect(mk_apps(c_("hcons"), {w, v.args[0]}), v.args[1]));
  if (v.name == "huniv") {
    bool proper = false;
    {
      Term flag = st.whnf(v.args[1]);
      if (flag->tag == Tag::Const && flag->name == "proper")
        proper = true;
      else if (!(flag->tag == Tag::Const && flag->name == "subterm"))
        throw BadCertificate("huniv flag must be subterm or proper");
    }
    std::vector<Term> universe = list_of(st, v.args[0]);
    std::vector<Term> cands;
    for (const Term& u : universe) {
      std::vector<Term> subs = all_subterms(st, u);
      for (const Term& s : subs) {
        if (proper && term_eq(st, s, u)) continue;
        bool seen = false;
        for (const Term& c : cands)
          if (term_eq(st, c, s)) {
            seen = true;
            break;
          }
        if (!seen) cands.push_back(s);
      }
    }
    for (const Term& cand : cands) {
      if (unify_and(st, w, cand, [&] { return k(cert); })) return true;
    }
    return false;
  }
  if (v.name == "<c>")
    return do_some(env, st, v.args[0], w, [&](const Term& a) {
      return do_some(env, st, v.args[1], w,
                     [&](const Term& b) { return k(mk_pair(a, b)); });
    });
  if (v.name == "cases") misplaced_cases();
  unknown(v.name);
}

bool do_all(const Env& env, Store& st, const Term& cert, const Term& e,
            const K1& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "height" || v.name == "sze" ||
      v.name == "random" || v.name == "noweight" || v.name == "collect" ||
      v.name == "huniv")
    return k(cert);
  if (v.name == "max") {
    // The recording slot under a binder is a function of the eigenvariable,
    // created one level below it so applying it to `e` stays a pattern.
    Term b = st.fresh_meta_at(e->level - 1, "B");
    return unify_and(st, v.args[0], mk_app(c_("mall"), b),
                     [&] { return k(mk_max(mk_app(b, e))); });
  }
  if (v.name == "<c>")
    return do_all(env, st, v.args[0], e, [&](const Term& a) {
      return do_all(env, st, v.args[1], e,
                    [&](const Term& b) { return k(mk_pair(a, b)); });
    });
  if (v.name == "cases") misplaced_cases();
  unknown(v.name);
}

bool do_bc(const Env& env, Store& st, const Term& cert, const Term& atom,
           const K1& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "random" || v.name == "collect" ||
      v.name == "huniv")
    return k(cert);
  if (v.name == "height") {
    long long h = int_of(st, v.args[0]);
    if (h <= 0) return false;
    return k(mk_height(h - 1));
  }
  if (v.name == "sze") {
    long long n = int_of(st, v.args[0]);
    if (n <= 0) return false;
    return k(mk_sze(mk_int(n - 1), v.args[1]));
  }
  if (v.name == "max") {
    Term t = st.fresh_meta("T");
    return unify_and(st, v.args[0], mk_app(c_("mbc"), t),
                     [&] { return k(mk_max(t)); });
  }
  if (v.name == "noweight") {
    if (!env.prog)
      throw BadCertificate("weighted certificate without a program");
    auto [h, args] = spine(st, atom);
    if (h->tag != Tag::Const) throw BadCertificate("weighted flexible atom");
    const CompiledPred* p = env.prog->find_pred(h->name);
    if (!p) return false;
    std::vector<long long> ws(p->weights.begin(), p->weights.end());
    if (ws.empty()) ws.assign(static_cast<size_t>(p->ndisjuncts), 1);
    int rnd = need_rnd(env)->next_7bits();
    return k(mk_cases(mk_int(rnd), list_term(ws), mk_int(0)));
  }
  if (v.name == "<c>")
    return do_bc(env, st, v.args[0], atom, [&](const Term& a) {
      return do_bc(env, st, v.args[1], atom,
                   [&](const Term& b) { return k(mk_pair(a, b)); });
    });
  if (v.name == "cases") misplaced_cases();
  unknown(v.name);
}

bool do_struct(const Env& env, Store& st, const Term& cert,
               const std::string& ctor, const K1& k) {
  View v = view(st, cert);
  if (v.name == "any" || v.name == "height" || v.name == "sze" ||
      v.name == "random" || v.name == "noweight" || v.name == "collect" ||
      v.name == "huniv")
    return k(cert);
  if (v.name == "max") {
    Term t = st.fresh_meta("T");
    return unify_and(st, v.args[0], mk_app(c_(ctor), t),
                     [&] { return k(mk_max(t)); });
  }
  if (v.name == "<c>")
    return do_struct(env, st, v.args[0], ctor, [&](const Term& a) {
      return do_struct(env, st, v.args[1], ctor,
                       [&](const Term& b) { return k(mk_pair(a, b)); });
    });
  if (v.name == "cases") misplaced_cases();
  unknown(v.name);
}

}  // namespace

Fpc standard_fpc(const Program* prog, std::shared_ptr<RandomSource> rnd) {
  Fpc fpc;
  Env env{prog, rnd.get()};
  // keep the random source alive inside the callbacks
  auto hold = std::move(rnd);
  fpc.on_tt = [env, hold](Store& st, const Term& c, const Kont& k) {
    return do_leaf(env, st, c, Leaf::Tt, k);
  };
  fpc.on_eq = [env](Store& st, const Term& c, const Kont& k) {
    return do_leaf(env, st, c, Leaf::Eq, k);
  };
  fpc.on_init = [env](Store& st, const Term& c, const Kont& k) {
    return do_leaf(env, st, c, Leaf::Init, k);
  };
  fpc.on_and = [env](Store& st, const Term& c, const K2& k) {
    return do_and(env, st, c, k);
  };
  fpc.on_or = [env](Store& st, const Term& c, const KOr& k) {
    return do_or(env, st, c, k);
  };
  fpc.on_some = [env](Store& st, const Term& c, const Term& w, const K1& k) {
    return do_some(env, st, c, w, k);
  };
  fpc.on_all = [env](Store& st, const Term& c, const Term& e, const K1& k) {
    return do_all(env, st, c, e, k);
  };
  fpc.on_backchain = [env](Store& st, const Term& c, const Term& atom,
                           const K1& k) { return do_bc(env, st, c, atom, k); };
  fpc.on_imp = [env](Store& st, const Term& c, const K1& k) {
    return do_struct(env, st, c, "mimp", k);
  };
  fpc.on_limp = [env](Store& st, const Term& c, const K1& k) {
    return do_struct(env, st, c, "mlimp", k);
  };
  fpc.on_bang = [env](Store& st, const Term& c, const K1& k) {
    return do_struct(env, st, c, "mbang", k);
  };
  return fpc;
}

// ---------------------------------------------------------------------------
// Builders and extraction

Term any_cert() { return c_("any"); }
Term height_cert(int h) { return mk_height(h); }
Term sze_cert(Store& st, int n) {
  return mk_sze(mk_int(n), st.fresh_meta("Out"));
}
Term max_cert(Store& st) { return mk_max(st.fresh_meta("Tree")); }
Term pair_cert(const Term& a, const Term& b) { return mk_pair(a, b); }
Term random_cert() { return c_("random"); }
Term noweight_cert() { return c_("noweight"); }
Term collect_cert(Store& st) {
  return mk_collect(c_("hnil"), st.fresh_meta("Items"));
}
Term huniv_cert(const std::vector<Term>& universe, bool proper) {
  Term list = c_("hnil");
  for (auto it = universe.rbegin(); it != universe.rend(); ++it)
    list = mk_apps(c_("hcons"), {*it, list});
  return mk_apps(c_("huniv"), {list, c_(proper ? "proper" : "subterm")});
}

Term instantiate_cert(Store& st, const Term& tpl) {
  Term t = st.resolve(tpl);
  std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
    switch (u->tag) {
      case Tag::Const:
        if (u->name == kHoleName) return st.fresh_meta("H");
        return u;
      case Tag::App: {
        Term f = go(u->fn), a = go(u->arg);
        if (f == u->fn && a == u->arg) return u;
        return mk_app(f, a);
      }
      case Tag::Abs: {
        Term b = go(u->body);
        if (b == u->body) return u;
        return mk_abs(b, u->name);
      }
      default:
        return u;
    }
  };
  return go(t);
}

namespace {

// Find the first node with the given head inside a (possibly paired)
// certificate; returns nullptr when absent.
Term find_node(Store& st, const Term& cert, const std::string& head) {
  auto [h, args] = spine(st, cert);
  if (h->tag != Tag::Const) return nullptr;
  if (h->name == head) return cert;
  if (h->name == "<c>" && args.size() == 2) {
    if (Term l = find_node(st, args[0], head)) return l;
    return find_node(st, args[1], head);
  }
  return nullptr;
}

}  // namespace

bool cert_records(Store& st, const Term& cert) {
  return find_node(st, cert, "max") != nullptr;
}

Term maxtree_of(Store& st, const Term& cert) {
  Term node = find_node(st, cert, "max");
  if (!node) throw BadCertificate("certificate has no recording slot");
  auto [h, args] = spine(st, node);
  (void)h;
  return st.resolve(args[0]);
}

std::vector<Term> collect_items(Store& st, const Term& cert) {
  Term node = find_node(st, cert, "collect");
  if (!node) throw BadCertificate("certificate has no collector");
  auto [h, args] = spine(st, node);
  (void)h;
  std::vector<Term> items = list_of(st, st.resolve(args[1]));
  std::reverse(items.begin(), items.end());  // traversal order
  return items;
}

int maxtree_height(Store& st, const Term& tree) {
  auto [h, args] = spine(st, tree);
  if (h->tag == Tag::Abs) {
    Term e = st.fresh_eigen(h->name);
    return maxtree_height(st, open_term(h->body, e));
  }
  if (h->tag != Tag::Const) return 0;
  const std::string& n = h->name;
  if (n == "minit") return 1;
  if (n == "mbc" && args.size() == 1)
    return 1 + maxtree_height(st, args[0]);
  if (n == "mand" && args.size() == 2)
    return std::max(maxtree_height(st, args[0]),
                    maxtree_height(st, args[1]));
  if (n == "mor" && args.size() == 2) return maxtree_height(st, args[1]);
  if (n == "msome" && args.size() == 2) return maxtree_height(st, args[1]);
  if ((n == "mimp" || n == "mlimp" || n == "mbang" || n == "mall") &&
      args.size() == 1)
    return maxtree_height(st, args[0]);
  return 0;
}

}  // namespace pbt
