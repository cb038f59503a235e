#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "pbt/kernel.hpp"
#include "pbt/syntax.hpp"
#include "pbt/terms.hpp"

namespace pbt {

// Source of random bits for the `random` and weighted certificates.
// Seeded sources draw from a PRNG; scripted sources replay a fixed bit
// list (and throw EngineError when it runs out).
class RandomSource {
 public:
  static std::shared_ptr<RandomSource> seeded(uint64_t seed);
  static std::shared_ptr<RandomSource> scripted(std::vector<int> bits);
  // Derive the seed for the i-th sample of a run from a master seed.
  static uint64_t derive(uint64_t master, uint64_t index);

  int next_bit();
  int next_7bits();  // seven next_bit draws, most significant first

 private:
  RandomSource() = default;
  bool scripted_ = false;
  std::vector<int> bits_;
  size_t pos_ = 0;
  std::mt19937_64 rng_;
};

// Callback bundle interpreting the standard certificate language:
//
//   any                   every rule permitted (checking = search)
//   height N              at most N backchain/init steps per branch
//   sze N Out             at most N backchain steps in the whole proof,
//                         Out is bound to what is left
//   max T                 T is bound to a record of the proof's shape
//   random                binary choices drawn from the random source
//   noweight              disjuncts drawn with the program's weights
//   collect In Out        Out collects existential witnesses onto In
//   huniv [T1,...] K      existential witnesses restricted to (proper)
//                         subterms of the given terms (K = subterm|proper)
//   C1 <c> C2             both certificates simultaneously
//
// `prog` is needed for declared weights; `rnd` for random/noweight.
Fpc standard_fpc(const Program* prog = nullptr,
                 std::shared_ptr<RandomSource> rnd = nullptr);

// Certificate term builders.
Term any_cert();
Term height_cert(int h);
Term sze_cert(Store& st, int n);  // output slot is a fresh variable
Term max_cert(Store& st);         // max with a fresh recording slot
Term pair_cert(const Term& a, const Term& b);
Term random_cert();
Term noweight_cert();
Term collect_cert(Store& st);  // collect hnil Out, Out fresh
Term huniv_cert(const std::vector<Term>& universe, bool proper);

// Replace every `_hole` constant in a parsed certificate template with a
// fresh variable, so one template can direct many runs.
Term instantiate_cert(Store& st, const Term& tpl);

// Post-run extraction.
bool cert_records(Store& st, const Term& cert);  // has a max slot?
Term maxtree_of(Store& st, const Term& cert);  // resolved recording slot
std::vector<Term> collect_items(Store& st, const Term& cert);
int maxtree_height(Store& st, const Term& tree);  // counts mbc/minit nodes

}  // namespace pbt
