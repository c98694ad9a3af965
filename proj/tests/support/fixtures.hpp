#pragma once

// Shared fixtures for the test and acceptance suites: a small demo
// signature, canonical structures and games, and seeded random generators
// for structures, payoffs and formulas.

#include <random>

#include "hetlog/game.hpp"
#include "hetlog/parse.hpp"
#include "hetlog/print.hpp"

namespace fixtures {

using namespace hetlog;

inline Signature demo_signature() {
  return parse_signature(
      "sort s;\n"
      "rel P(s);\n"
      "rel E(s, s);\n"
      "const zero: s;\n"
      "const one: s;\n");
}

// Carrier {e0..e{n-1}}, P = {e0}, E = diagonal, zero = e0, one = e{n-1}.
inline Structure chain_structure(int n) {
  Structure m;
  m.signature = demo_signature();
  vector<string> elems;
  for (int i = 0; i < n; ++i) elems.push_back("e" + std::to_string(i));
  m.carriers["s"] = elems;
  std::set<vector<int>> diag;
  for (int i = 0; i < n; ++i) diag.insert({i, i});
  m.relations["E"] = diag;
  m.relations["P"] = {{0}};
  m.functions["zero"] = {{{}, 0}};
  m.functions["one"] = {{{}, n - 1}};
  return m;
}

inline Formula parse_f(const Signature& sig, const string& text,
                       const vector<Var>& ctx = {}) {
  return parse_formula(text, sig, ctx);
}

// The copycat game: safe iff every odd-stage move equals its predecessor.
inline Formula copycat(const Signature& sig) {
  return parse_f(sig,
                 "hetAE { len: omega; sched: [[x:s], [y:s]]; "
                 "payoff: safety(2)[true, (v0 = v1)] }");
}

// The canonical degeneracy witness: reach the element `one`.
inline Formula reach_one(const Signature& sig) {
  return parse_f(sig, "hetAE { len: omega; sched: [[x:s]]; payoff: reach(1)[(v0 = one)] }");
}

// ---------------------------------------------------------------------------
// Random generation (seeded, deterministic)

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline Structure random_structure(Rng& rng, int max_carrier) {
  Structure m;
  m.signature = demo_signature();
  int n = pick(rng, 1, max_carrier);
  vector<string> elems;
  for (int i = 0; i < n; ++i) elems.push_back("e" + std::to_string(i));
  m.carriers["s"] = elems;
  std::set<vector<int>> p, e;
  for (int i = 0; i < n; ++i) {
    if (pick(rng, 0, 1)) p.insert({i});
    for (int j = 0; j < n; ++j)
      if (pick(rng, 0, 1)) e.insert({i, j});
  }
  m.relations["P"] = p;
  m.relations["E"] = e;
  m.functions["zero"] = {{{}, pick(rng, 0, n - 1)}};
  m.functions["one"] = {{{}, pick(rng, 0, n - 1)}};
  return m;
}

// A random het-free template over the window placeholders of the given
// block position, plus the constants.
inline Formula random_template(Rng& rng, int window, bool allow_param,
                               const string& param_name = "u") {
  auto place = [&](int i) { return mk_var(placeholder_name(i), "s"); };
  auto random_term = [&](bool& used_param) -> TermPtr {
    int kind = pick(rng, 0, allow_param ? 3 : 2);
    if (kind == 0) return place(pick(rng, 0, window - 1));
    if (kind == 1) return mk_app("zero");
    if (kind == 2) return mk_app("one");
    used_param = true;
    return mk_var(param_name, "s");
  };
  bool dummy = false;
  int kind = pick(rng, 0, 4);
  switch (kind) {
    case 0:
      return mk_atom("P", {place(pick(rng, 0, window - 1))});
    case 1:
      return mk_atom("E", {place(pick(rng, 0, window - 1)), random_term(dummy)});
    case 2:
      return mk_eq(place(pick(rng, 0, window - 1)), random_term(dummy));
    case 3:
      return mk_not(mk_atom("P", {place(pick(rng, 0, window - 1))}));
    default:
      return mk_or({mk_atom("P", {place(0)}),
                    mk_eq(place(pick(rng, 0, window - 1)), random_term(dummy))});
  }
}

// A random omega block over sort s: period <= max_period, window <= max_window.
inline Formula random_omega_het(Rng& rng, int max_period, int max_window,
                                bool with_param = false) {
  HetBlock blk;
  blk.polarity = pick(rng, 0, 1) ? Polarity::AE : Polarity::EA;
  int period = pick(rng, 1, max_period);
  for (int i = 0; i < period; ++i)
    blk.schedule.push_back({Var{"x" + std::to_string(i), "s"}});
  OmegaPayoff op;
  op.safety = pick(rng, 0, 1) != 0;
  op.window = pick(rng, 1, max_window);
  for (int i = 0; i < period; ++i)
    op.templates.push_back(random_template(rng, op.window, with_param));
  return mk_het(std::move(blk), Payoff{op});
}

}  // namespace fixtures
