#pragma once

// Syntactic operations on terms and formulas: free variables, capture-avoiding
// substitution, block-notation manipulation (tails, finite desugaring, duals),
// well-formedness checking and alpha-normalization.

#include <cassert>
#include <functional>
#include <numeric>

#include "hetlog/ast.hpp"

namespace hetlog {

// ---------------------------------------------------------------------------
// Window placeholders. v0..v{w-1} name the last w moves, oldest first; the
// names are reserved and may not be used for ordinary variables.

inline bool is_placeholder_name(const string& name) {
  if (name.size() < 2 || name[0] != 'v') return false;
  for (size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  return true;
}

inline int placeholder_index(const string& name) {
  return std::stoi(name.substr(1));
}

inline string placeholder_name(int i) { return "v" + std::to_string(i); }

// The sort of placeholder v_i inside template t of a block with period p:
// it denotes the move of stage t-(w-1)+i, whose schedule slot is that stage
// mod p. Omega schedules have singleton entries.
inline string placeholder_sort(const HetBlock& block, int template_index, int i,
                               int window) {
  int p = block.period();
  int slot = ((template_index - (window - 1) + i) % p + p) % p;
  return block.schedule[static_cast<size_t>(slot)][0].sort;
}

// ---------------------------------------------------------------------------
// Free variables

inline void term_vars(const TermPtr& t, std::set<Var>& out) {
  if (t->is_var())
    out.insert(t->var());
  else
    for (auto& a : t->app().args) term_vars(a, out);
}

inline std::set<Var> term_vars(const TermPtr& t) {
  std::set<Var> out;
  term_vars(t, out);
  return out;
}

inline void free_vars(const Formula& f, std::set<Var>& out);

inline std::set<Var> free_vars(const Formula& f) {
  std::set<Var> out;
  free_vars(f, out);
  return out;
}

inline void free_vars(const Formula& f, std::set<Var>& out) {
  if (auto* x = as<Atomic>(f)) {
    for (auto& t : x->args) term_vars(t, out);
  } else if (auto* x = as<Equal>(f)) {
    term_vars(x->lhs, out);
    term_vars(x->rhs, out);
  } else if (auto* x = as<AndF>(f)) {
    for (auto& g : x->items) free_vars(g, out);
  } else if (auto* x = as<OrF>(f)) {
    for (auto& g : x->items) free_vars(g, out);
  } else if (auto* x = as<ImpliesF>(f)) {
    free_vars(x->lhs, out);
    free_vars(x->rhs, out);
  } else if (auto* x = as<Quant>(f)) {
    std::set<Var> inner;
    free_vars(x->body, inner);
    for (auto& v : x->vars) inner.erase(v);
    out.insert(inner.begin(), inner.end());
  } else if (auto* x = as<HetF>(f)) {
    // The block binds its whole schedule prefix; window placeholders are
    // bound by the payoff; bounds have no free variables of their own.
    std::set<Var> bound;
    for (auto& entry : x->block.schedule)
      for (auto& v : entry) bound.insert(v);
    std::set<Var> inner;
    if (auto* body = std::get_if<BodyPayoff>(&x->payoff)) {
      free_vars(body->body, inner);
    } else {
      const auto& op = std::get<OmegaPayoff>(x->payoff);
      for (auto& t : op.templates) free_vars(t, inner);
    }
    for (auto& v : inner)
      if (!bound.count(v) && !is_placeholder_name(v.name)) out.insert(v);
    for (auto& t : x->block.window_prefix) term_vars(t, out);
    for (auto& g : x->block.past) free_vars(g, out);
  }
}

inline vector<Var> canonical_context(const Formula& f) {
  auto fv = free_vars(f);
  return vector<Var>(fv.begin(), fv.end());
}

inline vector<Var> canonical_context(const Formula& a, const Formula& b) {
  auto fv = free_vars(a);
  free_vars(b, fv);
  return vector<Var>(fv.begin(), fv.end());
}

// ---------------------------------------------------------------------------
// Substitution

using Subst = std::map<Var, TermPtr>;

inline TermPtr substitute(const TermPtr& t, const Subst& sigma) {
  if (t->is_var()) {
    auto it = sigma.find(t->var());
    return it != sigma.end() ? it->second : t;
  }
  vector<TermPtr> args;
  args.reserve(t->app().args.size());
  bool changed = false;
  for (auto& a : t->app().args) {
    args.push_back(substitute(a, sigma));
    changed = changed || args.back() != a;
  }
  if (!changed) return t;
  return mk_app(t->app().fn, std::move(args));
}

inline Formula substitute(const Formula& f, const Subst& sigma);

namespace detail {

inline Var fresh_var(const Var& base, const std::set<Var>& avoid) {
  Var v = base;
  int n = 0;
  while (avoid.count(v)) v.name = base.name + "'" + (n ? std::to_string(n) : ""), ++n;
  return v;
}

// Substitution under a binder: drop bindings for the bound variables and
// rename binders that would capture variables of the substituted terms.
template <class Rebuild>
Formula subst_binder(const vector<Var>& vars, const Formula& body,
                     const Subst& sigma, Rebuild rebuild) {
  Subst inner = sigma;
  for (auto& v : vars) inner.erase(v);
  std::set<Var> image_vars;
  auto body_fv = free_vars(body);
  for (auto& [v, t] : inner)
    if (body_fv.count(v)) term_vars(t, image_vars);
  vector<Var> new_vars = vars;
  bool renamed = false;
  std::set<Var> avoid = image_vars;
  for (auto& fv : body_fv) avoid.insert(fv);
  for (auto& v : new_vars) {
    if (image_vars.count(v)) {
      Var nv = fresh_var(v, avoid);
      avoid.insert(nv);
      inner[v] = mk_var(nv);
      v = nv;
      renamed = true;
    } else {
      avoid.insert(v);
    }
  }
  if (inner.empty() && !renamed) return rebuild(vars, body);
  return rebuild(new_vars, substitute(body, inner));
}

}  // namespace detail

inline Formula substitute(const Formula& f, const Subst& sigma) {
  if (sigma.empty()) return f;
  if (auto* x = as<Atomic>(f)) {
    vector<TermPtr> args;
    for (auto& t : x->args) args.push_back(substitute(t, sigma));
    return mk_atom(x->rel, std::move(args));
  }
  if (auto* x = as<Equal>(f))
    return mk_eq(substitute(x->lhs, sigma), substitute(x->rhs, sigma));
  if (as<FormulaNode::Top>(f) || as<FormulaNode::Bottom>(f)) return f;
  if (auto* x = as<AndF>(f)) {
    vector<Formula> items;
    for (auto& g : x->items) items.push_back(substitute(g, sigma));
    return mk_and(std::move(items));
  }
  if (auto* x = as<OrF>(f)) {
    vector<Formula> items;
    for (auto& g : x->items) items.push_back(substitute(g, sigma));
    return mk_or(std::move(items));
  }
  if (auto* x = as<ImpliesF>(f))
    return mk_implies(substitute(x->lhs, sigma), substitute(x->rhs, sigma));
  if (auto* x = as<Quant>(f)) {
    bool exists = x->exists;
    return detail::subst_binder(x->vars, x->body, sigma,
                                [exists](vector<Var> vs, Formula b) {
                                  return exists ? mk_exists(std::move(vs), std::move(b))
                                                : mk_forall(std::move(vs), std::move(b));
                                });
  }
  auto* x = as<HetF>(f);
  // Schedule variables and placeholders are binders. Schedule variables never
  // collide with substitution images: parsers reject reserved names and the
  // freshness obligations of the calculus keep corpus blocks clear, so we
  // only need to drop bound variables and rewrite prefix terms + payload.
  const HetBlock& blk = x->block;
  Subst inner = sigma;
  for (auto& entry : blk.schedule)
    for (auto& v : entry) inner.erase(v);
  std::set<Var> image_vars;
  for (auto& [v, t] : inner) term_vars(t, image_vars);
  for (auto& entry : blk.schedule)
    for (auto& v : entry)
      if (image_vars.count(v))
        throw std::runtime_error("substitution would capture schedule variable " +
                                 v.name);
  HetBlock nb = blk;
  for (auto& t : nb.window_prefix) t = substitute(t, sigma);
  for (auto& g : nb.past) g = substitute(g, sigma);  // ambient scope
  Payoff np = x->payoff;
  if (auto* body = std::get_if<BodyPayoff>(&np)) {
    body->body = substitute(body->body, inner);
  } else {
    auto& op = std::get<OmegaPayoff>(np);
    for (auto& t : op.templates) t = substitute(t, inner);
  }
  return mk_het(std::move(nb), std::move(np));
}

// ---------------------------------------------------------------------------
// Block notation: tails, finite desugaring, duals.

inline Formula negate_smart(const Formula& f) {
  if (auto* imp = as<ImpliesF>(f))
    if (as<FormulaNode::Bottom>(imp->rhs)) return imp->lhs;
  return mk_not(f);
}

// Complement of an omega payoff: a play satisfies it iff it violates the
// original. Involutive thanks to negate_smart.
inline OmegaPayoff complement_payoff(const OmegaPayoff& p) {
  OmegaPayoff out = p;
  out.safety = !p.safety;
  for (auto& t : out.templates) t = negate_smart(t);
  return out;
}

// The dual block (exists-forall of the negated payoff): flips polarity and
// complements the payoff and past conditions, keeping schedule, bounds and
// prefix.
inline Formula dual_het(const HetF& h) {
  if (!h.block.is_omega())
    throw std::runtime_error("dual_het requires an omega block");
  HetBlock blk = h.block;
  blk.polarity = flip(blk.polarity);
  for (auto& g : blk.past) g = negate_smart(g);
  return mk_het(std::move(blk), complement_payoff(std::get<OmegaPayoff>(h.payoff)));
}

template <class T>
vector<T> rotated(const vector<T>& xs, int by) {
  if (xs.empty()) return xs;
  int n = static_cast<int>(xs.size());
  by = ((by % n) + n) % n;
  vector<T> out;
  out.reserve(xs.size());
  for (int i = 0; i < n; ++i) out.push_back(xs[(i + by) % n]);
  return out;
}

// The stage-n check of an omega payoff instantiated over a move history.
// hist(i) supplies the move term at block stage i; negative i index the
// window prefix. Returns nullptr while the window is not yet full.
inline Formula stage_check(const HetBlock& blk, const OmegaPayoff& op, int n,
                           const std::function<TermPtr(int)>& hist) {
  if (n + 1 + static_cast<int>(blk.window_prefix.size()) < op.window) return nullptr;
  Subst sigma;
  for (int i = 0; i < op.window; ++i)
    sigma[Var{placeholder_name(i),
              placeholder_sort(blk, n % blk.period(), i, op.window)}] =
        hist(n - op.window + 1 + i);
  return substitute(op.templates[static_cast<size_t>(n % blk.period())], sigma);
}

// Periodic schedules reuse one variable name per slot, but tails free one
// occurrence per stage, so freed occurrences are distinguished by an @k
// suffix counting the periods already unrolled: slot x names its moves
// x, x@1, x@2, ... Deterministic, so tails compose structurally.
inline std::pair<string, int> split_occurrence(const string& name) {
  auto at = name.rfind('@');
  if (at == string::npos || at + 1 == name.size()) return {name, 0};
  for (size_t i = at + 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return {name, 0};
  return {name.substr(0, at), std::stoi(name.substr(at + 1))};
}

inline string join_occurrence(const string& base, int k) {
  return k == 0 ? base : base + "@" + std::to_string(k);
}

// The name of the move at block stage i >= 0 of an omega block.
inline Var stage_move_var(const HetBlock& blk, int i) {
  const Var& slot = blk.schedule[static_cast<size_t>(i % blk.period())][0];
  auto [base, k] = split_occurrence(slot.name);
  return Var{join_occurrence(base, k + i / blk.period()), slot.sort};
}

// The tail at stage beta with the freed moves supplied by `moves` (block
// stage i >= 0; window slots before stage 0 fall back to the existing
// prefix). Accumulates the stage checks decided inside the freed prefix
// into `past` and advances the schedule slot names by the unrolled periods.
inline Formula tail_at(const HetF& h, int beta,
                       const std::function<TermPtr(int)>& moves) {
  const HetBlock& blk = h.block;
  const auto& op = std::get<OmegaPayoff>(h.payoff);
  int p = blk.period();
  int prefix_len = static_cast<int>(blk.window_prefix.size());
  auto hist = [&](int i) -> TermPtr {
    if (i < 0) return blk.window_prefix[static_cast<size_t>(i + prefix_len)];
    return moves(i);
  };
  HetBlock nb;
  nb.polarity = beta % 2 == 0 ? blk.polarity : flip(blk.polarity);
  nb.schedule = rotated(blk.schedule, beta);
  if (!blk.bounds.empty()) nb.bounds = rotated(blk.bounds, beta);
  // Rename each slot to its first occurrence at or after stage beta.
  for (int j = 0; j < p; ++j) {
    int slot = (j + beta) % p;
    const Var& old = blk.schedule[static_cast<size_t>(slot)][0];
    Var renamed = stage_move_var(blk, beta + j);
    if (!(renamed == old)) {
      nb.schedule[static_cast<size_t>(j)][0] = renamed;
      if (!nb.bounds.empty())
        nb.bounds[static_cast<size_t>(j)] =
            substitute(nb.bounds[static_cast<size_t>(j)], {{old, mk_var(renamed)}});
    }
  }
  OmegaPayoff np = op;
  np.templates = rotated(op.templates, beta);
  nb.past = blk.past;
  for (int n = 0; n < beta; ++n)
    if (Formula check = stage_check(blk, op, n, hist)) {
      // Vacuous checks (passed safety / missed reach) carry no information.
      if (op.safety && as<FormulaNode::Top>(check)) continue;
      if (!op.safety && as<FormulaNode::Bottom>(check)) continue;
      nb.past.push_back(check);
    }
  int keep = std::min(prefix_len + beta, op.window - 1);
  for (int j = keep; j >= 1; --j) nb.window_prefix.push_back(hist(beta - j));
  return mk_het(std::move(nb), std::move(np));
}

// tail_block(h, beta): the block over stages beta..gamma with polarity
// flipped iff beta is odd. Finite blocks drop their first beta schedule
// entries (at beta = n the payoff body remains); omega blocks rotate their
// periodic data, free the first beta moves into the window prefix and keep
// the checks already decided over them as past conditions.
inline Formula tail_block(const Formula& f, int beta) {
  auto* h = as<HetF>(f);
  if (!h) throw std::runtime_error("tail_block requires a heterogeneous formula");
  if (beta < 0) throw std::runtime_error("tail stage out of range");
  if (beta == 0) return f;
  const HetBlock& blk = h->block;
  if (!blk.is_omega()) {
    int n = *blk.length;
    if (beta > n) throw std::runtime_error("tail stage out of range");
    if (beta == n) return std::get<BodyPayoff>(h->payoff).body;
    HetBlock nb;
    nb.polarity = beta % 2 == 0 ? blk.polarity : flip(blk.polarity);
    nb.length = n - beta;
    nb.schedule.assign(blk.schedule.begin() + beta, blk.schedule.end());
    if (!blk.bounds.empty())
      nb.bounds.assign(blk.bounds.begin() + beta, blk.bounds.end());
    return mk_het(std::move(nb), h->payoff);
  }
  return tail_at(*h, beta, [&](int i) { return mk_var(stage_move_var(blk, i)); });
}

// Finite blocks expand to nested quantifiers; bounds become -> under the
// universal and /\ under the existential quantifier.
inline Formula desugar_finite_block(const Formula& f) {
  auto* h = as<HetF>(f);
  if (!h || h->block.is_omega())
    throw std::runtime_error("desugar_finite_block requires a finite block");
  const HetBlock& blk = h->block;
  int n = *blk.length;
  Formula out = std::get<BodyPayoff>(h->payoff).body;
  for (int i = n - 1; i >= 0; --i) {
    bool universal = (i % 2 == 0) == (blk.polarity == Polarity::AE);
    Formula bound = blk.bounds.empty() ? nullptr : blk.bounds[static_cast<size_t>(i)];
    if (universal) {
      if (bound) out = mk_implies(bound, out);
      out = mk_forall(blk.schedule[static_cast<size_t>(i)], out);
    } else {
      if (bound) out = mk_and({bound, out});
      out = mk_exists(blk.schedule[static_cast<size_t>(i)], out);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subformulas (literal closure; heterogeneous tails are added separately by
// the Morleyization module).

inline void subformulas(const Formula& f, vector<Formula>& out) {
  out.push_back(f);
  if (auto* x = as<AndF>(f)) {
    for (auto& g : x->items) subformulas(g, out);
  } else if (auto* x = as<OrF>(f)) {
    for (auto& g : x->items) subformulas(g, out);
  } else if (auto* x = as<ImpliesF>(f)) {
    subformulas(x->lhs, out);
    subformulas(x->rhs, out);
  } else if (auto* x = as<Quant>(f)) {
    subformulas(x->body, out);
  } else if (auto* x = as<HetF>(f)) {
    if (auto* body = std::get_if<BodyPayoff>(&x->payoff)) subformulas(body->body, out);
    // Omega templates are payoff presentation, not subformula occurrences.
  }
}

inline void collect_het(const Formula& f, vector<Formula>& out) {
  vector<Formula> subs;
  subformulas(f, subs);
  for (auto& g : subs)
    if (as<HetF>(g)) out.push_back(g);
}

// ---------------------------------------------------------------------------
// Well-formedness

struct WfReport {
  vector<string> errors;
  bool ok() const { return errors.empty(); }
};

inline string sort_of_term(const TermPtr& t, const Signature& sig,
                           const std::map<string, string>& var_sorts,
                           WfReport& rep);

inline string sort_of_term(const TermPtr& t, const Signature& sig,
                           const std::map<string, string>& var_sorts,
                           WfReport& rep) {
  if (t->is_var()) {
    auto it = var_sorts.find(t->var().name);
    if (it == var_sorts.end()) {
      rep.errors.push_back("unbound variable " + t->var().name);
      return t->var().sort;
    }
    if (it->second != t->var().sort)
      rep.errors.push_back("variable " + t->var().name + " used at sort " +
                           t->var().sort + " but bound at " + it->second);
    return it->second;
  }
  const auto& app = t->app();
  auto* fn = sig.function(app.fn);
  if (!fn) {
    rep.errors.push_back("unknown function " + app.fn);
    return "?";
  }
  if (fn->arg_sorts.size() != app.args.size()) {
    rep.errors.push_back("function " + app.fn + " expects " +
                         std::to_string(fn->arg_sorts.size()) + " arguments, got " +
                         std::to_string(app.args.size()));
    return fn->result_sort;
  }
  for (size_t i = 0; i < app.args.size(); ++i) {
    string got = sort_of_term(app.args[i], sig, var_sorts, rep);
    if (got != "?" && got != fn->arg_sorts[i])
      rep.errors.push_back("argument " + std::to_string(i) + " of " + app.fn +
                           " has sort " + got + ", expected " + fn->arg_sorts[i]);
  }
  return fn->result_sort;
}

namespace detail {

inline void check_formula(const Formula& f, const Signature& sig,
                          std::map<string, string> var_sorts, bool allow_het,
                          WfReport& rep);

inline void bind_vars(const vector<Var>& vars, const Signature& sig,
                      std::map<string, string>& var_sorts, WfReport& rep) {
  std::set<string> seen;
  for (auto& v : vars) {
    if (is_placeholder_name(v.name))
      rep.errors.push_back("variable name " + v.name + " is reserved for window placeholders");
    if (!sig.has_sort(v.sort))
      rep.errors.push_back("unknown sort " + v.sort + " for variable " + v.name);
    if (!seen.insert(v.name).second)
      rep.errors.push_back("duplicate binder " + v.name);
    var_sorts[v.name] = v.sort;
  }
}

inline void check_het(const HetF& h, const Signature& sig,
                      std::map<string, string> var_sorts, WfReport& rep) {
  const HetBlock& blk = h.block;
  if (blk.schedule.empty()) {
    rep.errors.push_back("heterogeneous block has empty schedule");
    return;
  }
  std::set<string> sched_names;
  for (auto& entry : blk.schedule) {
    if (entry.empty()) rep.errors.push_back("empty variable block in schedule");
    for (auto& v : entry) {
      if (is_placeholder_name(v.name))
        rep.errors.push_back("variable name " + v.name + " is reserved");
      if (!sig.has_sort(v.sort))
        rep.errors.push_back("unknown sort " + v.sort + " in schedule");
      if (!sched_names.insert(v.name).second)
        rep.errors.push_back("schedule variables must be distinct: " + v.name);
    }
  }
  if (!blk.bounds.empty() && blk.bounds.size() != blk.schedule.size())
    rep.errors.push_back("bounds must align one-to-one with the schedule");
  for (size_t i = 0; i < blk.bounds.size(); ++i) {
    std::map<string, string> bscope;  // bounds see only their own block
    for (auto& v : blk.schedule[i]) bscope[v.name] = v.sort;
    vector<Formula> hets;
    collect_het(blk.bounds[i], hets);
    if (!hets.empty())
      rep.errors.push_back("bound formulas must be heterogeneous-free");
    check_formula(blk.bounds[i], sig, bscope, false, rep);
  }
  if (blk.is_omega()) {
    auto* op = std::get_if<OmegaPayoff>(&h.payoff);
    if (!op) {
      rep.errors.push_back("omega-length requires safety/reach payoff");
      return;
    }
    for (auto& entry : blk.schedule)
      if (entry.size() != 1)
        rep.errors.push_back("omega blocks require singleton variable blocks");
    if (op->window < 1) rep.errors.push_back("payoff window must be >= 1");
    if (op->templates.size() != blk.schedule.size())
      rep.errors.push_back("payoff template list must match the schedule period");
    if (static_cast<int>(blk.window_prefix.size()) > op->window - 1)
      rep.errors.push_back("window prefix longer than window-1");
    // Prefix entries occupy the slots just before stage 0; they live in the
    // ambient scope (tails of periodic blocks may free a variable whose name
    // a later period rebinds, and the prefix occurrence is the free one).
    int p = blk.period();
    for (size_t j = 0; j < blk.window_prefix.size(); ++j) {
      int stage = -static_cast<int>(blk.window_prefix.size() - j);
      string want = blk.schedule[static_cast<size_t>(((stage % p) + p) % p)][0].sort;
      string got = sort_of_term(blk.window_prefix[j], sig, var_sorts, rep);
      if (got != "?" && got != want)
        rep.errors.push_back("window prefix entry " + std::to_string(j) +
                             " has sort " + got + ", expected " + want);
    }
    for (size_t t = 0; t < op->templates.size(); ++t) {
      std::map<string, string> scope = var_sorts;
      for (int i = 0; i < op->window; ++i)
        scope[placeholder_name(i)] =
            placeholder_sort(blk, static_cast<int>(t), i, op->window);
      vector<Formula> hets;
      collect_het(op->templates[t], hets);
      if (!hets.empty())
        rep.errors.push_back("payoff templates must be heterogeneous-free");
      check_formula(op->templates[t], sig, scope, false, rep);
    }
    for (auto& g : blk.past) {
      vector<Formula> hets;
      collect_het(g, hets);
      if (!hets.empty())
        rep.errors.push_back("past conditions must be heterogeneous-free");
      check_formula(g, sig, var_sorts, false, rep);  // ambient scope
    }
  } else {
    if (*blk.length < 1) rep.errors.push_back("finite block length must be >= 1");
    if (static_cast<size_t>(*blk.length) != blk.schedule.size())
      rep.errors.push_back("finite block schedule must list one entry per stage");
    if (!blk.window_prefix.empty())
      rep.errors.push_back("finite blocks carry no window prefix");
    if (!blk.past.empty())
      rep.errors.push_back("finite blocks carry no past conditions");
    auto* body = std::get_if<BodyPayoff>(&h.payoff);
    if (!body) {
      rep.errors.push_back("finite-length block requires a body payoff");
      return;
    }
    std::map<string, string> scope = var_sorts;
    for (auto& entry : blk.schedule)
      for (auto& v : entry) scope[v.name] = v.sort;
    check_formula(body->body, sig, scope, true, rep);
  }
}

inline void check_formula(const Formula& f, const Signature& sig,
                          std::map<string, string> var_sorts, bool allow_het,
                          WfReport& rep) {
  if (auto* x = as<Atomic>(f)) {
    auto* rel = sig.relation(x->rel);
    if (!rel) {
      rep.errors.push_back("unknown relation " + x->rel);
      return;
    }
    if (rel->arg_sorts.size() != x->args.size()) {
      rep.errors.push_back("relation " + x->rel + " expects " +
                           std::to_string(rel->arg_sorts.size()) +
                           " arguments, got " + std::to_string(x->args.size()));
      return;
    }
    for (size_t i = 0; i < x->args.size(); ++i) {
      string got = sort_of_term(x->args[i], sig, var_sorts, rep);
      if (got != "?" && got != rel->arg_sorts[i])
        rep.errors.push_back("argument " + std::to_string(i) + " of " + x->rel +
                             " has sort " + got + ", expected " + rel->arg_sorts[i]);
    }
  } else if (auto* x = as<Equal>(f)) {
    string a = sort_of_term(x->lhs, sig, var_sorts, rep);
    string b = sort_of_term(x->rhs, sig, var_sorts, rep);
    if (a != "?" && b != "?" && a != b)
      rep.errors.push_back("equality between sorts " + a + " and " + b);
  } else if (auto* x = as<AndF>(f)) {
    for (auto& g : x->items) check_formula(g, sig, var_sorts, allow_het, rep);
  } else if (auto* x = as<OrF>(f)) {
    for (auto& g : x->items) check_formula(g, sig, var_sorts, allow_het, rep);
  } else if (auto* x = as<ImpliesF>(f)) {
    check_formula(x->lhs, sig, var_sorts, allow_het, rep);
    check_formula(x->rhs, sig, var_sorts, allow_het, rep);
  } else if (auto* x = as<Quant>(f)) {
    auto scope = var_sorts;
    bind_vars(x->vars, sig, scope, rep);
    if (x->vars.empty()) rep.errors.push_back("empty quantifier block");
    check_formula(x->body, sig, scope, allow_het, rep);
  } else if (auto* x = as<HetF>(f)) {
    if (!allow_het) rep.errors.push_back("heterogeneous formula not allowed here");
    check_het(*x, sig, var_sorts, rep);
  }
}

}  // namespace detail

inline WfReport well_formed(const Formula& f, const Signature& sig,
                            const vector<Var>& context) {
  WfReport rep;
  std::map<string, string> scope;
  std::set<string> seen;
  for (auto& v : context) {
    if (!sig.has_sort(v.sort))
      rep.errors.push_back("unknown sort " + v.sort + " in context");
    if (is_placeholder_name(v.name))
      rep.errors.push_back("context variable " + v.name + " is reserved");
    if (!seen.insert(v.name).second)
      rep.errors.push_back("duplicate context variable " + v.name);
    scope[v.name] = v.sort;
  }
  detail::check_formula(f, sig, scope, true, rep);
  if (rep.ok()) {
    auto fv = free_vars(f);
    for (auto& v : fv)
      if (!scope.count(v.name))
        rep.errors.push_back("free variable " + v.name + " not in context");
  }
  return rep;
}

inline WfReport well_formed(const Sequent& s, const Signature& sig) {
  WfReport rep = well_formed(s.antecedent, sig, s.context);
  WfReport r2 = well_formed(s.succedent, sig, s.context);
  rep.errors.insert(rep.errors.end(), r2.errors.begin(), r2.errors.end());
  return rep;
}

inline WfReport well_formed(const Signature& sig) {
  WfReport rep;
  std::set<string> seen;
  for (auto& s : sig.sorts)
    if (!seen.insert(s).second) rep.errors.push_back("duplicate sort " + s);
  std::set<string> rels, funs;
  for (auto& r : sig.relations) {
    if (!rels.insert(r.name).second)
      rep.errors.push_back("duplicate relation " + r.name);
    for (auto& s : r.arg_sorts)
      if (!sig.has_sort(s))
        rep.errors.push_back("relation " + r.name + " uses unknown sort " + s);
  }
  for (auto& f : sig.functions) {
    if (!funs.insert(f.name).second)
      rep.errors.push_back("duplicate function " + f.name);
    for (auto& s : f.arg_sorts)
      if (!sig.has_sort(s))
        rep.errors.push_back("function " + f.name + " uses unknown sort " + s);
    if (!sig.has_sort(f.result_sort))
      rep.errors.push_back("function " + f.name + " has unknown result sort");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Alpha-normalization: canonical bound-variable names, used for hashing and
// for identifying tails that repeat up to renaming.

namespace detail {
inline Formula alpha_walk(const Formula& f, int& counter) {
  if (auto* x = as<Quant>(f)) {
    Subst ren;
    vector<Var> nv;
    for (auto& v : x->vars) {
      Var fresh{"b" + std::to_string(counter++), v.sort};
      ren[v] = mk_var(fresh);
      nv.push_back(fresh);
    }
    Formula body = alpha_walk(substitute(x->body, ren), counter);
    return x->exists ? mk_exists(nv, body) : mk_forall(nv, body);
  }
  if (auto* x = as<AndF>(f)) {
    vector<Formula> items;
    for (auto& g : x->items) items.push_back(alpha_walk(g, counter));
    return mk_and(std::move(items));
  }
  if (auto* x = as<OrF>(f)) {
    vector<Formula> items;
    for (auto& g : x->items) items.push_back(alpha_walk(g, counter));
    return mk_or(std::move(items));
  }
  if (auto* x = as<ImpliesF>(f))
    return mk_implies(alpha_walk(x->lhs, counter), alpha_walk(x->rhs, counter));
  if (auto* x = as<HetF>(f)) {
    Subst ren;
    HetBlock nb = x->block;
    for (auto& entry : nb.schedule)
      for (auto& v : entry) {
        Var fresh{"b" + std::to_string(counter++), v.sort};
        ren[v] = mk_var(fresh);
        v = fresh;
      }
    for (size_t i = 0; i < nb.bounds.size(); ++i)
      nb.bounds[i] = substitute(nb.bounds[i], ren);
    // Prefix terms and past conditions live in the ambient scope: schedule
    // renaming does not touch them, only their own binders normalize.
    for (auto& g : nb.past) g = alpha_walk(g, counter);
    Payoff np = x->payoff;
    if (auto* body = std::get_if<BodyPayoff>(&np))
      body->body = alpha_walk(substitute(body->body, ren), counter);
    else
      for (auto& t : std::get<OmegaPayoff>(np).templates)
        t = substitute(t, ren);
    return mk_het(std::move(nb), std::move(np));
  }
  return f;
}
}  // namespace detail

inline Formula alpha_normalize(const Formula& f) {
  int counter = 0;
  return detail::alpha_walk(f, counter);
}

inline bool alpha_equal(const Formula& a, const Formula& b) {
  return formula_equal(alpha_normalize(a), alpha_normalize(b));
}

inline uint64_t fnv1a(const string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace hetlog
