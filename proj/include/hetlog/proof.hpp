#pragma once

// Sequent-calculus proof kernel: explicit proof trees checked node by node.
// Double-line rules are split into one-directional tags; the transfinite
// transitivity rule is instantiated with finite branching, finite bars and
// finite depth (below omega the limit premise families are vacuous).
//
// Preservation axioms are emitted in their desk-scale form: the play is an
// eventually periodic lasso given by stem/cycle move terms, under which the
// omega-conjunction of tails collapses to finitely many distinct conjuncts
// and the payoff of the play to a finite conjunction (safety) or
// disjunction (reach) of stage checks.

#include "hetlog/game.hpp"
#include "hetlog/parse.hpp"

namespace hetlog {

enum class Rule {
  Identity,
  Substitution,
  Cut,
  EqRefl,
  EqSubst,
  ConjAx,
  ConjRule,
  DisjAx,
  DisjRule,
  ImplIntro,
  ImplElim,
  ExistsIntro,
  ExistsElim,
  ForallIntro,
  ForallElim,
  TT,
  HetAx1,
  HetAx2,
  HetAx3,
  HetAx4,
  PresAx1,
  PresAx2,
  DetAx,
  ExcludedMiddle,
  TheoryAx,
};

inline const std::map<string, Rule>& rule_names() {
  static const std::map<string, Rule> names = {
      {"identity", Rule::Identity},       {"substitution", Rule::Substitution},
      {"cut", Rule::Cut},                 {"eqrefl", Rule::EqRefl},
      {"eqsubst", Rule::EqSubst},         {"conjax", Rule::ConjAx},
      {"conjrule", Rule::ConjRule},       {"disjax", Rule::DisjAx},
      {"disjrule", Rule::DisjRule},       {"implintro", Rule::ImplIntro},
      {"implelim", Rule::ImplElim},       {"existsintro", Rule::ExistsIntro},
      {"existselim", Rule::ExistsElim},   {"forallintro", Rule::ForallIntro},
      {"forallelim", Rule::ForallElim},   {"tt", Rule::TT},
      {"hetax1", Rule::HetAx1},           {"hetax2", Rule::HetAx2},
      {"hetax3", Rule::HetAx3},           {"hetax4", Rule::HetAx4},
      {"presax1", Rule::PresAx1},         {"presax2", Rule::PresAx2},
      {"detax", Rule::DetAx},             {"excludedmiddle", Rule::ExcludedMiddle},
      {"theoryax", Rule::TheoryAx},
  };
  return names;
}

inline string rule_name(Rule r) {
  for (auto& [n, v] : rule_names())
    if (v == r) return n;
  return "?";
}

struct TTParams {
  int gamma = 1;
  vector<vector<int>> bar;
  // node -> (variable block bound at that node, formula); root vars empty
  std::map<vector<int>, std::pair<vector<Var>, Formula>> nodes;
};

struct PresParams {
  Formula block;            // the omega het formula
  vector<TermPtr> stem;     // lasso stem moves
  vector<TermPtr> cycle;    // lasso cycle moves, length = 0 mod lcm(2, period)
};

struct ProofParams {
  Subst subst;                 // Substitution
  optional<int> index;         // ConjAx / DisjAx
  optional<string> name;       // TheoryAx
  vector<Var> xs, ys, ws;      // EqSubst
  Formula phi;                 // EqSubst
  optional<TTParams> tt;
  optional<PresParams> pres;
};

struct ProofNode;
using ProofPtr = shared_ptr<const ProofNode>;

struct ProofNode {
  Rule rule = Rule::Identity;
  Sequent conclusion;
  ProofParams params;
  vector<ProofPtr> premises;
};

inline ProofPtr mk_proof(Rule r, Sequent concl, ProofParams params = {},
                         vector<ProofPtr> premises = {}) {
  return std::make_shared<ProofNode>(
      ProofNode{r, std::move(concl), std::move(params), std::move(premises)});
}

// ---------------------------------------------------------------------------
// Class membership: the payoff carried by a heterogeneous block, modulo
// closure under tails (template rotations). Explicit entries are matched
// modulo the wildcard placeholder sorts they were parsed with.

namespace detail {

inline bool var_wild_equal(const Var& a, const Var& b) {
  return a.name == b.name && (a.sort == b.sort || a.sort == "?" || b.sort == "?");
}

inline bool term_wild_equal(const TermPtr& a, const TermPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (a->is_var()) return var_wild_equal(a->var(), b->var());
  if (a->app().fn != b->app().fn || a->app().args.size() != b->app().args.size())
    return false;
  for (size_t i = 0; i < a->app().args.size(); ++i)
    if (!term_wild_equal(a->app().args[i], b->app().args[i])) return false;
  return true;
}

inline bool formula_wild_equal(const Formula& a, const Formula& b) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = as<Atomic>(a)) {
    auto* y = as<Atomic>(b);
    if (x->rel != y->rel || x->args.size() != y->args.size()) return false;
    for (size_t i = 0; i < x->args.size(); ++i)
      if (!term_wild_equal(x->args[i], y->args[i])) return false;
    return true;
  }
  if (auto* x = as<Equal>(a))
    return term_wild_equal(x->lhs, as<Equal>(b)->lhs) &&
           term_wild_equal(x->rhs, as<Equal>(b)->rhs);
  if (as<FormulaNode::Top>(a) || as<FormulaNode::Bottom>(a)) return true;
  if (auto* x = as<AndF>(a)) {
    auto* y = as<AndF>(b);
    if (x->items.size() != y->items.size()) return false;
    for (size_t i = 0; i < x->items.size(); ++i)
      if (!formula_wild_equal(x->items[i], y->items[i])) return false;
    return true;
  }
  if (auto* x = as<OrF>(a)) {
    auto* y = as<OrF>(b);
    if (x->items.size() != y->items.size()) return false;
    for (size_t i = 0; i < x->items.size(); ++i)
      if (!formula_wild_equal(x->items[i], y->items[i])) return false;
    return true;
  }
  if (auto* x = as<ImpliesF>(a))
    return formula_wild_equal(x->lhs, as<ImpliesF>(b)->lhs) &&
           formula_wild_equal(x->rhs, as<ImpliesF>(b)->rhs);
  return formula_equal(a, b);  // quantified/het templates are not expected here
}

}  // namespace detail

inline bool payoff_in_class(const OmegaPayoff& p, const ClassC& cls) {
  switch (cls.kind) {
    case ClassC::SafetyOnly:
      return p.safety;
    case ClassC::Clopen:
      return true;
    case ClassC::Explicit:
      for (auto& entry : cls.entries) {
        if (entry.safety != p.safety || entry.window != p.window ||
            entry.templates.size() != p.templates.size())
          continue;
        int period = static_cast<int>(entry.templates.size());
        for (int r = 0; r < period; ++r) {
          OmegaPayoff rot = entry;
          rot.templates = rotated(entry.templates, r);
          bool all = true;
          for (size_t i = 0; all && i < p.templates.size(); ++i)
            all = detail::formula_wild_equal(p.templates[i], rot.templates[i]);
          if (all) return true;
        }
      }
      return false;
  }
  return false;
}

// Membership of a heterogeneous formula: its payoff belongs to the class
// closure. Finite blocks are sugar and never pass the omega axiom gates.
inline bool formula_in_class(const Formula& f, const ClassC& cls) {
  auto* h = as<HetF>(f);
  if (!h || !h->block.is_omega()) return false;
  return payoff_in_class(std::get<OmegaPayoff>(h->payoff), cls);
}

// ---------------------------------------------------------------------------
// Axiom instances

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const HetF& het_of(const Formula& f, const char* who) {
  auto* h = as<HetF>(f);
  if (!h || !h->block.is_omega())
    throw KernelError(string(who) + " requires an omega heterogeneous formula");
  return *h;
}

inline int lcm2(int p) { return p % 2 == 0 ? p : 2 * p; }

}  // namespace detail

// HetAx1/2: unfolding of the first move, with the Section 3.3 bound guard.
inline Sequent hetax_unfold_instance(const Formula& f, bool universal_side) {
  const HetF& h = detail::het_of(f, "hetax");
  if (universal_side && h.block.polarity != Polarity::AE)
    throw KernelError("hetax1 requires an AE block");
  if (!universal_side && h.block.polarity != Polarity::EA)
    throw KernelError("hetax2 requires an EA block");
  Var x0 = h.block.schedule[0][0];
  Formula tail = tail_block(f, 1);
  Formula inner = tail;
  if (!h.block.bounds.empty()) {
    const Formula& bound = h.block.bounds[0];
    inner = universal_side ? mk_implies(bound, tail)
                           : mk_and({bound, tail});
  }
  Formula succ = universal_side ? mk_forall({x0}, inner) : mk_exists({x0}, inner);
  return mk_sequent(f, succ, canonical_context(f));
}

// HetAx3/4: decomposition at a finite cut 1 <= beta, with fresh outer
// variables so periodic schedules never rebind. Below omega there are no
// limit ordinals, so finite cuts are the desk-scale instances.
inline Sequent hetax_split_instance(const Formula& f, int beta) {
  const HetF& h = detail::het_of(f, "hetax split");
  if (beta < 1) throw KernelError("decomposition cut must be >= 1");
  const HetBlock& blk = h.block;
  int p = blk.period();
  vector<Var> outer_vars;
  vector<TermPtr> outer_terms;
  for (int i = 0; i < beta; ++i) {
    Var v = stage_move_var(blk, i);
    outer_vars.push_back(v);
    outer_terms.push_back(mk_var(v));
  }
  HetBlock outer;
  outer.polarity = blk.polarity;
  outer.length = beta;
  for (auto& v : outer_vars) outer.schedule.push_back({v});
  if (!blk.bounds.empty())
    for (int i = 0; i < beta; ++i) {
      const Formula& bound = blk.bounds[static_cast<size_t>(i % p)];
      Var orig = blk.schedule[static_cast<size_t>(i % p)][0];
      outer.bounds.push_back(substitute(bound, {{orig, outer_terms[static_cast<size_t>(i)]}}));
    }
  Formula inner =
      tail_at(h, beta, [&](int i) { return outer_terms[static_cast<size_t>(i)]; });
  Formula succ = mk_het(std::move(outer), BodyPayoff{inner});
  return mk_sequent(f, succ, canonical_context(f));
}

// Preservation axiom over an eventually periodic play.
inline Sequent presax_instance(const Formula& f, const vector<TermPtr>& stem,
                               const vector<TermPtr>& cycle) {
  const HetF& h = detail::het_of(f, "presax");
  const HetBlock& blk = h.block;
  const auto& op = std::get<OmegaPayoff>(h.payoff);
  if (!blk.window_prefix.empty())
    throw KernelError("presax applies to blocks without a window prefix");
  if (cycle.empty()) throw KernelError("presax cycle must be nonempty");
  int align = detail::lcm2(blk.period());
  if (static_cast<int>(cycle.size()) % align != 0)
    throw KernelError("presax cycle length must be a multiple of lcm(2, period)");
  int s = static_cast<int>(stem.size());
  int c = static_cast<int>(cycle.size());
  auto move_term = [&](int i) -> TermPtr {
    if (i < s) return stem[static_cast<size_t>(i)];
    return cycle[static_cast<size_t>((i - s) % c)];
  };
  // The antecedent conjoins the tails along the play. Their past conditions
  // accumulate all earlier checks, so only one cycle beyond the point where
  // new checks stop appearing is needed: dedup keeps the distinct ones.
  int tail_limit = s + op.window + c;
  vector<Formula> conjuncts;
  for (int beta = 0; beta < tail_limit; ++beta) {
    Formula t = tail_at(h, beta, move_term);
    bool seen = false;
    for (auto& g : conjuncts) seen = seen || formula_equal(g, t);
    if (!seen) conjuncts.push_back(t);
  }
  vector<Formula> checks;
  int check_limit = s + op.window + c;
  for (int n = 0; n < check_limit; ++n) {
    Formula check = stage_check(blk, op, n, move_term);
    if (!check) continue;
    bool seen = false;
    for (auto& g : checks) seen = seen || formula_equal(g, check);
    if (!seen) checks.push_back(check);
  }
  Formula ante = mk_and(std::move(conjuncts));
  Formula succ = op.safety ? mk_and(std::move(checks)) : mk_or(std::move(checks));
  return mk_sequent(ante, succ, canonical_context(ante, succ));
}

inline Sequent detax_instance(const Formula& f) {
  const HetF& h = detail::het_of(f, "detax");
  Formula succ = mk_or({f, dual_het(h)});
  return mk_sequent(mk_top(), succ, canonical_context(succ));
}

inline Sequent excluded_middle_instance(const Formula& f, vector<Var> ctx) {
  return mk_sequent(mk_top(), mk_or({f, mk_not(f)}), std::move(ctx));
}

// ---------------------------------------------------------------------------
// Checking

struct CheckResult {
  bool ok = true;
  string message;
  vector<int> path;  // premise indices from the root to the failing node

  static CheckResult failure(string msg) { return {false, std::move(msg), {}}; }
};

namespace detail {

inline bool context_subset(const vector<Var>& sub, const vector<Var>& sup) {
  for (auto& v : sub)
    if (std::find(sup.begin(), sup.end(), v) == sup.end()) return false;
  return true;
}

inline bool same_context(const vector<Var>& a, const vector<Var>& b) {
  return normalize_context(a) == normalize_context(b);
}

inline vector<string> multiset_prints(const vector<Formula>& fs) {
  vector<string> out;
  for (auto& f : fs) out.push_back(print_formula(f));
  std::sort(out.begin(), out.end());
  return out;
}

inline vector<Formula> conj_items(const Formula& f) {
  if (auto* x = as<AndF>(f)) return x->items;
  if (as<FormulaNode::Top>(f)) return {};
  return {f};
}

inline vector<Formula> disj_items(const Formula& f) {
  if (auto* x = as<OrF>(f)) return x->items;
  if (as<FormulaNode::Bottom>(f)) return {};
  return {f};
}

}  // namespace detail

// Verifies a single node, assuming its premises were already checked.
inline CheckResult check_step(const ProofNode& node, const Theory& theory) {
  auto fail = [&](const string& msg) {
    return CheckResult::failure(rule_name(node.rule) + ": " + msg);
  };
  const Sequent& c = node.conclusion;
  {
    WfReport wf = well_formed(c, theory.signature);
    if (!wf.ok()) return fail("ill-formed conclusion: " + wf.errors[0]);
  }
  auto need_premises = [&](size_t n) -> optional<CheckResult> {
    if (node.premises.size() != n)
      return fail("expected " + std::to_string(n) + " premises, got " +
                  std::to_string(node.premises.size()));
    return std::nullopt;
  };
  auto class_gate = [&](const Formula& f) -> optional<CheckResult> {
    if (!formula_in_class(f, theory.classc))
      return fail("payoff outside the admissible class C");
    return std::nullopt;
  };

  switch (node.rule) {
    case Rule::Identity: {
      if (auto err = need_premises(0)) return *err;
      if (!formula_equal(c.antecedent, c.succedent))
        return fail("antecedent and succedent differ");
      return {};
    }
    case Rule::Substitution: {
      if (auto err = need_premises(1)) return *err;
      const Sequent& p = node.premises[0]->conclusion;
      if (!formula_equal(c.antecedent, substitute(p.antecedent, node.params.subst)) ||
          !formula_equal(c.succedent, substitute(p.succedent, node.params.subst)))
        return fail("conclusion is not the substitution instance of the premise");
      std::set<Var> needed;
      for (auto& v : p.context) {
        auto it = node.params.subst.find(v);
        if (it != node.params.subst.end())
          term_vars(it->second, needed);
        else
          needed.insert(v);
      }
      for (auto& v : needed)
        if (std::find(c.context.begin(), c.context.end(), v) == c.context.end())
          return fail("context misses variable " + v.name + " of the substituted terms");
      return {};
    }
    case Rule::Cut: {
      if (auto err = need_premises(2)) return *err;
      const Sequent& p1 = node.premises[0]->conclusion;
      const Sequent& p2 = node.premises[1]->conclusion;
      if (!formula_equal(p1.succedent, p2.antecedent))
        return fail("cut formulas do not match");
      if (!formula_equal(c.antecedent, p1.antecedent) ||
          !formula_equal(c.succedent, p2.succedent))
        return fail("conclusion does not compose the premises");
      if (!detail::same_context(p1.context, c.context) ||
          !detail::same_context(p2.context, c.context))
        return fail("cut premises must share the conclusion context");
      return {};
    }
    case Rule::EqRefl: {
      if (auto err = need_premises(0)) return *err;
      if (!as<FormulaNode::Top>(c.antecedent)) return fail("antecedent must be true");
      auto* eq = as<Equal>(c.succedent);
      if (!eq || !eq->lhs->is_var() || !term_equal(eq->lhs, eq->rhs))
        return fail("succedent must be x = x");
      return {};
    }
    case Rule::EqSubst: {
      if (auto err = need_premises(0)) return *err;
      const auto& xs = node.params.xs;
      const auto& ys = node.params.ys;
      const auto& ws = node.params.ws;
      if (xs.empty() || xs.size() != ys.size() || xs.size() != ws.size())
        return fail("xs/ys/ws must be nonempty and of equal length");
      for (size_t i = 0; i < xs.size(); ++i)
        if (xs[i].sort != ys[i].sort || xs[i].sort != ws[i].sort)
          return fail("xs/ys/ws sorts differ");
      if (!node.params.phi) return fail("missing formula parameter");
      Subst to_x, to_y;
      for (size_t i = 0; i < ws.size(); ++i) {
        to_x[ws[i]] = mk_var(xs[i]);
        to_y[ws[i]] = mk_var(ys[i]);
      }
      vector<Formula> items;
      for (size_t i = 0; i < xs.size(); ++i)
        items.push_back(mk_eq(mk_var(xs[i]), mk_var(ys[i])));
      items.push_back(substitute(node.params.phi, to_x));
      if (!formula_equal(c.antecedent, mk_and(std::move(items))))
        return fail("antecedent is not (x=y) /\\ phi[x/w]");
      if (!formula_equal(c.succedent, substitute(node.params.phi, to_y)))
        return fail("succedent is not phi[y/w]");
      for (auto& v : xs)
        if (!detail::context_subset({v}, c.context)) return fail("context misses " + v.name);
      for (auto& v : ys)
        if (!detail::context_subset({v}, c.context)) return fail("context misses " + v.name);
      return {};
    }
    case Rule::ConjAx: {
      if (auto err = need_premises(0)) return *err;
      if (!node.params.index) return fail("missing conjunct index");
      auto items = detail::conj_items(c.antecedent);
      int j = *node.params.index;
      if (j < 0 || j >= static_cast<int>(items.size()))
        return fail("conjunct index out of range");
      if (!formula_equal(c.succedent, items[static_cast<size_t>(j)]))
        return fail("succedent is not the selected conjunct");
      return {};
    }
    case Rule::ConjRule: {
      vector<Formula> succs;
      for (auto& p : node.premises) {
        const Sequent& ps = p->conclusion;
        if (!formula_equal(ps.antecedent, c.antecedent))
          return fail("premise antecedents must equal the conclusion antecedent");
        if (!detail::same_context(ps.context, c.context))
          return fail("premise contexts must equal the conclusion context");
        succs.push_back(ps.succedent);
      }
      auto items = detail::conj_items(c.succedent);
      if (detail::multiset_prints(items) != detail::multiset_prints(succs))
        return fail("conclusion conjuncts do not match the premises");
      return {};
    }
    case Rule::DisjAx: {
      if (auto err = need_premises(0)) return *err;
      if (!node.params.index) return fail("missing disjunct index");
      auto items = detail::disj_items(c.succedent);
      int j = *node.params.index;
      if (j < 0 || j >= static_cast<int>(items.size()))
        return fail("disjunct index out of range");
      if (!formula_equal(c.antecedent, items[static_cast<size_t>(j)]))
        return fail("antecedent is not the selected disjunct");
      return {};
    }
    case Rule::DisjRule: {
      vector<Formula> antes;
      for (auto& p : node.premises) {
        const Sequent& ps = p->conclusion;
        if (!formula_equal(ps.succedent, c.succedent))
          return fail("premise succedents must equal the conclusion succedent");
        if (!detail::same_context(ps.context, c.context))
          return fail("premise contexts must equal the conclusion context");
        antes.push_back(ps.antecedent);
      }
      auto items = detail::disj_items(c.antecedent);
      if (detail::multiset_prints(items) != detail::multiset_prints(antes))
        return fail("conclusion disjuncts do not match the premises");
      return {};
    }
    case Rule::ImplIntro: {
      if (auto err = need_premises(1)) return *err;
      auto* imp = as<ImpliesF>(c.succedent);
      if (!imp) return fail("succedent must be an implication");
      const Sequent& p = node.premises[0]->conclusion;
      if (!formula_equal(p.antecedent, mk_and({c.antecedent, imp->lhs})) ||
          !formula_equal(p.succedent, imp->rhs))
        return fail("premise must be phi /\\ psi |- eta");
      if (!detail::same_context(p.context, c.context))
        return fail("contexts must agree");
      return {};
    }
    case Rule::ImplElim: {
      if (auto err = need_premises(1)) return *err;
      const Sequent& p = node.premises[0]->conclusion;
      auto* imp = as<ImpliesF>(p.succedent);
      if (!imp) return fail("premise succedent must be an implication");
      if (!formula_equal(c.antecedent, mk_and({p.antecedent, imp->lhs})) ||
          !formula_equal(c.succedent, imp->rhs))
        return fail("conclusion must be phi /\\ psi |- eta");
      if (!detail::same_context(p.context, c.context))
        return fail("contexts must agree");
      return {};
    }
    case Rule::ExistsIntro:
    case Rule::ExistsElim: {
      if (auto err = need_premises(1)) return *err;
      const Sequent& p = node.premises[0]->conclusion;
      const Sequent& quant_side = node.rule == Rule::ExistsIntro ? c : p;
      const Sequent& open_side = node.rule == Rule::ExistsIntro ? p : c;
      auto* q = as<Quant>(quant_side.antecedent);
      if (!q || !q->exists) return fail("antecedent must be existential");
      if (!formula_equal(open_side.antecedent, q->body))
        return fail("open-side antecedent must be the quantifier body");
      if (!formula_equal(open_side.succedent, quant_side.succedent))
        return fail("succedents must agree");
      auto fv = free_vars(quant_side.succedent);
      for (auto& v : q->vars)
        if (fv.count(v)) return fail("variable " + v.name + " is free in the succedent");
      for (auto& v : q->vars)
        if (detail::context_subset({v}, quant_side.context))
          return fail("quantified variable " + v.name + " already occurs in the context");
      vector<Var> extended = quant_side.context;
      extended.insert(extended.end(), q->vars.begin(), q->vars.end());
      if (!detail::same_context(open_side.context, extended))
        return fail("open-side context must extend by the quantified block");
      return {};
    }
    case Rule::ForallIntro:
    case Rule::ForallElim: {
      if (auto err = need_premises(1)) return *err;
      const Sequent& p = node.premises[0]->conclusion;
      const Sequent& quant_side = node.rule == Rule::ForallIntro ? c : p;
      const Sequent& open_side = node.rule == Rule::ForallIntro ? p : c;
      auto* q = as<Quant>(quant_side.succedent);
      if (!q || q->exists) return fail("succedent must be universal");
      if (!formula_equal(open_side.succedent, q->body))
        return fail("open-side succedent must be the quantifier body");
      if (!formula_equal(open_side.antecedent, quant_side.antecedent))
        return fail("antecedents must agree");
      auto fv = free_vars(quant_side.antecedent);
      for (auto& v : q->vars)
        if (fv.count(v)) return fail("variable " + v.name + " is free in the antecedent");
      for (auto& v : q->vars)
        if (detail::context_subset({v}, quant_side.context))
          return fail("quantified variable " + v.name + " already occurs in the context");
      vector<Var> extended = quant_side.context;
      extended.insert(extended.end(), q->vars.begin(), q->vars.end());
      if (!detail::same_context(open_side.context, extended))
        return fail("open-side context must extend by the quantified block");
      return {};
    }
    case Rule::TT: {
      if (!node.params.tt) return fail("missing tt parameters");
      const TTParams& tt = *node.params.tt;
      if (tt.gamma < 1) return fail("branching factor must be >= 1");
      if (tt.bar.empty()) return fail("bar must be nonempty");
      for (auto& f : tt.bar)
        for (auto& g : tt.bar) {
          if (&f == &g) continue;
          if (f.size() <= g.size() && std::equal(f.begin(), f.end(), g.begin()))
            return fail("bar must be an antichain");
        }
      auto node_of = [&](const vector<int>& key)
          -> const std::pair<vector<Var>, Formula>* {
        auto it = tt.nodes.find(key);
        return it == tt.nodes.end() ? nullptr : &it->second;
      };
      if (!node_of({})) return fail("missing root node data");
      // Node set: exactly the prefixes of bar elements.
      std::set<vector<int>> expected_keys;
      for (auto& f : tt.bar)
        for (size_t len = 0; len <= f.size(); ++len)
          expected_keys.insert(vector<int>(f.begin(), f.begin() + static_cast<long>(len)));
      std::set<vector<int>> bar_set(tt.bar.begin(), tt.bar.end());
      std::set<vector<int>> below;
      for (auto& k : expected_keys)
        if (!bar_set.count(k)) below.insert(k);
      for (auto& k : expected_keys)
        if (!node_of(k)) return fail("missing node data along the bar");
      for (auto& [k, v] : tt.nodes)
        if (!expected_keys.count(k)) return fail("node data outside the bar tree");
      // Every child of a below-bar node must be present (bar completeness).
      for (auto& k : below)
        for (int i = 0; i < tt.gamma; ++i) {
          vector<int> child = k;
          child.push_back(i);
          if (!expected_keys.count(child))
            return fail("bar is not met along every branch");
        }
      // Freshness / free-variable side conditions.
      for (auto& [k, v] : tt.nodes) {
        if (k.empty()) {
          if (!v.first.empty()) return fail("root node binds no variables");
          continue;
        }
        vector<int> parent(k.begin(), k.end() - 1);
        auto* pv = node_of(parent);
        auto parent_fv = free_vars(pv->second);
        std::set<Var> expected_fv = parent_fv;
        for (auto& var : v.first) {
          if (parent_fv.count(var))
            return fail("bound variable " + var.name + " is free in the parent formula");
          expected_fv.insert(var);
        }
        if (free_vars(v.second) != expected_fv)
          return fail("free variables must be the parent's plus the bound block");
      }
      // Premises: one per below-bar node, lexicographic.
      vector<vector<int>> order(below.begin(), below.end());
      if (node.premises.size() != order.size())
        return fail("expected " + std::to_string(order.size()) + " premises");
      for (size_t i = 0; i < order.size(); ++i) {
        auto& k = order[i];
        auto* v = node_of(k);
        vector<Formula> children;
        for (int g = 0; g < tt.gamma; ++g) {
          vector<int> child = k;
          child.push_back(g);
          auto* cv = node_of(child);
          children.push_back(mk_exists(cv->first, cv->second));
        }
        Sequent expected = mk_sequent(v->second, mk_or(std::move(children)),
                                      canonical_context(v->second));
        if (!sequent_equal(node.premises[i]->conclusion, expected))
          return fail("premise " + std::to_string(i) +
                      " does not match the canonical tree sequent");
      }
      // Conclusion.
      vector<Formula> disjuncts;
      for (auto& f : tt.bar) {
        vector<Var> vars;
        vector<Formula> conj;
        for (size_t len = 1; len <= f.size(); ++len) {
          vector<int> key(f.begin(), f.begin() + static_cast<long>(len));
          auto* v = node_of(key);
          vars.insert(vars.end(), v->first.begin(), v->first.end());
          conj.push_back(v->second);
        }
        disjuncts.push_back(mk_exists(std::move(vars), mk_and(std::move(conj))));
      }
      const Formula& root = node_of({})->second;
      Sequent expected =
          mk_sequent(root, mk_or(std::move(disjuncts)), canonical_context(root));
      if (!sequent_equal(c, expected))
        return fail("conclusion does not match the bar disjunction");
      return {};
    }
    case Rule::HetAx1:
    case Rule::HetAx2: {
      if (auto err = need_premises(0)) return *err;
      if (auto err = class_gate(c.antecedent)) return *err;
      try {
        Sequent expected =
            hetax_unfold_instance(c.antecedent, node.rule == Rule::HetAx1);
        if (!formula_equal(c.succedent, expected.succedent))
          return fail("succedent is not the one-step unfolding");
      } catch (const KernelError& e) {
        return fail(e.what());
      }
      return {};
    }
    case Rule::HetAx3:
    case Rule::HetAx4: {
      if (auto err = need_premises(0)) return *err;
      if (auto err = class_gate(c.antecedent)) return *err;
      auto* h = as<HetF>(c.antecedent);
      if (!h) return fail("antecedent must be heterogeneous");
      bool want_ae = node.rule == Rule::HetAx3;
      if ((h->block.polarity == Polarity::AE) != want_ae)
        return fail(want_ae ? "hetax3 requires an AE block" : "hetax4 requires an EA block");
      auto* outer = as<HetF>(c.succedent);
      if (!outer || outer->block.is_omega())
        return fail("succedent must be a finite block around the tail");
      int beta = *outer->block.length;
      try {
        Sequent expected = hetax_split_instance(c.antecedent, beta);
        if (!alpha_equal(c.succedent, expected.succedent))
          return fail("succedent is not the decomposition at the cut");
      } catch (const KernelError& e) {
        return fail(e.what());
      }
      return {};
    }
    case Rule::PresAx1:
    case Rule::PresAx2: {
      if (auto err = need_premises(0)) return *err;
      if (!node.params.pres) return fail("missing lasso parameters");
      const PresParams& pp = *node.params.pres;
      if (!pp.block) return fail("missing block parameter");
      auto* h = as<HetF>(pp.block);
      if (!h || !h->block.is_omega()) return fail("block must be an omega formula");
      bool want_ae = node.rule == Rule::PresAx1;
      if ((h->block.polarity == Polarity::AE) != want_ae)
        return fail(want_ae ? "presax1 requires an AE block" : "presax2 requires an EA block");
      if (auto err = class_gate(pp.block)) return *err;
      Sequent expected;
      try {
        expected = presax_instance(pp.block, pp.stem, pp.cycle);
      } catch (const KernelError& e) {
        return fail(e.what());
      }
      if (!formula_equal(c.antecedent, expected.antecedent) ||
          !formula_equal(c.succedent, expected.succedent))
        return fail("conclusion does not match the lasso instance");
      return {};
    }
    case Rule::DetAx: {
      if (auto err = need_premises(0)) return *err;
      if (!as<FormulaNode::Top>(c.antecedent)) return fail("antecedent must be true");
      auto* disj = as<OrF>(c.succedent);
      if (!disj || disj->items.size() != 2)
        return fail("succedent must be a two-way disjunction");
      auto* h = as<HetF>(disj->items[0]);
      if (!h || !h->block.is_omega())
        return fail("first disjunct must be an omega block");
      if (auto err = class_gate(disj->items[0])) return *err;
      if (!formula_equal(disj->items[1], dual_het(*h)))
        return fail("second disjunct must be the dual block");
      return {};
    }
    case Rule::ExcludedMiddle: {
      if (auto err = need_premises(0)) return *err;
      if (theory.mode != Mode::Classical)
        return fail("excluded middle requires classical mode");
      if (!as<FormulaNode::Top>(c.antecedent)) return fail("antecedent must be true");
      auto* disj = as<OrF>(c.succedent);
      if (!disj || disj->items.size() != 2)
        return fail("succedent must be phi or not(phi)");
      if (!formula_equal(disj->items[1], mk_not(disj->items[0])))
        return fail("second disjunct must negate the first");
      return {};
    }
    case Rule::TheoryAx: {
      if (auto err = need_premises(0)) return *err;
      if (!node.params.name) return fail("missing axiom name");
      const NamedAxiom* ax = theory.axiom(*node.params.name);
      if (!ax) return fail("unknown theory axiom " + *node.params.name);
      if (!sequent_equal(c, ax->sequent))
        return fail("conclusion differs from axiom " + *node.params.name);
      return {};
    }
  }
  return fail("unknown rule");
}

// Bottom-up check of the whole tree; the first failing node is reported
// with its premise-index path from the root.
inline CheckResult check_proof(const ProofPtr& proof, const Theory& theory) {
  vector<int> path;
  std::function<CheckResult(const ProofPtr&)> go = [&](const ProofPtr& n) -> CheckResult {
    for (size_t i = 0; i < n->premises.size(); ++i) {
      path.push_back(static_cast<int>(i));
      CheckResult r = go(n->premises[i]);
      if (!r.ok) return r;
      path.pop_back();
    }
    CheckResult r = check_step(*n, theory);
    if (!r.ok) r.path = path;
    return r;
  };
  return go(proof);
}

// ---------------------------------------------------------------------------
// Proof script text format:
//   (rule <tag> conclusion "<sequent>" params { ... } premises [ ... ])

inline void print_proof(std::ostream& os, const ProofPtr& p, int indent = 0);

namespace detail {

inline void print_term_list(std::ostream& os, const vector<TermPtr>& ts) {
  os << "[";
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) os << ", ";
    print_term(os, ts[i]);
  }
  os << "]";
}

inline void print_key(std::ostream& os, const vector<int>& key) {
  os << "[";
  for (size_t i = 0; i < key.size(); ++i) os << (i ? "," : "") << key[i];
  os << "]";
}

}  // namespace detail

inline void print_proof(std::ostream& os, const ProofPtr& p, int indent) {
  string pad(static_cast<size_t>(indent) * 2, ' ');
  os << pad << "(rule " << rule_name(p->rule) << " conclusion \"";
  print_sequent(os, p->conclusion);
  os << "\"";
  const ProofParams& pr = p->params;
  bool has_params = !pr.subst.empty() || pr.index || pr.name || !pr.xs.empty() ||
                    pr.tt.has_value() || pr.pres.has_value();
  if (has_params) {
    os << " params { ";
    bool first = true;
    auto sep = [&]() { os << (first ? "" : "; "); first = false; };
    if (!pr.subst.empty()) {
      sep();
      os << "map: {";
      bool f2 = true;
      for (auto& [v, t] : pr.subst) {
        os << (f2 ? "" : ", ") << v.name << ":" << v.sort << " -> ";
        print_term(os, t);
        f2 = false;
      }
      os << "}";
    }
    if (pr.index) {
      sep();
      os << "index: " << *pr.index;
    }
    if (pr.name) {
      sep();
      os << "name: " << *pr.name;
    }
    if (!pr.xs.empty()) {
      sep();
      os << "xs: ";
      print_vars(os, pr.xs);
      os << "; ys: ";
      print_vars(os, pr.ys);
      os << "; ws: ";
      print_vars(os, pr.ws);
      os << "; phi: \"";
      print_formula(os, pr.phi);
      os << "\"";
    }
    if (pr.tt) {
      sep();
      os << "gamma: " << pr.tt->gamma << "; bar: [";
      for (size_t i = 0; i < pr.tt->bar.size(); ++i) {
        if (i) os << ", ";
        detail::print_key(os, pr.tt->bar[i]);
      }
      os << "]; nodes: {";
      bool f2 = true;
      for (auto& [k, v] : pr.tt->nodes) {
        os << (f2 ? "" : ", ");
        detail::print_key(os, k);
        os << " -> (";
        print_vars(os, v.first);
        os << ", \"";
        print_formula(os, v.second);
        os << "\")";
        f2 = false;
      }
      os << "}";
    }
    if (pr.pres) {
      sep();
      os << "block: \"";
      print_formula(os, pr.pres->block);
      os << "\"; stem: ";
      detail::print_term_list(os, pr.pres->stem);
      os << "; cycle: ";
      detail::print_term_list(os, pr.pres->cycle);
    }
    os << " }";
  }
  if (!p->premises.empty()) {
    os << " premises [\n";
    for (size_t i = 0; i < p->premises.size(); ++i) {
      print_proof(os, p->premises[i], indent + 1);
      if (i + 1 < p->premises.size()) os << ",";
      os << "\n";
    }
    os << pad << "]";
  }
  os << ")";
}

inline string print_proof(const ProofPtr& p) {
  std::ostringstream os;
  print_proof(os, p);
  return os.str();
}

// Parses a proof script against a theory (signature + axiom names).
inline ProofPtr parse_proof_node(Parser& ps, const Theory& theory);

namespace detail {

inline vector<int> parse_key(Parser& ps) {
  ps.expect("[");
  vector<int> key;
  if (!ps.accept("]")) {
    do {
      key.push_back(ps.number());
    } while (ps.accept(","));
    ps.expect("]");
  }
  return key;
}

}  // namespace detail

inline ProofPtr parse_proof_node(Parser& ps, const Theory& theory) {
  ps.expect("(");
  ps.expect_ident("rule");
  string tag = ps.ident();
  auto it = rule_names().find(tag);
  if (it == rule_names().end()) ps.fail("unknown rule tag " + tag);
  Rule rule = it->second;
  ps.expect_ident("conclusion");
  string seq_text = ps.quoted();
  Sequent conclusion = parse_sequent(seq_text, theory.signature);
  Scope scope;
  for (auto& v : conclusion.context) scope[v.name] = v.sort;

  ProofParams params;
  if (ps.accept_ident("params")) {
    ps.expect("{");
    while (!ps.accept("}")) {
      string key = ps.ident();
      ps.expect(":");
      if (key == "map") {
        ps.expect("{");
        if (!ps.accept("}")) {
          do {
            Var v = ps.sorted_var();
            ps.expect("->");
            params.subst[v] = ps.term(scope);
          } while (ps.accept(","));
          ps.expect("}");
        }
      } else if (key == "index") {
        params.index = ps.number();
      } else if (key == "name") {
        params.name = ps.ident();
      } else if (key == "xs") {
        params.xs = ps.var_list();
      } else if (key == "ys") {
        params.ys = ps.var_list();
      } else if (key == "ws") {
        params.ws = ps.var_list();
      } else if (key == "phi") {
        Scope phi_scope = scope;
        ProofParams& pr = params;
        for (auto& v : pr.ws) phi_scope[v.name] = v.sort;
        for (auto& v : pr.xs) phi_scope[v.name] = v.sort;
        for (auto& v : pr.ys) phi_scope[v.name] = v.sort;
        Parser sub = Parser::from_text(ps.quoted(), &theory.signature);
        params.phi = sub.formula(phi_scope);
      } else if (key == "gamma") {
        if (!params.tt) params.tt.emplace();
        params.tt->gamma = ps.number();
      } else if (key == "bar") {
        if (!params.tt) params.tt.emplace();
        ps.expect("[");
        do {
          params.tt->bar.push_back(detail::parse_key(ps));
        } while (ps.accept(","));
        ps.expect("]");
      } else if (key == "nodes") {
        if (!params.tt) params.tt.emplace();
        ps.expect("{");
        // Two passes are impractical here, so collect raw strings first and
        // parse each formula under the union of all declared variables.
        vector<std::tuple<vector<int>, vector<Var>, string>> raw;
        if (!ps.accept("}")) {
          do {
            vector<int> k = detail::parse_key(ps);
            ps.expect("->");
            ps.expect("(");
            vector<Var> vars = ps.var_list();
            ps.expect(",");
            string text = ps.quoted();
            ps.expect(")");
            raw.emplace_back(std::move(k), std::move(vars), std::move(text));
          } while (ps.accept(","));
          ps.expect("}");
        }
        Scope all = scope;
        for (auto& [k, vars, text] : raw)
          for (auto& v : vars) all[v.name] = v.sort;
        for (auto& [k, vars, text] : raw) {
          Parser sub = Parser::from_text(text, &theory.signature);
          params.tt->nodes[k] = {vars, sub.formula(all)};
        }
      } else if (key == "block") {
        if (!params.pres) params.pres.emplace();
        Parser sub = Parser::from_text(ps.quoted(), &theory.signature);
        params.pres->block = sub.formula(scope);
      } else if (key == "stem" || key == "cycle") {
        if (!params.pres) params.pres.emplace();
        auto& dst = key == "stem" ? params.pres->stem : params.pres->cycle;
        ps.expect("[");
        if (!ps.accept("]")) {
          do {
            dst.push_back(ps.term(scope));
          } while (ps.accept(","));
          ps.expect("]");
        }
      } else {
        ps.fail("unknown parameter " + key);
      }
      ps.accept(";");
    }
  }
  vector<ProofPtr> premises;
  if (ps.accept_ident("premises")) {
    ps.expect("[");
    if (!ps.accept("]")) {
      do {
        premises.push_back(parse_proof_node(ps, theory));
      } while (ps.accept(","));
      ps.expect("]");
    }
  }
  ps.expect(")");
  return mk_proof(rule, std::move(conclusion), std::move(params), std::move(premises));
}

inline ProofPtr parse_proof(const string& src, const Theory& theory) {
  Parser ps = Parser::from_text(src, &theory.signature);
  ProofPtr p = parse_proof_node(ps, theory);
  if (!ps.at_end()) ps.fail("trailing input after proof");
  return p;
}

}  // namespace hetlog
