#pragma once

// Core syntax: signatures, terms, formulas (including heterogeneous
// quantifier blocks with clopen omega-payoffs), sequents and theories.
// All values are immutable after construction; formulas are shared
// subtrees behind shared_ptr and may be used concurrently.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hetlog {

using std::optional;
using std::shared_ptr;
using std::string;
using std::vector;

struct Diagnostic {
  int line = 0;
  int col = 0;
  string message;
};

struct SyntaxError : std::runtime_error {
  Diagnostic diag;
  explicit SyntaxError(Diagnostic d)
      : std::runtime_error(std::to_string(d.line) + ":" + std::to_string(d.col) +
                           ": " + d.message),
        diag(std::move(d)) {}
};

// ---------------------------------------------------------------------------
// Signature

struct Signature {
  struct Rel {
    string name;
    vector<string> arg_sorts;
  };
  struct Fun {
    string name;
    vector<string> arg_sorts;
    string result_sort;
  };

  vector<string> sorts;   // declaration order matters for printing
  vector<Rel> relations;  // names unique within category
  vector<Fun> functions;  // constants are nullary functions

  bool has_sort(const string& s) const {
    return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
  }
  const Rel* relation(const string& name) const {
    for (auto& r : relations)
      if (r.name == name) return &r;
    return nullptr;
  }
  const Fun* function(const string& name) const {
    for (auto& f : functions)
      if (f.name == name) return &f;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Terms

struct Var {
  string name;
  string sort;

  friend bool operator==(const Var& a, const Var& b) {
    return a.name == b.name && a.sort == b.sort;
  }
  friend bool operator<(const Var& a, const Var& b) {
    return a.name != b.name ? a.name < b.name : a.sort < b.sort;
  }
};

struct Term;
using TermPtr = shared_ptr<const Term>;

struct Term {
  struct App {
    string fn;
    vector<TermPtr> args;
  };
  std::variant<Var, App> node;

  bool is_var() const { return node.index() == 0; }
  const Var& var() const { return std::get<Var>(node); }
  const App& app() const { return std::get<App>(node); }
};

inline TermPtr mk_var(Var v) { return std::make_shared<Term>(Term{std::move(v)}); }
inline TermPtr mk_var(string name, string sort) {
  return mk_var(Var{std::move(name), std::move(sort)});
}
inline TermPtr mk_app(string fn, vector<TermPtr> args = {}) {
  return std::make_shared<Term>(Term{Term::App{std::move(fn), std::move(args)}});
}

inline bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  if (a->is_var()) return a->var() == b->var();
  const auto& fa = a->app();
  const auto& fb = b->app();
  if (fa.fn != fb.fn || fa.args.size() != fb.args.size()) return false;
  for (size_t i = 0; i < fa.args.size(); ++i)
    if (!term_equal(fa.args[i], fb.args[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Formulas

struct FormulaNode;
using Formula = shared_ptr<const FormulaNode>;

enum class Polarity { AE, EA };  // AE: the universal player moves at even stages

inline Polarity flip(Polarity p) { return p == Polarity::AE ? Polarity::EA : Polarity::AE; }

// Payoff of a heterogeneous block. Body is only legal for finite blocks;
// Safety/Reach only for omega blocks. Templates form a periodic list aligned
// one-to-one with the schedule; the stage-n condition is templates[n mod p]
// applied to the last `window` moves (placeholders v0..v{w-1}, oldest first).
// Checks whose window would reach before the start of play are skipped.
struct BodyPayoff {
  Formula body;
};
struct OmegaPayoff {
  bool safety = true;  // false: reach
  int window = 1;
  vector<Formula> templates;
};
using Payoff = std::variant<BodyPayoff, OmegaPayoff>;

// A heterogeneous quantifier block. For finite length n the schedule has
// exactly n entries; for omega it lists one period, each entry a single
// variable (window placeholders denote single moves). Tails of a block at
// stage beta free the played moves: `window_prefix` holds the last
// min(beta, w-1) of them as terms so early window slots stay filled, and
// `past` holds the stage checks already decided inside the freed prefix
// (het-free formulas in the ambient scope). A safety payoff requires every
// past entry, a reach payoff is achieved once some past entry holds.
struct HetBlock {
  Polarity polarity = Polarity::AE;
  optional<int> length;             // nullopt = omega
  vector<vector<Var>> schedule;     // nonempty; entries nonempty
  vector<Formula> bounds;           // empty, or one per schedule entry
  vector<TermPtr> window_prefix;    // omega blocks only; size <= window-1
  vector<Formula> past;             // omega blocks only

  bool is_omega() const { return !length.has_value(); }
  int period() const { return static_cast<int>(schedule.size()); }
};

struct FormulaNode {
  struct Atomic {
    string rel;
    vector<TermPtr> args;
  };
  struct Equal {
    TermPtr lhs, rhs;
  };
  struct Top {};
  struct Bottom {};
  struct And {
    vector<Formula> items;  // size >= 2 after normalization
  };
  struct Or {
    vector<Formula> items;  // size >= 2 after normalization
  };
  struct Implies {
    Formula lhs, rhs;
  };
  struct Quant {
    bool exists = true;
    vector<Var> vars;  // nonempty after normalization
    Formula body;
  };
  struct Het {
    HetBlock block;
    Payoff payoff;
  };

  using Node = std::variant<Atomic, Equal, Top, Bottom, And, Or, Implies, Quant, Het>;
  Node node;
};

using Atomic = FormulaNode::Atomic;
using Equal = FormulaNode::Equal;
using AndF = FormulaNode::And;
using OrF = FormulaNode::Or;
using ImpliesF = FormulaNode::Implies;
using Quant = FormulaNode::Quant;
using HetF = FormulaNode::Het;

template <class T>
const T* as(const Formula& f) {
  return std::get_if<T>(&f->node);
}

inline Formula mk_node(FormulaNode::Node n) {
  return std::make_shared<FormulaNode>(FormulaNode{std::move(n)});
}

inline Formula mk_top() { return mk_node(FormulaNode::Top{}); }
inline Formula mk_bottom() { return mk_node(FormulaNode::Bottom{}); }
inline Formula mk_atom(string rel, vector<TermPtr> args = {}) {
  return mk_node(Atomic{std::move(rel), std::move(args)});
}
inline Formula mk_eq(TermPtr a, TermPtr b) {
  return mk_node(Equal{std::move(a), std::move(b)});
}

// And()/Or() normalize to Top/Bottom; singletons collapse to the item.
inline Formula mk_and(vector<Formula> items) {
  if (items.empty()) return mk_top();
  if (items.size() == 1) return items[0];
  return mk_node(AndF{std::move(items)});
}
inline Formula mk_or(vector<Formula> items) {
  if (items.empty()) return mk_bottom();
  if (items.size() == 1) return items[0];
  return mk_node(OrF{std::move(items)});
}
inline Formula mk_implies(Formula a, Formula b) {
  return mk_node(ImpliesF{std::move(a), std::move(b)});
}
inline Formula mk_not(Formula a) { return mk_implies(std::move(a), mk_bottom()); }

// Empty quantifier blocks collapse to the body.
inline Formula mk_exists(vector<Var> vars, Formula body) {
  if (vars.empty()) return body;
  return mk_node(Quant{true, std::move(vars), std::move(body)});
}
inline Formula mk_forall(vector<Var> vars, Formula body) {
  if (vars.empty()) return body;
  return mk_node(Quant{false, std::move(vars), std::move(body)});
}
inline Formula mk_het(HetBlock block, Payoff payoff) {
  return mk_node(HetF{std::move(block), std::move(payoff)});
}

inline bool is_not(const Formula& f) {
  auto* imp = as<ImpliesF>(f);
  return imp && as<FormulaNode::Bottom>(imp->rhs);
}

// ---------------------------------------------------------------------------
// Structural equality

inline bool formula_equal(const Formula& a, const Formula& b);

inline bool payoff_equal(const Payoff& a, const Payoff& b) {
  if (a.index() != b.index()) return false;
  if (auto* ba = std::get_if<BodyPayoff>(&a))
    return formula_equal(ba->body, std::get<BodyPayoff>(b).body);
  const auto& oa = std::get<OmegaPayoff>(a);
  const auto& ob = std::get<OmegaPayoff>(b);
  if (oa.safety != ob.safety || oa.window != ob.window ||
      oa.templates.size() != ob.templates.size())
    return false;
  for (size_t i = 0; i < oa.templates.size(); ++i)
    if (!formula_equal(oa.templates[i], ob.templates[i])) return false;
  return true;
}

inline bool block_equal(const HetBlock& a, const HetBlock& b) {
  if (a.polarity != b.polarity || a.length != b.length ||
      a.schedule != b.schedule || a.bounds.size() != b.bounds.size() ||
      a.window_prefix.size() != b.window_prefix.size() ||
      a.past.size() != b.past.size())
    return false;
  for (size_t i = 0; i < a.bounds.size(); ++i)
    if (!formula_equal(a.bounds[i], b.bounds[i])) return false;
  for (size_t i = 0; i < a.window_prefix.size(); ++i)
    if (!term_equal(a.window_prefix[i], b.window_prefix[i])) return false;
  for (size_t i = 0; i < a.past.size(); ++i)
    if (!formula_equal(a.past[i], b.past[i])) return false;
  return true;
}

inline bool formula_equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = as<Atomic>(a)) {
    auto* y = as<Atomic>(b);
    if (x->rel != y->rel || x->args.size() != y->args.size()) return false;
    for (size_t i = 0; i < x->args.size(); ++i)
      if (!term_equal(x->args[i], y->args[i])) return false;
    return true;
  }
  if (auto* x = as<Equal>(a)) {
    auto* y = as<Equal>(b);
    return term_equal(x->lhs, y->lhs) && term_equal(x->rhs, y->rhs);
  }
  if (as<FormulaNode::Top>(a) || as<FormulaNode::Bottom>(a)) return true;
  if (auto* x = as<AndF>(a)) {
    auto* y = as<AndF>(b);
    if (x->items.size() != y->items.size()) return false;
    for (size_t i = 0; i < x->items.size(); ++i)
      if (!formula_equal(x->items[i], y->items[i])) return false;
    return true;
  }
  if (auto* x = as<OrF>(a)) {
    auto* y = as<OrF>(b);
    if (x->items.size() != y->items.size()) return false;
    for (size_t i = 0; i < x->items.size(); ++i)
      if (!formula_equal(x->items[i], y->items[i])) return false;
    return true;
  }
  if (auto* x = as<ImpliesF>(a)) {
    auto* y = as<ImpliesF>(b);
    return formula_equal(x->lhs, y->lhs) && formula_equal(x->rhs, y->rhs);
  }
  if (auto* x = as<Quant>(a)) {
    auto* y = as<Quant>(b);
    return x->exists == y->exists && x->vars == y->vars &&
           formula_equal(x->body, y->body);
  }
  auto* x = as<HetF>(a);
  auto* y = as<HetF>(b);
  return block_equal(x->block, y->block) && payoff_equal(x->payoff, y->payoff);
}

// ---------------------------------------------------------------------------
// Sequents and theories

struct Sequent {
  Formula antecedent;
  Formula succedent;
  vector<Var> context;  // sorted, duplicate-free
};

inline vector<Var> normalize_context(vector<Var> ctx) {
  std::sort(ctx.begin(), ctx.end());
  ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
  return ctx;
}

inline Sequent mk_sequent(Formula lhs, Formula rhs, vector<Var> ctx) {
  return Sequent{std::move(lhs), std::move(rhs), normalize_context(std::move(ctx))};
}

inline bool sequent_equal(const Sequent& a, const Sequent& b) {
  return a.context == b.context && formula_equal(a.antecedent, b.antecedent) &&
         formula_equal(a.succedent, b.succedent);
}

enum class Mode { Classical, Intuitionistic };

// The admissible payoff class for heterogeneous axioms. Safety-only admits
// every Safety spec, Clopen every Safety or Reach spec; Explicit lists the
// admitted specs (membership closes under tails, i.e. template rotations).
struct ClassC {
  enum Kind { SafetyOnly, Clopen, Explicit } kind = SafetyOnly;
  vector<OmegaPayoff> entries;  // Explicit only
};

struct NamedAxiom {
  string name;
  Sequent sequent;
};

struct Theory {
  Signature signature;
  vector<NamedAxiom> axioms;
  ClassC classc;
  Mode mode = Mode::Classical;

  const NamedAxiom* axiom(const string& name) const {
    for (auto& a : axioms)
      if (a.name == name) return &a;
    return nullptr;
  }
};

}  // namespace hetlog
