#pragma once

// Tarskian evaluation of het-free connectives over finite structures, plus
// the recursive finite-game evaluator used to cross-check desugared finite
// heterogeneous blocks. Heterogeneous subformulas are delegated through a
// handler so the same code serves classical evaluation and Kripke forcing.

#include <functional>

#include "hetlog/structure.hpp"
#include "hetlog/syntax.hpp"

namespace hetlog {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using HetHandler = std::function<bool(const Formula&, const Assignment&)>;
using FormulaEval = std::function<bool(const Formula&, const Assignment&)>;

inline int eval_term(const Structure& m, const TermPtr& t, const Assignment& a) {
  if (t->is_var()) {
    auto it = a.find(t->var().name);
    if (it == a.end())
      throw EvalError("missing assignment for variable " + t->var().name);
    return it->second;
  }
  vector<int> args;
  args.reserve(t->app().args.size());
  for (auto& s : t->app().args) args.push_back(eval_term(m, s, a));
  auto it = m.functions.find(t->app().fn);
  if (it == m.functions.end()) throw EvalError("no table for function " + t->app().fn);
  auto jt = it->second.find(args);
  if (jt == it->second.end()) throw EvalError("function " + t->app().fn + " not total");
  return jt->second;
}

// Standard clauses; Implies is evaluated classically. `het` handles Het
// nodes (the game-semantics module supplies the classical handler).
inline bool eval_tarski(const Structure& m, const Formula& f, const Assignment& a,
                        const HetHandler& het = nullptr) {
  if (as<FormulaNode::Top>(f)) return true;
  if (as<FormulaNode::Bottom>(f)) return false;
  if (auto* x = as<Atomic>(f)) {
    vector<int> args;
    args.reserve(x->args.size());
    for (auto& t : x->args) args.push_back(eval_term(m, t, a));
    return m.holds(x->rel, args);
  }
  if (auto* x = as<Equal>(f))
    return eval_term(m, x->lhs, a) == eval_term(m, x->rhs, a);
  if (auto* x = as<AndF>(f)) {
    for (auto& g : x->items)
      if (!eval_tarski(m, g, a, het)) return false;
    return true;
  }
  if (auto* x = as<OrF>(f)) {
    for (auto& g : x->items)
      if (eval_tarski(m, g, a, het)) return true;
    return false;
  }
  if (auto* x = as<ImpliesF>(f))
    return !eval_tarski(m, x->lhs, a, het) || eval_tarski(m, x->rhs, a, het);
  if (auto* x = as<Quant>(f)) {
    bool found_counter = false;
    bool found_witness = false;
    for_each_assignment(m, x->vars,
                        [&](const Assignment& b) {
                          bool v = eval_tarski(m, x->body, b, het);
                          found_witness = found_witness || v;
                          found_counter = found_counter || !v;
                        },
                        a);
    return x->exists ? found_witness : !found_counter;
  }
  if (!het) throw EvalError("heterogeneous formula needs a game evaluator");
  return het(f, a);
}

// Direct recursive evaluation of a finite heterogeneous block as a game:
// the mover at each stage picks a bound-satisfying tuple, a universal mover
// with no legal tuple loses its obligation (the block holds), an existential
// one loses. `leaf` evaluates bounds and the payoff body.
inline bool eval_finite_het_game(const Structure& m, const HetF& h,
                                 const Assignment& a, const FormulaEval& leaf) {
  const HetBlock& blk = h.block;
  int n = *blk.length;
  std::function<bool(int, Assignment&)> stage = [&](int i, Assignment& asg) -> bool {
    if (i == n) return leaf(std::get<BodyPayoff>(h.payoff).body, asg);
    bool universal = (i % 2 == 0) == (blk.polarity == Polarity::AE);
    bool any_legal = false;
    bool exists_win = false;
    bool forall_counter = false;
    for_each_assignment(
        m, blk.schedule[static_cast<size_t>(i)],
        [&](const Assignment& b) {
          if (!blk.bounds.empty() &&
              !leaf(blk.bounds[static_cast<size_t>(i)], b))
            return;
          any_legal = true;
          Assignment next = b;
          bool v = stage(i + 1, next);
          exists_win = exists_win || v;
          forall_counter = forall_counter || !v;
        },
        asg);
    if (!any_legal) return universal;  // -> semantics excuses, /\ semantics obliges
    return universal ? !forall_counter : exists_win;
  };
  Assignment asg = a;
  return stage(0, asg);
}

}  // namespace hetlog
