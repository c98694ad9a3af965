#pragma once

// Morleyization: the translated theory over the extended signature with
// C_phi / D_phi predicates, the model expansion interpreting them, and the
// proof back-translation that replaces them by phi / ~phi and re-checks
// against the original theory in classical mode.
//
// S is the subformula closure of the axioms plus heterogeneous tails. Tails
// carry their decided past checks, so the full tail closure is infinite at
// desk scale; it is truncated at depth window + lcm(2, period) per block and
// the heterogeneous transfer clauses are emitted for the retained depths.

#include "hetlog/proof.hpp"

namespace hetlog {

struct MorleyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MClause {
  Disjoint,    // C /\ D |- false
  Total,       // true |- C \/ D
  AtomicFwd,   // C_phi |- phi          (atomic phi)
  AtomicBwd,   // phi |- C_phi
  AxiomMap,    // C_phi |- C_psi        per axiom phi |- psi (incl. logical)
  AndD_Fwd,    // D_/\ |- \/ D          (and backwards)
  AndD_Bwd,
  OrC_Fwd,     // C_\/ |- \/ C
  OrC_Bwd,
  ImplC_Fwd,   // C_{->} |- D \/ C
  ImplC_Bwd,
  ExistsC_Fwd, // C_exists |- exists C
  ExistsC_Bwd,
  ForallD_Fwd, // D_forall |- exists D
  ForallD_Bwd,
  HetD_Fwd,    // D_(AE) |- exists x0 D_tail   (guarded under bounds)
  HetD_Bwd,
  HetC_Fwd,    // C_(EA) |- exists x0 C_tail
  HetC_Bwd,
};

struct MorleyAxiom {
  string name;
  MClause clause;
  Formula subject;        // the Sigma-formula the clause is about
  // AxiomMap provenance: how to rebuild the original one-node proof.
  optional<Rule> orig_rule;
  ProofParams orig_params;
  Sequent orig_sequent;   // over Sigma
};

struct MorleyizedTheory {
  Theory source;     // the original theory
  Theory theory;     // over the extended signature
  struct Symbol {
    Formula formula;      // phi over Sigma
    vector<Var> context;  // canonical context = argument order
    string c_name, d_name;
  };
  vector<Symbol> symbols;        // S in deterministic order
  vector<MorleyAxiom> info;      // parallel to theory.axioms

  const Symbol* by_formula(const Formula& f) const {
    for (auto& s : symbols)
      if (alpha_equal(s.formula, f)) return &s;
    return nullptr;
  }
  const Symbol* by_relation(const string& rel, bool* is_c = nullptr) const {
    for (auto& s : symbols) {
      if (s.c_name == rel) {
        if (is_c) *is_c = true;
        return &s;
      }
      if (s.d_name == rel) {
        if (is_c) *is_c = false;
        return &s;
      }
    }
    return nullptr;
  }
  const MorleyAxiom* axiom_info(const string& name) const {
    for (auto& a : info)
      if (a.name == name) return &a;
    return nullptr;
  }
};

// The coherent fragment: atoms, equality, truth values, /\, \/, exists.
inline bool is_coherent(const Formula& f) {
  if (as<Atomic>(f) || as<Equal>(f) || as<FormulaNode::Top>(f) ||
      as<FormulaNode::Bottom>(f))
    return true;
  if (auto* x = as<AndF>(f)) {
    for (auto& g : x->items)
      if (!is_coherent(g)) return false;
    return true;
  }
  if (auto* x = as<OrF>(f)) {
    for (auto& g : x->items)
      if (!is_coherent(g)) return false;
    return true;
  }
  if (auto* x = as<Quant>(f)) return x->exists && is_coherent(x->body);
  return false;
}

inline bool is_coherent(const Sequent& s) {
  return is_coherent(s.antecedent) && is_coherent(s.succedent);
}

namespace detail {

// Subformula set S: literal closure of the axioms plus heterogeneous tails
// up to depth window + lcm(2, period), plus bound formulas of omega blocks
// (the guarded heterogeneous clauses mention them).
inline vector<Formula> morley_subformulas(const Theory& t) {
  vector<Formula> s;
  auto add = [&](const Formula& f) {
    for (auto& g : s)
      if (alpha_equal(g, f)) return;
    s.push_back(f);
  };
  vector<Formula> queue;
  for (auto& ax : t.axioms) {
    subformulas(ax.sequent.antecedent, queue);
    subformulas(ax.sequent.succedent, queue);
  }
  for (auto& f : queue) add(f);
  // Heterogeneous tails (S is closed under them, truncated at one period
  // past the window) and bound formulas.
  size_t fixed = s.size();
  for (size_t i = 0; i < fixed; ++i) {
    Formula f = s[i];
    auto* h = as<HetF>(f);
    if (!h || !h->block.is_omega()) continue;
    const auto& op = std::get<OmegaPayoff>(h->payoff);
    int depth = op.window + lcm2(h->block.period());
    for (int beta = 1; beta <= depth; ++beta) add(tail_block(f, beta));
    for (auto& b : h->block.bounds) add(b);
  }
  return s;
}

inline Var fresh_named(const string& base, const string& sort,
                       const std::set<string>& used) {
  Var v{base, sort};
  int n = 0;
  while (used.count(v.name)) v.name = base + std::to_string(n++);
  return v;
}

}  // namespace detail

struct MorleyBuilder {
  const Theory& source;
  bool intuitionistic;
  MorleyizedTheory out;
  int counter = 0;

  explicit MorleyBuilder(const Theory& t, bool intuit)
      : source(t), intuitionistic(intuit) {
    out.source = t;
    out.theory.signature = t.signature;
    out.theory.classc = t.classc;
    out.theory.mode = t.mode;
  }

  const MorleyizedTheory::Symbol& symbol(const Formula& f) {
    const auto* existing = out.by_formula(f);
    if (existing) return *static_cast<const MorleyizedTheory::Symbol*>(existing);
    MorleyizedTheory::Symbol sym;
    sym.formula = f;
    sym.context = canonical_context(f);
    string h = formula_hash_hex(f);
    sym.c_name = "C#" + h;
    sym.d_name = "D#" + h;
    vector<string> sorts;
    for (auto& v : sym.context) sorts.push_back(v.sort);
    out.theory.signature.relations.push_back({sym.c_name, sorts});
    out.theory.signature.relations.push_back({sym.d_name, sorts});
    out.symbols.push_back(std::move(sym));
    return out.symbols.back();
  }

  Formula c_atom(const Formula& f) {
    const auto& sym = symbol(f);
    vector<TermPtr> args;
    for (auto& v : sym.context) args.push_back(mk_var(v));
    return mk_atom(sym.c_name, std::move(args));
  }
  Formula d_atom(const Formula& f) {
    const auto& sym = symbol(f);
    vector<TermPtr> args;
    for (auto& v : sym.context) args.push_back(mk_var(v));
    return mk_atom(sym.d_name, std::move(args));
  }

  void emit(MClause clause, const Formula& subject, Formula lhs, Formula rhs,
            vector<Var> ctx, optional<Rule> orig_rule = {},
            ProofParams orig_params = {}, Sequent orig_sequent = {}) {
    MorleyAxiom info;
    info.name = "m" + std::to_string(counter++);
    info.clause = clause;
    info.subject = subject;
    info.orig_rule = orig_rule;
    info.orig_params = std::move(orig_params);
    info.orig_sequent = std::move(orig_sequent);
    Sequent seq = mk_sequent(std::move(lhs), std::move(rhs), std::move(ctx));
    if (!is_coherent(seq))
      throw MorleyError("emitted axiom leaves the coherent fragment: " +
                        print_sequent(seq));
    out.theory.axioms.push_back({info.name, std::move(seq)});
    out.info.push_back(std::move(info));
  }

  bool is_het_omega(const Formula& f) {
    auto* h = as<HetF>(f);
    return h && h->block.is_omega();
  }

  void partition_axioms(const Formula& f) {
    auto ctx = canonical_context(f);
    emit(MClause::Disjoint, f, mk_and({c_atom(f), d_atom(f)}), mk_bottom(), ctx);
    emit(MClause::Total, f, mk_top(), mk_or({c_atom(f), d_atom(f)}), ctx);
  }

  void atomic_axioms(const Formula& f) {
    auto ctx = canonical_context(f);
    emit(MClause::AtomicFwd, f, c_atom(f), f, ctx);
    emit(MClause::AtomicBwd, f, f, c_atom(f), ctx);
  }

  void axiom_map(const Sequent& sq, optional<Rule> rule, ProofParams params) {
    emit(MClause::AxiomMap, sq.antecedent, c_atom(sq.antecedent),
         c_atom(sq.succedent), sq.context, rule, std::move(params), sq);
  }

  void connective_axioms(const Formula& f) {
    auto ctx = canonical_context(f);
    if (auto* x = as<AndF>(f)) {
      vector<Formula> ds;
      for (auto& g : x->items) ds.push_back(d_atom(g));
      emit(MClause::AndD_Fwd, f, d_atom(f), mk_or(ds), ctx);
      emit(MClause::AndD_Bwd, f, mk_or(ds), d_atom(f), ctx);
    } else if (as<FormulaNode::Top>(f)) {
      // the empty conjunction: D_T -||- empty disjunction
      emit(MClause::AndD_Fwd, f, d_atom(f), mk_bottom(), ctx);
      emit(MClause::AndD_Bwd, f, mk_bottom(), d_atom(f), ctx);
    } else if (auto* x = as<OrF>(f)) {
      vector<Formula> cs;
      for (auto& g : x->items) cs.push_back(c_atom(g));
      emit(MClause::OrC_Fwd, f, c_atom(f), mk_or(cs), ctx);
      emit(MClause::OrC_Bwd, f, mk_or(cs), c_atom(f), ctx);
    } else if (as<FormulaNode::Bottom>(f)) {
      emit(MClause::OrC_Fwd, f, c_atom(f), mk_bottom(), ctx);
      emit(MClause::OrC_Bwd, f, mk_bottom(), c_atom(f), ctx);
    } else if (auto* x = as<ImpliesF>(f)) {
      if (intuitionistic) return;  // the 3.2 list has no clause for ->
      Formula rhs = mk_or({d_atom(x->lhs), c_atom(x->rhs)});
      emit(MClause::ImplC_Fwd, f, c_atom(f), rhs, ctx);
      emit(MClause::ImplC_Bwd, f, rhs, c_atom(f), ctx);
    } else if (auto* x = as<Quant>(f)) {
      if (x->exists) {
        Formula rhs = mk_exists(x->vars, c_atom(x->body));
        emit(MClause::ExistsC_Fwd, f, c_atom(f), rhs, ctx);
        emit(MClause::ExistsC_Bwd, f, rhs, c_atom(f), ctx);
      } else {
        if (intuitionistic) return;  // no clause for forall either
        Formula rhs = mk_exists(x->vars, d_atom(x->body));
        emit(MClause::ForallD_Fwd, f, d_atom(f), rhs, ctx);
        emit(MClause::ForallD_Bwd, f, rhs, d_atom(f), ctx);
      }
    }
  }

  // (x)/(xi): unfold the first move of an omega block whose tail stays in S;
  // bounds guard the move via the C-predicate of the bound formula.
  void heterogeneous_axioms(const Formula& f, const vector<Formula>& s_set) {
    auto* h = as<HetF>(f);
    auto ctx = canonical_context(f);
    if (!payoff_in_class(std::get<OmegaPayoff>(h->payoff), source.classc))
      throw MorleyError("heterogeneous formula outside class C: " + print_formula(f));
    Formula tail = tail_block(f, 1);
    bool tail_in_s = false;
    for (auto& g : s_set) tail_in_s = tail_in_s || alpha_equal(g, tail);
    if (!tail_in_s) return;  // truncation point of the tail closure
    Var x0 = h->block.schedule[0][0];
    bool ae = h->block.polarity == Polarity::AE;
    Formula inner = ae ? d_atom(tail) : c_atom(tail);
    if (!h->block.bounds.empty())
      inner = mk_and({c_atom(h->block.bounds[0]), inner});
    Formula rhs = mk_exists({x0}, inner);
    Formula lhs = ae ? d_atom(f) : c_atom(f);
    emit(ae ? MClause::HetD_Fwd : MClause::HetC_Fwd, f, lhs, rhs, ctx);
    emit(ae ? MClause::HetD_Bwd : MClause::HetC_Bwd, f, rhs, lhs, ctx);
  }

  // Logical axiom instances over S for the axiom-map clause: only those
  // whose both sides already lie in S are emitted, which keeps the output
  // finite (identity instances are trivial and skipped).
  void logical_axioms_over_s(const vector<Formula>& s_set) {
    auto in_s = [&](const Formula& f) {
      for (auto& g : s_set)
        if (alpha_equal(g, f)) return true;
      return false;
    };
    for (auto& f : s_set) {
      if (auto* x = as<AndF>(f)) {
        for (size_t j = 0; j < x->items.size(); ++j) {
          ProofParams p;
          p.index = static_cast<int>(j);
          axiom_map(mk_sequent(f, x->items[j], canonical_context(f)), Rule::ConjAx, p);
        }
      } else if (auto* x = as<OrF>(f)) {
        for (size_t j = 0; j < x->items.size(); ++j) {
          ProofParams p;
          p.index = static_cast<int>(j);
          axiom_map(mk_sequent(x->items[j], f, canonical_context(f)), Rule::DisjAx, p);
        }
      } else if (is_het_omega(f)) {
        auto* h = as<HetF>(f);
        if (!payoff_in_class(std::get<OmegaPayoff>(h->payoff), source.classc)) continue;
        try {
          Sequent unfold = hetax_unfold_instance(
              f, h->block.polarity == Polarity::AE);
          if (in_s(unfold.succedent))
            axiom_map(unfold,
                      h->block.polarity == Polarity::AE ? Rule::HetAx1 : Rule::HetAx2,
                      {});
          Sequent det = detax_instance(f);
          if (in_s(det.succedent) && in_s(det.antecedent))
            axiom_map(det, Rule::DetAx, {});
        } catch (const KernelError&) {
        }
      }
    }
  }

  MorleyizedTheory build() {
    vector<Formula> s_set = detail::morley_subformulas(source);
    for (auto& f : s_set) symbol(f);  // stable symbol order

    for (auto& f : s_set) {
      bool het = is_het_omega(f);
      if (!intuitionistic || het) partition_axioms(f);
      if (as<Atomic>(f) || as<Equal>(f)) atomic_axioms(f);
    }
    for (auto& ax : source.axioms) {
      ProofParams p;
      p.name = ax.name;
      // Both sides of a theory axiom are in S by construction.
      axiom_map(ax.sequent, Rule::TheoryAx, std::move(p));
    }
    logical_axioms_over_s(s_set);
    for (auto& f : s_set)
      if (!is_het_omega(f)) connective_axioms(f);
    for (auto& f : s_set)
      if (is_het_omega(f)) heterogeneous_axioms(f, s_set);
    return std::move(out);
  }
};

inline MorleyizedTheory morleyize_classical(const Theory& t) {
  if (t.mode != Mode::Classical)
    throw MorleyError("morleyize_classical requires a classical theory");
  return MorleyBuilder(t, false).build();
}

inline MorleyizedTheory morleyize_intuitionistic(const Theory& t) {
  if (t.mode != Mode::Intuitionistic)
    throw MorleyError("morleyize_intuitionistic requires an intuitionistic theory");
  return MorleyBuilder(t, true).build();
}

// ---------------------------------------------------------------------------
// Model expansion

struct ExpansionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Interprets C_phi as the extension of phi and D_phi as that of ~phi
// (classical complement on finite structures). The structure must be
// well-determined for the source class; every translated axiom is verified
// to hold in the result.
inline Structure expand_model(const Structure& m, const MorleyizedTheory& mt,
                              int max_positions = kDefaultMaxPositions) {
  auto wd = check_well_determined(m, mt.source, max_positions);
  if (!wd.well_determined) {
    string detail = "structure is not well-determined for class C";
    for (auto& p : wd.preservation)
      if (!p.pass) detail += "; preservation fails for " + p.game;
    throw ExpansionError(detail);
  }
  Structure out = m;
  out.signature = mt.theory.signature;
  FormulaEval ev = classical_eval(m, max_positions);
  for (auto& sym : mt.symbols) {
    std::set<vector<int>> c_table, d_table;
    for_each_assignment(m, sym.context, [&](const Assignment& a) {
      vector<int> row;
      for (auto& v : sym.context) row.push_back(a.at(v.name));
      if (ev(sym.formula, a))
        c_table.insert(row);
      else
        d_table.insert(row);
    });
    out.relations[sym.c_name] = std::move(c_table);
    out.relations[sym.d_name] = std::move(d_table);
  }
  FormulaEval eo = classical_eval(out, max_positions);
  for (auto& ax : mt.theory.axioms) {
    bool holds = true;
    for_each_assignment(out, ax.sequent.context, [&](const Assignment& a) {
      if (eo(ax.sequent.antecedent, a) && !eo(ax.sequent.succedent, a)) holds = false;
    });
    if (!holds)
      throw ExpansionError("axiom " + ax.name + " fails in the expansion: " +
                           print_sequent(ax.sequent));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proof back-translation

struct BackTranslateError : std::runtime_error {
  vector<int> path;
  BackTranslateError(const string& msg, vector<int> p)
      : std::runtime_error(msg), path(std::move(p)) {}
};

namespace detail {

// phi for C-atoms, the canonical negation for D-atoms (the dual block for
// heterogeneous formulas, phi -> false otherwise).
inline Formula back_formula(const Formula& f, const MorleyizedTheory& mt);

inline Formula back_negation(const Formula& phi) {
  if (auto* h = as<HetF>(phi))
    if (h->block.is_omega()) return dual_het(*h);
  return mk_not(phi);
}

inline Formula back_formula(const Formula& f, const MorleyizedTheory& mt) {
  if (auto* x = as<Atomic>(f)) {
    bool is_c = false;
    const auto* sym = mt.by_relation(x->rel, &is_c);
    if (!sym) return f;
    Formula base = is_c ? sym->formula : back_negation(sym->formula);
    Subst sigma;
    for (size_t i = 0; i < sym->context.size(); ++i)
      sigma[sym->context[i]] = x->args[i];
    return substitute(base, sigma);
  }
  if (auto* x = as<AndF>(f)) {
    vector<Formula> items;
    for (auto& g : x->items) items.push_back(back_formula(g, mt));
    return mk_and(std::move(items));
  }
  if (auto* x = as<OrF>(f)) {
    vector<Formula> items;
    for (auto& g : x->items) items.push_back(back_formula(g, mt));
    return mk_or(std::move(items));
  }
  if (auto* x = as<ImpliesF>(f))
    return mk_implies(back_formula(x->lhs, mt), back_formula(x->rhs, mt));
  if (auto* x = as<Quant>(f)) {
    Formula body = back_formula(x->body, mt);
    return x->exists ? mk_exists(x->vars, body) : mk_forall(x->vars, body);
  }
  return f;  // equality, truth values, het (no C/D inside payoffs)
}

inline Sequent back_sequent(const Sequent& s, const MorleyizedTheory& mt) {
  return mk_sequent(back_formula(s.antecedent, mt), back_formula(s.succedent, mt),
                    s.context);
}

// phi /\ ~phi |- bottom, derived: commute the conjunction, then apply the
// implication against the conjuncts.
inline ProofPtr derive_noncontradiction(const Formula& phi, const vector<Var>& ctx) {
  Formula nphi = mk_not(phi);
  Formula both = mk_and({phi, nphi});
  Formula swapped = mk_and({nphi, phi});
  ProofPtr id_n = mk_proof(Rule::Identity, mk_sequent(nphi, nphi, ctx));
  ProofPtr elim = mk_proof(Rule::ImplElim, mk_sequent(swapped, mk_bottom(), ctx), {},
                           {id_n});
  ProofParams p1, p0;
  p1.index = 1;
  p0.index = 0;
  ProofPtr proj_n = mk_proof(Rule::ConjAx, mk_sequent(both, nphi, ctx), p1);
  ProofPtr proj_p = mk_proof(Rule::ConjAx, mk_sequent(both, phi, ctx), p0);
  ProofPtr pair = mk_proof(Rule::ConjRule, mk_sequent(both, swapped, ctx), {},
                           {proj_n, proj_p});
  return mk_proof(Rule::Cut, mk_sequent(both, mk_bottom(), ctx), {}, {pair, elim});
}

inline ProofPtr back_leaf(const MorleyAxiom& info, const Sequent& target,
                          const vector<int>& path) {
  auto unsupported = [&](const string& why) -> ProofPtr {
    throw BackTranslateError("axiom " + info.name + ": " + why, path);
  };
  const Formula& phi = info.subject;
  bool het = [&] {
    auto* h = as<HetF>(phi);
    return h && h->block.is_omega();
  }();
  switch (info.clause) {
    case MClause::Total:
      if (het) return mk_proof(Rule::DetAx, target);
      return mk_proof(Rule::ExcludedMiddle, target);
    case MClause::Disjoint:
      if (het) return unsupported("disjointness of dual blocks is not a single axiom");
      return derive_noncontradiction(phi, target.context);
    case MClause::AtomicFwd:
    case MClause::AtomicBwd:
      return mk_proof(Rule::Identity, target);
    case MClause::AxiomMap: {
      if (!info.orig_rule) return unsupported("no provenance for the axiom map");
      ProofPtr node = mk_proof(*info.orig_rule, target, info.orig_params);
      return node;
    }
    case MClause::OrC_Fwd:
    case MClause::OrC_Bwd:
    case MClause::ExistsC_Fwd:
    case MClause::ExistsC_Bwd:
      // Both sides translate to the same Sigma-formula.
      return mk_proof(Rule::Identity, target);
    case MClause::HetD_Fwd:
    case MClause::HetC_Fwd:
      // D_(AE)phi |- exists x0 D_tail becomes HetAx2 on the dual block
      // (C_(EA) directly on the block); requires the complement payoff to
      // stay in class C, which clopen classes guarantee.
      return mk_proof(Rule::HetAx2, target);
    case MClause::HetD_Bwd:
    case MClause::HetC_Bwd:
      return unsupported("converse heterogeneous unfolding is not a single axiom");
    case MClause::AndD_Fwd:
    case MClause::AndD_Bwd:
    case MClause::ImplC_Fwd:
    case MClause::ImplC_Bwd:
    case MClause::ForallD_Fwd:
    case MClause::ForallD_Bwd:
      return unsupported("classical De Morgan shape; derivation not emitted");
  }
  return unsupported("unhandled clause");
}

}  // namespace detail

// Replaces every C_phi / D_phi occurrence, rebuilds leaves from their
// recorded provenance, and re-checks the result against the original theory
// in classical mode.
inline ProofPtr back_translate_proof(const ProofPtr& proof, const MorleyizedTheory& mt) {
  vector<int> path;
  std::function<ProofPtr(const ProofPtr&)> go = [&](const ProofPtr& n) -> ProofPtr {
    vector<ProofPtr> premises;
    for (size_t i = 0; i < n->premises.size(); ++i) {
      path.push_back(static_cast<int>(i));
      premises.push_back(go(n->premises[i]));
      path.pop_back();
    }
    Sequent target = detail::back_sequent(n->conclusion, mt);
    if (n->rule == Rule::TheoryAx) {
      const MorleyAxiom* info = n->params.name ? mt.axiom_info(*n->params.name) : nullptr;
      if (info) return detail::back_leaf(*info, target, path);
      // A leaf citing a source-theory axiom kept verbatim.
      return mk_proof(Rule::TheoryAx, target, n->params, std::move(premises));
    }
    ProofParams params = n->params;
    if (params.phi) params.phi = detail::back_formula(params.phi, mt);
    if (params.tt)
      for (auto& [k, v] : params.tt->nodes)
        v.second = detail::back_formula(v.second, mt);
    if (params.pres) params.pres->block = detail::back_formula(params.pres->block, mt);
    return mk_proof(n->rule, std::move(target), std::move(params), std::move(premises));
  };
  ProofPtr translated = go(proof);
  Theory classical = mt.source;
  classical.mode = Mode::Classical;
  CheckResult check = check_proof(translated, classical);
  if (!check.ok)
    throw BackTranslateError("back-translated proof fails re-check: " + check.message,
                             check.path);
  return translated;
}

// ---------------------------------------------------------------------------
// Sidecar table: C/D symbol names to pretty-printed formulas.

inline vector<std::pair<string, string>> morley_symbol_table(const MorleyizedTheory& mt) {
  vector<std::pair<string, string>> rows;
  for (auto& s : mt.symbols) {
    rows.emplace_back(s.c_name, print_formula(s.formula));
    rows.emplace_back(s.d_name, "not " + print_formula(s.formula));
  }
  return rows;
}

}  // namespace hetlog
