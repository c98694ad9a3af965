#include <catch2/catch_amalgamated.hpp>

#include "hetlog/morley.hpp"
#include "support/fixtures.hpp"

using namespace hetlog;

namespace {

Theory prop_theory() {
  return parse_theory(
      "sort s;\nrel p();\nrel q();\nconst c0: s;\n"
      "axiom imp: p() |- q() [ctx];\nclassC safety;\nmode classical;\n");
}

Theory copycat_theory(const string& classc = "safety") {
  return parse_theory(
      "sort s;\nrel P(s);\nrel E(s, s);\nconst zero: s;\nconst one: s;\n"
      "axiom cc: true |- hetAE { len: omega; sched: [[x:s], [y:s]]; "
      "payoff: safety(2)[true, (v0 = v1)] } [ctx];\nclassC " + classc +
      ";\nmode classical;\n");
}

Theory reach_theory() {
  return parse_theory(
      "sort s;\nrel P(s);\nrel E(s, s);\nconst zero: s;\nconst one: s;\n"
      "axiom deg: true |- hetAE { len: omega; sched: [[x:s]]; "
      "payoff: reach(1)[(v0 = one)] } [ctx];\nclassC clopen;\nmode classical;\n");
}

bool has_axiom(const MorleyizedTheory& mt, const string& text) {
  for (auto& ax : mt.theory.axioms)
    if (print_sequent(ax.sequent) == text) return true;
  return false;
}

}  // namespace

TEST_CASE("propositional morleyization emits the core clauses", "[morley]") {
  Theory t = prop_theory();
  MorleyizedTheory mt = morleyize_classical(t);
  const auto* p_sym = mt.by_formula(parse_formula("p()", t.signature));
  const auto* q_sym = mt.by_formula(parse_formula("q()", t.signature));
  REQUIRE(p_sym);
  REQUIRE(q_sym);
  string cp = p_sym->c_name, dp = p_sym->d_name, cq = q_sym->c_name;
  CHECK(has_axiom(mt, "and(" + cp + "(), " + dp + "()) |- false [ctx]"));
  CHECK(has_axiom(mt, "true |- or(" + cp + "(), " + dp + "()) [ctx]"));
  CHECK(has_axiom(mt, cp + "() |- p() [ctx]"));
  CHECK(has_axiom(mt, "p() |- " + cp + "() [ctx]"));
  CHECK(has_axiom(mt, cp + "() |- " + cq + "() [ctx]"));
  SECTION("every emitted axiom passes the coherent-fragment linter") {
    for (auto& ax : mt.theory.axioms) {
      CAPTURE(print_sequent(ax.sequent));
      CHECK(is_coherent(ax.sequent));
    }
  }
}

TEST_CASE("connective clauses", "[morley]") {
  Theory t = parse_theory(
      "sort s;\nrel p();\nrel q();\nconst c0: s;\nrel R(s);\n"
      "axiom a1: and(p(), q()) |- or(p(), q()) [ctx];\n"
      "axiom a2: forall [y:s] R(y) |- exists [y:s] R(y) [ctx];\n"
      "axiom a3: implies(p(), q()) |- true [ctx];\n"
      "classC safety;\nmode classical;\n");
  MorleyizedTheory mt = morleyize_classical(t);
  auto sym = [&](const string& text) {
    const auto* s =
        mt.by_formula(parse_formula(text, t.signature, {{"y", "s"}}));
    REQUIRE(s != nullptr);
    return s;
  };
  auto conj = sym("and(p(), q())");
  auto p = sym("p()");
  auto q = sym("q()");
  // D_/\ -||- \/ D
  CHECK(has_axiom(mt, conj->d_name + "() |- or(" + p->d_name + "(), " + q->d_name +
                          "()) [ctx]"));
  CHECK(has_axiom(mt, "or(" + p->d_name + "(), " + q->d_name + "()) |- " +
                          conj->d_name + "() [ctx]"));
  // C_\/ -||- \/ C
  auto disj = sym("or(p(), q())");
  CHECK(has_axiom(mt, disj->c_name + "() |- or(" + p->c_name + "(), " + q->c_name +
                          "()) [ctx]"));
  // D_forall -||- exists D
  auto fa = sym("forall [y:s] R(y)");
  auto r = sym("R(y)");
  CHECK(has_axiom(mt, fa->d_name + "() |- exists [y:s] " + r->d_name + "(y) [ctx]"));
  // C_exists -||- exists C
  auto ex = sym("exists [y:s] R(y)");
  CHECK(has_axiom(mt, ex->c_name + "() |- exists [y:s] " + r->c_name + "(y) [ctx]"));
  // C_{->} -||- D \/ C
  auto imp = sym("implies(p(), q())");
  CHECK(has_axiom(mt, imp->c_name + "() |- or(" + p->d_name + "(), " + q->c_name +
                          "()) [ctx]"));
  // Logical conjunction/disjunction axioms over S appear as C-maps.
  CHECK(has_axiom(mt, conj->c_name + "() |- " + p->c_name + "() [ctx]"));
  CHECK(has_axiom(mt, p->c_name + "() |- " + disj->c_name + "() [ctx]"));
}

TEST_CASE("heterogeneous clauses unfold the first move", "[morley]") {
  Theory t = copycat_theory();
  MorleyizedTheory mt = morleyize_classical(t);
  Formula cc = fixtures::copycat(t.signature);
  const auto* sym = mt.by_formula(cc);
  REQUIRE(sym);
  Formula t1 = tail_block(cc, 1);
  const auto* tsym = mt.by_formula(t1);
  REQUIRE(tsym);
  CHECK(has_axiom(mt, sym->d_name + "() |- exists [x:s] " + tsym->d_name +
                          "(x) [ctx]"));
  CHECK(has_axiom(mt, "exists [x:s] " + tsym->d_name + "(x) |- " + sym->d_name +
                          "() [ctx]"));
  SECTION("tails are closed into S up to the truncation depth") {
    CHECK(mt.by_formula(tail_block(cc, 2)));
    CHECK(mt.by_formula(tail_block(cc, 3)));
  }
  SECTION("EA blocks get C-clauses") {
    Theory ea = parse_theory(
        "sort s;\nconst zero: s;\n"
        "axiom e: true |- hetEA { len: omega; sched: [[x:s]]; "
        "payoff: safety(1)[(v0 = zero)] } [ctx];\nclassC safety;\nmode classical;\n");
    MorleyizedTheory emt = morleyize_classical(ea);
    Formula block = parse_formula(
        "hetEA { len: omega; sched: [[x:s]]; payoff: safety(1)[(v0 = zero)] }",
        ea.signature);
    const auto* bs = emt.by_formula(block);
    const auto* ts = emt.by_formula(tail_block(block, 1));
    REQUIRE(bs);
    REQUIRE(ts);
    CHECK(has_axiom(emt, bs->c_name + "() |- exists [x:s] " + ts->c_name + "(x) [ctx]"));
  }
}

TEST_CASE("intuitionistic morleyization restricts the clause list", "[morley]") {
  Theory t = parse_theory(
      "sort s;\nrel p();\nrel q();\nconst zero: s;\n"
      "axiom a1: and(p(), q()) |- p() [ctx];\n"
      "axiom cc: true |- hetAE { len: omega; sched: [[x:s], [y:s]]; "
      "payoff: safety(2)[true, (v0 = v1)] } [ctx];\n"
      "classC safety;\nmode intuitionistic;\n");
  MorleyizedTheory mt = morleyize_intuitionistic(t);
  Formula cc = fixtures::copycat(t.signature);
  const auto* hsym = mt.by_formula(cc);
  REQUIRE(hsym);
  // Partition axioms only for heterogeneous formulas.
  CHECK(has_axiom(mt, "true |- or(" + hsym->c_name + "(), " + hsym->d_name + "()) [ctx]"));
  CHECK(has_axiom(mt, "and(" + hsym->c_name + "(), " + hsym->d_name + "()) |- false [ctx]"));
  const auto* psym = mt.by_formula(parse_formula("p()", t.signature));
  REQUIRE(psym);
  for (auto& ax : mt.theory.axioms) {
    string s = print_sequent(ax.sequent);
    CHECK(s != "true |- or(" + psym->c_name + "(), " + psym->d_name + "()) [ctx]");
  }
  // Atomic clause still present.
  CHECK(has_axiom(mt, psym->c_name + "() |- p() [ctx]"));
  // No clauses for -> or forall can appear: everything stays coherent.
  for (auto& ax : mt.theory.axioms) CHECK(is_coherent(ax.sequent));
}

TEST_CASE("model expansion and the round trip", "[morley]") {
  Theory t = copycat_theory();
  MorleyizedTheory mt = morleyize_classical(t);
  for (int n = 1; n <= 3; ++n) {
    auto m = fixtures::chain_structure(n);
    Structure em = expand_model(m, mt);
    CHECK(validate_structure(em).empty());
    auto ev = classical_eval(m);
    auto eo = classical_eval(em);
    for (auto& sym : mt.symbols) {
      for_each_assignment(m, sym.context, [&](const Assignment& a) {
        vector<TermPtr> args;
        for (auto& v : sym.context) args.push_back(mk_var(v));
        bool direct = ev(sym.formula, a);
        CHECK(direct == eo(mk_atom(sym.c_name, args), a));
        CHECK(!direct == eo(mk_atom(sym.d_name, args), a));
      });
      // Partition as a direct table check.
      size_t total = 1;
      for (auto& v : sym.context)
        total *= static_cast<size_t>(m.carrier_size(v.sort));
      CHECK(em.relations.at(sym.c_name).size() + em.relations.at(sym.d_name).size() ==
            total);
    }
  }
}

TEST_CASE("expansion rejects structures that are not well-determined", "[morley]") {
  Theory t = reach_theory();
  MorleyizedTheory mt = morleyize_classical(t);
  auto m2 = fixtures::chain_structure(2);
  CHECK_THROWS_AS(expand_model(m2, mt), ExpansionError);
  auto m1 = fixtures::chain_structure(1);
  Structure em = expand_model(m1, mt);  // singletons are well-determined
  CHECK(validate_structure(em).empty());
}

TEST_CASE("back translation of bundled shapes", "[morley]") {
  Theory t = prop_theory();
  MorleyizedTheory mt = morleyize_classical(t);
  auto named = [&](MClause c, const Formula& subj) -> const NamedAxiom* {
    for (size_t i = 0; i < mt.info.size(); ++i)
      if (mt.info[i].clause == c && alpha_equal(mt.info[i].subject, subj))
        return &mt.theory.axioms[i];
    return nullptr;
  };
  Formula p = parse_formula("p()", t.signature);

  SECTION("identity over the extended signature") {
    const auto* psym = mt.by_formula(p);
    Formula cp = mk_atom(psym->c_name);
    ProofPtr id = mk_proof(Rule::Identity, mk_sequent(cp, cp, {}));
    REQUIRE(check_proof(id, mt.theory).ok);
    ProofPtr back = back_translate_proof(id, mt);
    CHECK(print_sequent(back->conclusion) == "p() |- p() [ctx]");
  }
  SECTION("partition axiom becomes excluded middle") {
    const auto* total = named(MClause::Total, p);
    REQUIRE(total);
    ProofPtr leaf = mk_proof(Rule::TheoryAx, total->sequent,
                             ProofParams{.name = total->name});
    REQUIRE(check_proof(leaf, mt.theory).ok);
    ProofPtr back = back_translate_proof(leaf, mt);
    CHECK(back->rule == Rule::ExcludedMiddle);
    CHECK(print_sequent(back->conclusion) == "true |- or(p(), not(p())) [ctx]");
  }
  SECTION("disjointness derives noncontradiction") {
    const auto* dis = named(MClause::Disjoint, p);
    REQUIRE(dis);
    ProofPtr leaf = mk_proof(Rule::TheoryAx, dis->sequent,
                             ProofParams{.name = dis->name});
    ProofPtr back = back_translate_proof(leaf, mt);
    CHECK(print_sequent(back->conclusion) == "and(p(), not(p())) |- false [ctx]");
  }
  SECTION("axiom map composed under cut returns the theory proof") {
    Formula q = parse_formula("q()", t.signature);
    const auto* psym = mt.by_formula(p);
    const auto* qsym = mt.by_formula(q);
    const auto* amap = [&]() -> const NamedAxiom* {
      for (size_t i = 0; i < mt.info.size(); ++i)
        if (mt.info[i].clause == MClause::AxiomMap) return &mt.theory.axioms[i];
      return nullptr;
    }();
    REQUIRE(amap);
    Formula cp = mk_atom(psym->c_name);
    Formula cq = mk_atom(qsym->c_name);
    ProofPtr id = mk_proof(Rule::Identity, mk_sequent(cp, cp, {}));
    ProofPtr ax = mk_proof(Rule::TheoryAx, amap->sequent, ProofParams{.name = amap->name});
    ProofPtr cut = mk_proof(Rule::Cut, mk_sequent(cp, cq, {}), {}, {id, ax});
    REQUIRE(check_proof(cut, mt.theory).ok);
    ProofPtr back = back_translate_proof(cut, mt);
    CHECK(back->rule == Rule::Cut);
    CHECK(print_sequent(back->conclusion) == "p() |- q() [ctx]");
  }
  SECTION("heterogeneous transfer clause maps to hetax2") {
    Theory ct = copycat_theory("clopen");
    MorleyizedTheory cmt = morleyize_classical(ct);
    Formula cc = fixtures::copycat(ct.signature);
    const NamedAxiom* fwd = nullptr;
    for (size_t i = 0; i < cmt.info.size(); ++i)
      if (cmt.info[i].clause == MClause::HetD_Fwd &&
          alpha_equal(cmt.info[i].subject, cc))
        fwd = &cmt.theory.axioms[i];
    REQUIRE(fwd);
    ProofPtr leaf = mk_proof(Rule::TheoryAx, fwd->sequent, ProofParams{.name = fwd->name});
    REQUIRE(check_proof(leaf, cmt.theory).ok);
    ProofPtr back = back_translate_proof(leaf, cmt);
    CHECK(back->rule == Rule::HetAx2);
  }
  SECTION("unsupported converse direction errors with the node path") {
    Theory ct = copycat_theory("clopen");
    MorleyizedTheory cmt = morleyize_classical(ct);
    const NamedAxiom* bwd = nullptr;
    for (size_t i = 0; i < cmt.info.size(); ++i)
      if (cmt.info[i].clause == MClause::HetD_Bwd) bwd = &cmt.theory.axioms[i];
    REQUIRE(bwd);
    ProofPtr leaf = mk_proof(Rule::TheoryAx, bwd->sequent, ProofParams{.name = bwd->name});
    CHECK_THROWS_AS(back_translate_proof(leaf, cmt), BackTranslateError);
  }
}

TEST_CASE("morleyization rejects payoffs outside the class", "[morley]") {
  Theory t = parse_theory(
      "sort s;\nconst one: s;\n"
      "axiom deg: true |- hetAE { len: omega; sched: [[x:s]]; "
      "payoff: reach(1)[(v0 = one)] } [ctx];\nclassC safety;\nmode classical;\n");
  CHECK_THROWS_AS(morleyize_classical(t), MorleyError);
}

TEST_CASE("serialized theory reparses", "[morley]") {
  Theory t = copycat_theory();
  MorleyizedTheory mt = morleyize_classical(t);
  string text = print_theory(mt.theory);
  Theory back = parse_theory(text);
  CHECK(back.axioms.size() == mt.theory.axioms.size());
  CHECK(print_theory(back) == text);
  auto table = morley_symbol_table(mt);
  CHECK(table.size() == 2 * mt.symbols.size());
}
