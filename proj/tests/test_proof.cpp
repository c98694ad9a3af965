#include <catch2/catch_amalgamated.hpp>

#include "hetlog/proof.hpp"
#include "support/fixtures.hpp"

using namespace hetlog;

namespace {

Theory demo_theory(const string& classc = "safety", const string& mode = "classical") {
  return parse_theory(
      "sort s;\n"
      "rel P(s);\n"
      "rel E(s, s);\n"
      "const zero: s;\n"
      "const one: s;\n"
      "axiom pz: true |- P(zero) [ctx];\n"
      "axiom mono: P(x) |- E(x, x) [ctx x:s];\n"
      "classC " + classc + ";\nmode " + mode + ";\n");
}

Sequent seq(const Theory& t, const string& text) {
  return parse_sequent(text, t.signature);
}

}  // namespace

TEST_CASE("identity and cut", "[proof]") {
  Theory t = demo_theory();
  ProofPtr id = mk_proof(Rule::Identity, seq(t, "P(x) |- P(x) [ctx x:s]"));
  CHECK(check_proof(id, t).ok);
  ProofPtr cut = mk_proof(Rule::Cut, seq(t, "P(x) |- P(x) [ctx x:s]"), {}, {id, id});
  CHECK(check_proof(cut, t).ok);
  ProofPtr bad = mk_proof(Rule::Cut, seq(t, "P(x) |- E(x, x) [ctx x:s]"), {}, {id, id});
  auto r = check_proof(bad, t);
  CHECK_FALSE(r.ok);
}

TEST_CASE("substitution rule", "[proof]") {
  Theory t = demo_theory();
  ProofPtr mono = mk_proof(Rule::TheoryAx, t.axiom("mono")->sequent,
                           ProofParams{.name = "mono"});
  REQUIRE(check_proof(mono, t).ok);
  ProofParams params;
  params.subst = {{Var{"x", "s"}, mk_app("zero")}};
  ProofPtr inst = mk_proof(Rule::Substitution, seq(t, "P(zero) |- E(zero, zero)"),
                           params, {mono});
  CHECK(check_proof(inst, t).ok);
  SECTION("context must cover substituted terms") {
    ProofParams p2;
    p2.subst = {{Var{"x", "s"}, mk_var("y", "s")}};
    ProofPtr widened = mk_proof(Rule::Substitution, seq(t, "P(y) |- E(y, y) [ctx y:s]"),
                                p2, {mono});
    CHECK(check_proof(widened, t).ok);
    ProofPtr missing = mk_proof(Rule::Substitution, seq(t, "P(y) |- E(y, y) [ctx y:s, x:s]"),
                                ProofParams{.subst = {{Var{"x", "s"}, mk_var("y", "s")}}},
                                {mono});
    // conclusion formulas must be the exact substitution instances
    CHECK(check_proof(missing, t).ok);
  }
}

TEST_CASE("equality axioms", "[proof]") {
  Theory t = demo_theory();
  ProofPtr refl = mk_proof(Rule::EqRefl, seq(t, "true |- (x = x) [ctx x:s]"));
  CHECK(check_proof(refl, t).ok);
  ProofParams params;
  params.xs = {Var{"x", "s"}};
  params.ys = {Var{"y", "s"}};
  params.ws = {Var{"w", "s"}};
  params.phi = parse_formula("P(w)", t.signature, {{"w", "s"}});
  ProofPtr subst = mk_proof(Rule::EqSubst,
                            seq(t, "and((x = y), P(x)) |- P(y) [ctx x:s, y:s]"), params);
  CHECK(check_proof(subst, t).ok);
  SECTION("sorts must line up") {
    ProofParams bad = params;
    bad.ys = {Var{"y", "nope"}};
    ProofPtr wrong = mk_proof(Rule::EqSubst,
                              seq(t, "and((x = y), P(x)) |- P(y) [ctx x:s, y:s]"), bad);
    CHECK_FALSE(check_proof(wrong, t).ok);
  }
}

TEST_CASE("conjunction and disjunction", "[proof]") {
  Theory t = demo_theory();
  ProofPtr proj = mk_proof(Rule::ConjAx,
                           seq(t, "and(P(x), E(x, x)) |- E(x, x) [ctx x:s]"),
                           ProofParams{.index = 1});
  CHECK(check_proof(proj, t).ok);
  ProofPtr inj = mk_proof(Rule::DisjAx,
                          seq(t, "P(x) |- or(P(x), E(x, x)) [ctx x:s]"),
                          ProofParams{.index = 0});
  CHECK(check_proof(inj, t).ok);

  ProofPtr p1 = mk_proof(Rule::ConjAx, seq(t, "and(P(x), E(x, x)) |- P(x) [ctx x:s]"),
                         ProofParams{.index = 0});
  ProofPtr p2 = mk_proof(Rule::ConjAx, seq(t, "and(P(x), E(x, x)) |- E(x, x) [ctx x:s]"),
                         ProofParams{.index = 1});
  ProofPtr both = mk_proof(Rule::ConjRule,
                           seq(t, "and(P(x), E(x, x)) |- and(P(x), E(x, x)) [ctx x:s]"),
                           {}, {p1, p2});
  CHECK(check_proof(both, t).ok);
  SECTION("order-insensitive premises") {
    ProofPtr swapped = mk_proof(
        Rule::ConjRule, seq(t, "and(P(x), E(x, x)) |- and(P(x), E(x, x)) [ctx x:s]"),
        {}, {p2, p1});
    CHECK(check_proof(swapped, t).ok);
  }
  SECTION("ex falso via the empty disjunction") {
    ProofPtr exfalso = mk_proof(Rule::DisjRule, seq(t, "false |- P(x) [ctx x:s]"));
    CHECK(check_proof(exfalso, t).ok);
  }
}

TEST_CASE("implication and quantifier rules", "[proof]") {
  Theory t = demo_theory();
  ProofPtr proj = mk_proof(Rule::ConjAx, seq(t, "and(P(x), E(x, x)) |- P(x) [ctx x:s]"),
                           ProofParams{.index = 0});
  ProofPtr intro = mk_proof(Rule::ImplIntro,
                            seq(t, "P(x) |- implies(E(x, x), P(x)) [ctx x:s]"), {}, {proj});
  CHECK(check_proof(intro, t).ok);
  ProofPtr elim = mk_proof(Rule::ImplElim, seq(t, "and(P(x), E(x, x)) |- P(x) [ctx x:s]"),
                           {}, {intro});
  CHECK(check_proof(elim, t).ok);

  // Derived right-introduction of exists: P(z) |- exists y (P(z) /\ E(z, y)).
  ProofPtr id_ex = mk_proof(
      Rule::Identity,
      seq(t, "exists [y:s] and(P(z), E(z, y)) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"));
  ProofPtr open_ex = mk_proof(
      Rule::ExistsElim,
      seq(t, "and(P(z), E(z, y)) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s, y:s]"), {},
      {id_ex});
  CHECK(check_proof(open_ex, t).ok);
  ProofParams sub;
  sub.subst = {{Var{"y", "s"}, mk_var("z", "s")}};
  ProofPtr at_z = mk_proof(
      Rule::Substitution,
      seq(t, "and(P(z), E(z, z)) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"), sub,
      {open_ex});
  CHECK(check_proof(at_z, t).ok);

  SECTION("eigenvariable side condition") {
    ProofPtr bad_id = mk_proof(
        Rule::Identity, seq(t, "exists [y:s] E(y, y) |- E(y, y) [ctx y:s]"));
    ProofPtr bad = mk_proof(Rule::ExistsElim,
                            seq(t, "E(y, y) |- E(y, y) [ctx y:s]"), {}, {bad_id});
    auto r = check_proof(bad, t);
    CHECK_FALSE(r.ok);
  }
  SECTION("forall both directions") {
    ProofPtr id_all = mk_proof(
        Rule::Identity, seq(t, "forall [y:s] P(y) |- forall [y:s] P(y)"));
    ProofPtr opened = mk_proof(Rule::ForallElim,
                               seq(t, "forall [y:s] P(y) |- P(y) [ctx y:s]"), {}, {id_all});
    CHECK(check_proof(opened, t).ok);
    ProofPtr closed = mk_proof(Rule::ForallIntro,
                               seq(t, "forall [y:s] P(y) |- forall [y:s] P(y)"), {},
                               {opened});
    CHECK(check_proof(closed, t).ok);
  }
}

TEST_CASE("transfinite transitivity rule", "[proof]") {
  Theory t = demo_theory();
  SECTION("degenerate singleton bar") {
    TTParams tt;
    tt.gamma = 1;
    tt.bar = {{0}};
    Formula root = parse_formula("P(z)", t.signature, {{"z", "s"}});
    Formula child = parse_formula("and(P(z), E(z, y))", t.signature, {{"z", "s"}, {"y", "s"}});
    tt.nodes[{}] = {{}, root};
    tt.nodes[{0}] = {{Var{"y", "s"}}, child};
    ProofPtr premise = mk_proof(
        Rule::Identity,
        seq(t, "P(z) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"));
    // The premise here is only shape-checked by tt; prove it via the derived
    // right-intro (reusing the pieces from the quantifier test would be
    // noise, identity of the same sequent is not valid, so build honestly).
    ProofPtr id_ex = mk_proof(
        Rule::Identity,
        seq(t, "exists [y:s] and(P(z), E(z, y)) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"));
    ProofPtr open_ex = mk_proof(
        Rule::ExistsElim,
        seq(t, "and(P(z), E(z, y)) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s, y:s]"), {},
        {id_ex});
    ProofParams subp;
    subp.subst = {{Var{"y", "s"}, mk_var("z", "s")}};
    ProofPtr at_z = mk_proof(
        Rule::Substitution,
        seq(t, "and(P(z), E(z, z)) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"), subp,
        {open_ex});
    ProofPtr mono = mk_proof(Rule::TheoryAx, t.axiom("mono")->sequent,
                             ProofParams{.name = "mono"});
    ProofParams monosub;
    monosub.subst = {{Var{"x", "s"}, mk_var("z", "s")}};
    ProofPtr mono_z = mk_proof(Rule::Substitution, seq(t, "P(z) |- E(z, z) [ctx z:s]"),
                               monosub, {mono});
    ProofPtr idp = mk_proof(Rule::Identity, seq(t, "P(z) |- P(z) [ctx z:s]"));
    ProofPtr pair = mk_proof(Rule::ConjRule,
                             seq(t, "P(z) |- and(P(z), E(z, z)) [ctx z:s]"), {},
                             {idp, mono_z});
    ProofPtr derived = mk_proof(
        Rule::Cut, seq(t, "P(z) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"), {},
        {pair, at_z});
    REQUIRE(check_proof(derived, t).ok);
    (void)premise;
    ProofPtr ttnode = mk_proof(
        Rule::TT, seq(t, "P(z) |- exists [y:s] and(P(z), E(z, y)) [ctx z:s]"),
        ProofParams{.tt = tt}, {derived});
    CHECK(check_proof(ttnode, t).ok);
  }
  SECTION("missing bar coverage is rejected") {
    TTParams tt;
    tt.gamma = 2;
    tt.bar = {{0}};
    tt.nodes[{}] = {{}, parse_formula("P(z)", t.signature, {{"z", "s"}})};
    tt.nodes[{0}] = {{Var{"y", "s"}},
                     parse_formula("and(P(z), E(z, y))", t.signature,
                                   {{"z", "s"}, {"y", "s"}})};
    ProofPtr bad = mk_proof(Rule::TT, seq(t, "P(z) |- P(z) [ctx z:s]"),
                            ProofParams{.tt = tt}, {});
    CHECK_FALSE(check_proof(bad, t).ok);
  }
}

TEST_CASE("heterogeneous axiom leaves", "[proof]") {
  Theory t = demo_theory("safety");
  auto& sig = t.signature;
  Formula cc = fixtures::copycat(sig);

  SECTION("hetax1 exact shape") {
    Sequent s = hetax_unfold_instance(cc, true);
    ProofPtr leaf = mk_proof(Rule::HetAx1, s);
    CHECK(check_proof(leaf, t).ok);
    CHECK(print_formula(s.succedent).rfind("forall [x:s] hetEA", 0) == 0);
  }
  SECTION("hetax2 requires an EA block") {
    Formula ea = flip_polarity(cc);
    ProofPtr leaf = mk_proof(Rule::HetAx2, hetax_unfold_instance(ea, false));
    CHECK(check_proof(leaf, t).ok);
    ProofPtr wrong = mk_proof(Rule::HetAx2, hetax_unfold_instance(cc, true));
    CHECK_FALSE(check_proof(wrong, t).ok);
  }
  SECTION("hetax3/4 decomposition cuts") {
    for (int beta = 1; beta <= 3; ++beta) {
      ProofPtr leaf = mk_proof(Rule::HetAx3, hetax_split_instance(cc, beta));
      CAPTURE(beta);
      CHECK(check_proof(leaf, t).ok);
    }
    Formula ea = flip_polarity(cc);
    ProofPtr leaf4 = mk_proof(Rule::HetAx4, hetax_split_instance(ea, 2));
    CHECK(check_proof(leaf4, t).ok);
  }
  SECTION("detax emits the dual pair") {
    ProofPtr leaf = mk_proof(Rule::DetAx, detax_instance(cc));
    CHECK(check_proof(leaf, t).ok);
  }
  SECTION("class gate") {
    Formula reach = fixtures::reach_one(sig);
    ProofPtr leaf = mk_proof(Rule::DetAx, detax_instance(reach));
    auto r = check_proof(leaf, t);
    REQUIRE_FALSE(r.ok);
    CHECK(r.message.find("class") != string::npos);
    Theory clop = demo_theory("clopen");
    CHECK(check_proof(leaf, clop).ok);
  }
  SECTION("bounded blocks guard the unfolding") {
    Formula bounded = parse_formula(
        "hetAE { len: omega; sched: [[x:s]]; bounds: [P(x)]; payoff: safety(1)[P(v0)] }",
        sig);
    Sequent s = hetax_unfold_instance(bounded, true);
    CHECK(print_formula(s.succedent).rfind("forall [x:s] implies(P(x), ", 0) == 0);
    ProofPtr leaf = mk_proof(Rule::HetAx1, s);
    CHECK(check_proof(leaf, t).ok);
  }
}

TEST_CASE("preservation axiom instances", "[proof]") {
  Theory t = demo_theory("safety");
  Formula cc = fixtures::copycat(t.signature);
  PresParams pp;
  pp.block = cc;
  pp.stem = {};
  pp.cycle = {mk_var("a", "s"), mk_var("b", "s")};
  Sequent inst = presax_instance(cc, pp.stem, pp.cycle);
  ProofPtr leaf = mk_proof(Rule::PresAx1, inst, ProofParams{.pres = pp});
  CHECK(check_proof(leaf, t).ok);
  SECTION("cycle alignment enforced") {
    CHECK_THROWS_AS(presax_instance(cc, {}, {mk_var("a", "s")}), KernelError);
  }
  SECTION("EA side") {
    Formula ea = flip_polarity(cc);
    PresParams pe;
    pe.block = ea;
    pe.stem = {mk_app("zero"), mk_app("one")};
    pe.cycle = {mk_var("a", "s"), mk_var("b", "s")};
    ProofPtr leaf2 = mk_proof(Rule::PresAx2, presax_instance(ea, pe.stem, pe.cycle),
                              ProofParams{.pres = pe});
    CHECK(check_proof(leaf2, t).ok);
  }
  SECTION("semantic soundness of the emitted sequent") {
    // On certified structures the instance must evaluate true pointwise.
    for (int n = 1; n <= 3; ++n) {
      auto m = fixtures::chain_structure(n);
      auto ev = classical_eval(m);
      for_each_assignment(m, inst.context, [&](const Assignment& a) {
        CHECK(ev(inst.antecedent, a) <= ev(inst.succedent, a));
      });
    }
  }
}

TEST_CASE("excluded middle is mode-gated", "[proof]") {
  Theory classical = demo_theory("safety", "classical");
  Theory intuition = demo_theory("safety", "intuitionistic");
  Formula p = parse_formula("P(x)", classical.signature, {{"x", "s"}});
  ProofPtr leaf = mk_proof(Rule::ExcludedMiddle,
                           excluded_middle_instance(p, {{"x", "s"}}));
  CHECK(check_proof(leaf, classical).ok);
  auto r = check_proof(leaf, intuition);
  REQUIRE_FALSE(r.ok);
  CHECK(r.message.find("classical") != string::npos);
}

TEST_CASE("axiom instances are accepted one-node proofs", "[proof]") {
  Theory t = demo_theory("clopen");
  Formula cc = fixtures::copycat(t.signature);
  Formula reach = fixtures::reach_one(t.signature);
  vector<ProofPtr> leaves = {
      mk_proof(Rule::HetAx1, hetax_unfold_instance(cc, true)),
      mk_proof(Rule::HetAx2, hetax_unfold_instance(flip_polarity(reach), false)),
      mk_proof(Rule::HetAx3, hetax_split_instance(cc, 2)),
      mk_proof(Rule::HetAx4, hetax_split_instance(flip_polarity(cc), 1)),
      mk_proof(Rule::DetAx, detax_instance(reach)),
  };
  for (auto& leaf : leaves) {
    CAPTURE(print_sequent(leaf->conclusion));
    CHECK(check_proof(leaf, t).ok);
  }
}

TEST_CASE("failing path is reported", "[proof]") {
  Theory t = demo_theory();
  ProofPtr good = mk_proof(Rule::Identity, seq(t, "P(x) |- P(x) [ctx x:s]"));
  ProofPtr bad = mk_proof(Rule::Identity, seq(t, "P(x) |- E(x, x) [ctx x:s]"));
  ProofPtr cut = mk_proof(Rule::Cut, seq(t, "P(x) |- E(x, x) [ctx x:s]"), {}, {good, bad});
  auto r = check_proof(cut, t);
  REQUIRE_FALSE(r.ok);
  CHECK(r.path == vector<int>{1});
}

TEST_CASE("proof scripts round trip", "[proof]") {
  Theory t = demo_theory();
  ProofPtr mono = mk_proof(Rule::TheoryAx, t.axiom("mono")->sequent,
                           ProofParams{.name = "mono"});
  ProofParams params;
  params.subst = {{Var{"x", "s"}, mk_app("zero")}};
  ProofPtr inst = mk_proof(Rule::Substitution, seq(t, "P(zero) |- E(zero, zero)"),
                           params, {mono});
  string text = print_proof(inst);
  ProofPtr back = parse_proof(text, t);
  CHECK(check_proof(back, t).ok);
  CHECK(print_proof(back) == text);
}

TEST_CASE("mutated proofs are rejected", "[proof]") {
  Theory t = demo_theory("clopen");
  Formula cc = fixtures::copycat(t.signature);
  // A pool of valid proofs to mutate.
  vector<ProofPtr> pool;
  pool.push_back(mk_proof(Rule::Identity, seq(t, "P(x) |- P(x) [ctx x:s]")));
  pool.push_back(mk_proof(Rule::TheoryAx, t.axiom("mono")->sequent,
                          ProofParams{.name = "mono"}));
  pool.push_back(mk_proof(Rule::HetAx1, hetax_unfold_instance(cc, true)));
  pool.push_back(mk_proof(Rule::DetAx, detax_instance(cc)));
  pool.push_back(mk_proof(Rule::ConjAx, seq(t, "and(P(x), E(x, x)) |- P(x) [ctx x:s]"),
                          ProofParams{.index = 0}));
  for (auto& p : pool) REQUIRE(check_proof(p, t).ok);

  int rejected = 0;
  Formula marker = parse_formula("(zero = one)", t.signature);
  for (auto& p : pool) {
    // Succedent swap: the expected succedent of every rule is determined by
    // the premises and parameters, so a distinct formula must be rejected.
    if (!formula_equal(p->conclusion.succedent, marker) &&
        !formula_equal(p->conclusion.antecedent, marker)) {
      ProofPtr m = mk_proof(p->rule,
                            mk_sequent(p->conclusion.antecedent, marker,
                                       p->conclusion.context),
                            p->params, p->premises);
      if (!check_proof(m, t).ok) ++rejected;
    }
    // Wrong rule tag.
    ProofPtr m2 = mk_proof(p->rule == Rule::Identity ? Rule::EqRefl : Rule::Identity,
                           p->conclusion, p->params, p->premises);
    if (!check_proof(m2, t).ok) ++rejected;
  }
  CHECK(rejected == 10);  // every mutation in this small set must be rejected
}
