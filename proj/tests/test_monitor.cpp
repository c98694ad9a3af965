#include <catch2/catch_amalgamated.hpp>

#include "support/fixtures.hpp"

using namespace hetlog;

namespace {

// Oracle: monitor status after a move sequence must match direct evaluation
// of every applicable stage check on that prefix.
void check_prefixes(const Structure& m, const Formula& f, const Assignment& params,
                    int depth) {
  auto* h = as<HetF>(f);
  REQUIRE(h);
  const auto& payoff = std::get<OmegaPayoff>(h->payoff);
  auto leaf = classical_eval(m);
  vector<int> prefix;
  for (auto& t : h->block.window_prefix)
    prefix.push_back(eval_term(m, t, params));
  Monitor mon = compile_monitor(m, h->block, payoff, params, prefix, leaf);

  int alphabet_max = 0;
  for (auto& entry : h->block.schedule)
    alphabet_max = std::max(alphabet_max, m.carrier_size(entry[0].sort));

  std::function<void(int, vector<int>&)> walk = [&](int state, vector<int>& moves) {
    bool expected_dead_or_hit;
    bool ok = payoff_prefix_ok(m, h->block, payoff, params, prefix, moves, leaf);
    if (payoff.safety)
      expected_dead_or_hit = !ok;  // some check failed
    else
      expected_dead_or_hit = ok;  // some check hit
    bool at_sink = mon.is_sink(state);
    CAPTURE(moves);
    CHECK(at_sink == expected_dead_or_hit);
    if (at_sink || static_cast<int>(moves.size()) >= depth) return;
    int phase = mon.states[static_cast<size_t>(state)].phase;
    int alphabet = m.carrier_size(h->block.schedule[static_cast<size_t>(phase)][0].sort);
    for (int e = 0; e < alphabet; ++e) {
      moves.push_back(e);
      walk(mon.trans[static_cast<size_t>(state)][static_cast<size_t>(e)], moves);
      moves.pop_back();
    }
  };
  vector<int> moves;
  walk(mon.init, moves);
}

}  // namespace

TEST_CASE("copycat monitor agrees with prefix evaluation", "[monitor]") {
  auto m2 = fixtures::chain_structure(2);
  check_prefixes(m2, fixtures::copycat(m2.signature), {}, 6);
}

TEST_CASE("reach monitor agrees with prefix evaluation and hit is absorbing", "[monitor]") {
  auto m2 = fixtures::chain_structure(2);
  Formula f = fixtures::reach_one(m2.signature);
  check_prefixes(m2, f, {}, 6);
  auto* h = as<HetF>(f);
  auto leaf = classical_eval(m2);
  Monitor mon = compile_monitor(m2, h->block, std::get<OmegaPayoff>(h->payoff), {}, {}, leaf);
  REQUIRE(mon.sink >= 0);
  CHECK(mon.status_of(mon.sink) == MStatus::Hit);
  CHECK(mon.trans[static_cast<size_t>(mon.sink)].empty());  // absorbing sink
  CHECK(mon.size() == 2);
}

TEST_CASE("trivially true safety payoff needs one state", "[monitor]") {
  auto m2 = fixtures::chain_structure(2);
  Formula f = parse_formula("hetAE { len: omega; sched: [[x:s]]; payoff: safety(1)[true] }",
                            m2.signature);
  auto* h = as<HetF>(f);
  Monitor mon = compile_monitor(m2, h->block, std::get<OmegaPayoff>(h->payoff), {},
                                {}, classical_eval(m2));
  CHECK(mon.size() == 1);
  CHECK(mon.sink == -1);
  CHECK(mon.status_of(mon.init) == MStatus::Alive);
}

TEST_CASE("randomized monitors agree with prefix evaluation", "[monitor]") {
  fixtures::Rng rng(42);
  for (int iter = 0; iter < 60; ++iter) {
    auto m = fixtures::random_structure(rng, 3);
    Formula f = fixtures::random_omega_het(rng, 2, 2);
    CAPTURE(iter, print_formula(f), print_structure(m));
    check_prefixes(m, f, {}, 5);
  }
}

TEST_CASE("tail monitors resume from the consumed prefix", "[monitor]") {
  auto m2 = fixtures::chain_structure(2);
  Formula cc = fixtures::copycat(m2.signature);
  Formula t1 = tail_block(cc, 1);
  // After the first move e1, the odd-stage check compares against it.
  check_prefixes(m2, t1, {{"x", 0}}, 5);
  check_prefixes(m2, t1, {{"x", 1}}, 5);
  check_prefixes(m2, tail_block(cc, 2), {{"x", 0}, {"y", 1}}, 5);
}
