#pragma once

// Finite game arenas compiled from omega heterogeneous blocks: positions are
// (stage parity, monitor state) pairs plus a single terminal per outcome.
// Bounds restrict the legal moves; a mover left without a bound-satisfying
// move ends the game in favor of the existential player when the mover is
// universal (-> semantics) and against it when existential (/\ semantics).

#include "hetlog/monitor.hpp"

namespace hetlog {

enum class Player { Exists, Forall };

inline Player other(Player p) { return p == Player::Exists ? Player::Forall : Player::Exists; }

enum class TerminalKind { None, ExistsWins, ForallWins };

struct Arena {
  struct Pos {
    int parity = 0;   // stage mod 2; -1 for terminals
    int mstate = -1;  // monitor state; -1 for bound-exhaustion terminals
    Player owner = Player::Forall;
    TerminalKind terminal = TerminalKind::None;
    vector<std::pair<int, int>> edges;  // (move element, successor position)
  };

  Polarity polarity = Polarity::AE;
  Monitor monitor;
  vector<string> stage_sorts;  // per phase, the sort moved at that stage
  vector<Pos> positions;
  int initial = 0;

  Player owner_of_parity(int parity) const {
    bool even = parity % 2 == 0;
    bool universal = even == (polarity == Polarity::AE);
    return universal ? Player::Forall : Player::Exists;
  }
  bool is_terminal(int p) const {
    return positions[static_cast<size_t>(p)].terminal != TerminalKind::None;
  }
  size_t size() const { return positions.size(); }
};

// Builds the arena of an omega block under an outer assignment. `leaf`
// evaluates het-free bounds and payoff templates (classical evaluation or
// Kripke forcing at a node).
inline Arena build_arena(const Structure& m, const HetF& h, const Assignment& outer,
                         const FormulaEval& leaf, int max_positions = 100000) {
  if (!h.block.is_omega())
    throw std::runtime_error("build_arena requires an omega block");
  const HetBlock& blk = h.block;
  const auto& payoff = std::get<OmegaPayoff>(h.payoff);

  vector<int> prefix;
  for (auto& t : blk.window_prefix) prefix.push_back(eval_term(m, t, outer));

  Arena ar;
  ar.polarity = blk.polarity;
  ar.monitor = compile_monitor(m, blk, payoff, outer, prefix, leaf, max_positions);
  for (auto& entry : blk.schedule) ar.stage_sorts.push_back(entry[0].sort);

  std::map<std::pair<int, int>, int> index;  // (parity, mstate) -> position
  int exists_terminal = -1, forall_terminal = -1;
  auto terminal = [&](TerminalKind k) {
    int& slot = k == TerminalKind::ExistsWins ? exists_terminal : forall_terminal;
    if (slot < 0) {
      slot = static_cast<int>(ar.positions.size());
      Arena::Pos t;
      t.parity = -1;
      t.terminal = k;
      ar.positions.push_back(std::move(t));
    }
    return slot;
  };
  auto intern = [&](int parity, int mstate) {
    if (ar.monitor.is_sink(mstate))
      return terminal(ar.monitor.status_of(mstate) == MStatus::Hit
                          ? TerminalKind::ExistsWins
                          : TerminalKind::ForallWins);
    auto key = std::make_pair(parity, mstate);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(ar.positions.size());
    if (id >= max_positions) throw GameTooLarge("arena exceeds position cap");
    index[key] = id;
    Arena::Pos p;
    p.parity = parity;
    p.mstate = mstate;
    p.owner = ar.owner_of_parity(parity);
    ar.positions.push_back(std::move(p));
    return id;
  };

  ar.initial = intern(0, ar.monitor.init);
  for (size_t pi = 0; pi < ar.positions.size(); ++pi) {
    Arena::Pos pos = ar.positions[pi];
    if (pos.terminal != TerminalKind::None) continue;
    int phase = ar.monitor.states[static_cast<size_t>(pos.mstate)].phase;
    const string& sort = ar.stage_sorts[static_cast<size_t>(phase)];
    int alphabet = m.carrier_size(sort);
    vector<std::pair<int, int>> edges;
    for (int e = 0; e < alphabet; ++e) {
      if (!blk.bounds.empty()) {
        Assignment b{{blk.schedule[static_cast<size_t>(phase)][0].name, e}};
        if (!leaf(blk.bounds[static_cast<size_t>(phase)], b)) continue;
      }
      int next_m = ar.monitor.trans[static_cast<size_t>(pos.mstate)][static_cast<size_t>(e)];
      edges.emplace_back(e, intern((pos.parity + 1) % 2, next_m));
    }
    if (edges.empty()) {
      // No bound-satisfying move for the mover.
      ar.positions[pi].terminal = pos.owner == Player::Forall
                                      ? TerminalKind::ExistsWins
                                      : TerminalKind::ForallWins;
    } else {
      ar.positions[pi].edges = std::move(edges);
    }
  }
  return ar;
}

}  // namespace hetlog
