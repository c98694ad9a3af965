#pragma once

// Game semantics for omega heterogeneous blocks: attractor/safety fixpoint
// solving with positional strategy extraction, evaluation, extensions, the
// determinacy and preservation checks behind well-determinedness, and the
// two independent oracles (strategy enumeration and cover-style unfolding).

#include "hetlog/arena.hpp"
#include "hetlog/print.hpp"

namespace hetlog {

struct GameResult {
  vector<char> win_exists;      // per position: the existential player wins
  vector<int> strategy_exists;  // move element on owned winning positions, else -1
  vector<int> strategy_forall;
  int exists_region = 0;
  int forall_region = 0;
};

// Solves the arena. The reachability player is the one whose objective is a
// terminal class (Dead for the universal player under safety, Hit for the
// existential under reach); the opponent's region comes from the dual
// greatest fixpoint (iterated removal), and the two routes must partition
// the positions -- determinacy is checked, not assumed.
inline GameResult solve_game(const Arena& ar) {
  size_t n = ar.size();
  bool safety = ar.monitor.safety;
  Player reacher = safety ? Player::Forall : Player::Exists;
  TerminalKind target_kind =
      reacher == Player::Exists ? TerminalKind::ExistsWins : TerminalKind::ForallWins;

  // Attractor with BFS ranks.
  vector<char> attr(n, 0);
  vector<int> rank(n, -1);
  vector<vector<int>> preds(n);
  vector<int> degree(n, 0);
  for (size_t p = 0; p < n; ++p)
    for (auto& [mv, q] : ar.positions[p].edges) {
      preds[static_cast<size_t>(q)].push_back(static_cast<int>(p));
      ++degree[p];
    }
  vector<int> queue;
  for (size_t p = 0; p < n; ++p)
    if (ar.positions[p].terminal == target_kind) {
      attr[p] = 1;
      rank[p] = 0;
      queue.push_back(static_cast<int>(p));
    }
  vector<int> missing = degree;  // for opponent positions: edges not yet in attr
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int q = queue[qi];
    for (int p : preds[static_cast<size_t>(q)]) {
      if (attr[static_cast<size_t>(p)]) continue;
      const auto& pos = ar.positions[static_cast<size_t>(p)];
      if (pos.owner == reacher) {
        attr[static_cast<size_t>(p)] = 1;
        rank[static_cast<size_t>(p)] = rank[static_cast<size_t>(q)] + 1;
        queue.push_back(p);
      } else if (--missing[static_cast<size_t>(p)] == 0) {
        attr[static_cast<size_t>(p)] = 1;
        rank[static_cast<size_t>(p)] = rank[static_cast<size_t>(q)] + 1;
        queue.push_back(p);
      }
    }
  }

  // Independent route: greatest fixpoint of positions where the avoider
  // stays clear of the target terminals.
  vector<char> safe(n, 1);
  for (size_t p = 0; p < n; ++p)
    if (ar.positions[p].terminal == target_kind) safe[p] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t p = 0; p < n; ++p) {
      if (!safe[p] || ar.is_terminal(static_cast<int>(p))) continue;
      const auto& pos = ar.positions[p];
      bool keep;
      if (pos.owner == reacher) {
        keep = true;
        for (auto& [mv, q] : pos.edges)
          if (!safe[static_cast<size_t>(q)]) {
            keep = false;
            break;
          }
      } else {
        keep = false;
        for (auto& [mv, q] : pos.edges)
          if (safe[static_cast<size_t>(q)]) {
            keep = true;
            break;
          }
      }
      if (!keep) {
        safe[p] = 0;
        changed = true;
      }
    }
  }

  for (size_t p = 0; p < n; ++p)
    if (attr[p] == safe[p])
      throw std::logic_error("determinacy violated: regions do not partition");

  GameResult res;
  res.win_exists.resize(n);
  res.strategy_exists.assign(n, -1);
  res.strategy_forall.assign(n, -1);
  for (size_t p = 0; p < n; ++p)
    res.win_exists[p] = reacher == Player::Exists ? attr[p] : safe[p];

  // Positional strategies: the reacher follows decreasing attractor rank,
  // the avoider the lowest-indexed move staying in its region.
  for (size_t p = 0; p < n; ++p) {
    const auto& pos = ar.positions[p];
    if (pos.terminal != TerminalKind::None) continue;
    auto& strat = pos.owner == Player::Exists ? res.strategy_exists : res.strategy_forall;
    if (pos.owner == reacher && attr[p]) {
      for (auto& [mv, q] : pos.edges)
        if (attr[static_cast<size_t>(q)] &&
            rank[static_cast<size_t>(q)] < rank[p]) {
          strat[p] = mv;
          break;
        }
    } else if (pos.owner != reacher && safe[p]) {
      for (auto& [mv, q] : pos.edges)
        if (safe[static_cast<size_t>(q)]) {
          strat[p] = mv;
          break;
        }
    }
  }
  for (size_t p = 0; p < n; ++p)
    (res.win_exists[p] ? res.exists_region : res.forall_region) += 1;
  return res;
}

// ---------------------------------------------------------------------------
// Evaluation

constexpr int kDefaultMaxPositions = 100000;

inline bool eval_het(const Structure& m, const Formula& f, const Assignment& a,
                     const FormulaEval& leaf = nullptr,
                     int max_positions = kDefaultMaxPositions);

// Full classical evaluator: Tarski clauses with heterogeneous subformulas
// routed through the game engine.
inline FormulaEval classical_eval(const Structure& m,
                                  int max_positions = kDefaultMaxPositions) {
  return [&m, max_positions](const Formula& f, const Assignment& a) {
    HetHandler het = [&m, max_positions](const Formula& g, const Assignment& b) {
      return eval_het(m, g, b, nullptr, max_positions);
    };
    return eval_tarski(m, f, a, het);
  };
}

inline bool eval_het(const Structure& m, const Formula& f, const Assignment& a,
                     const FormulaEval& leaf, int max_positions) {
  auto* h = as<HetF>(f);
  if (!h) throw EvalError("eval_het requires a heterogeneous formula");
  FormulaEval ev = leaf ? leaf : classical_eval(m, max_positions);
  if (!h->block.is_omega()) {
    bool via_sugar = ev(desugar_finite_block(f), a);
    bool via_game = eval_finite_het_game(m, *h, a, ev);
    if (via_sugar != via_game)
      throw std::logic_error("finite block desugaring disagrees with game evaluation");
    return via_sugar;
  }
  Arena ar = build_arena(m, *h, a, ev, max_positions);
  GameResult res = solve_game(ar);
  return res.win_exists[static_cast<size_t>(ar.initial)];
}

inline Formula flip_polarity(const Formula& f) {
  auto* h = as<HetF>(f);
  if (!h) throw std::runtime_error("flip_polarity requires a heterogeneous formula");
  HetBlock blk = h->block;
  blk.polarity = flip(blk.polarity);
  return mk_het(std::move(blk), h->payoff);
}

// { a | eval_het(m, h, a) }, rows aligned with canonical_context(h).
struct Extension {
  vector<Var> params;
  vector<vector<int>> tuples;
};

inline Extension het_extension(const Structure& m, const Formula& h,
                               const FormulaEval& leaf = nullptr,
                               int max_positions = kDefaultMaxPositions) {
  Extension ext;
  ext.params = canonical_context(h);
  for_each_assignment(m, ext.params, [&](const Assignment& a) {
    if (eval_het(m, h, a, leaf, max_positions)) {
      vector<int> row;
      for (auto& v : ext.params) row.push_back(a.at(v.name));
      ext.tuples.push_back(std::move(row));
    }
  });
  return ext;
}

// ---------------------------------------------------------------------------
// Oracles

enum class OracleMode { StrategyEnum, CoverSemantics };

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Does the fixed positional Exists strategy win from the initial position
// against every counterplay? Safety loses exactly on reaching a ForallWins
// terminal; reach additionally loses on any cycle (the play never hits).
inline bool strategy_wins(const Arena& ar, const vector<int>& sigma) {
  vector<int> color(ar.size(), 0);  // 0 unvisited, 1 on stack, 2 done
  bool safety = ar.monitor.safety;
  std::function<bool(int)> dfs = [&](int p) -> bool {
    const auto& pos = ar.positions[static_cast<size_t>(p)];
    if (pos.terminal == TerminalKind::ForallWins) return false;
    if (pos.terminal == TerminalKind::ExistsWins) return true;
    if (color[static_cast<size_t>(p)] == 1) return safety;  // repeat on path
    if (color[static_cast<size_t>(p)] == 2) return true;    // already verified
    color[static_cast<size_t>(p)] = 1;
    bool ok = true;
    if (pos.owner == Player::Exists) {
      int mv = sigma[static_cast<size_t>(p)];
      for (auto& [e, q] : pos.edges)
        if (e == mv) {
          ok = dfs(q);
          break;
        }
    } else {
      for (auto& [e, q] : pos.edges)
        if (!(ok = dfs(q))) break;
    }
    color[static_cast<size_t>(p)] = ok ? 2 : 1;
    if (!ok) color[static_cast<size_t>(p)] = 0;  // allow re-proof on other paths
    return ok;
  };
  return dfs(ar.initial);
}

}  // namespace detail

// Brute-force oracle. StrategyEnum enumerates every positional strategy of
// the existential player and verifies it against all counterplays.
// CoverSemantics unfolds the game tree element-wise, truncating at repeated
// (turn, monitor state) pairs -- coinductively for safety, inductively for
// reach -- which is the set specialization of the cover-based semantics.
inline bool oracle_eval(const Structure& m, const Formula& f, const Assignment& a,
                        OracleMode mode, const FormulaEval& leaf = nullptr,
                        int max_positions = kDefaultMaxPositions) {
  auto* h = as<HetF>(f);
  if (!h) throw OracleError("oracle_eval requires a heterogeneous formula");
  if (!h->block.is_omega()) {
    FormulaEval ev = leaf ? leaf : classical_eval(m, max_positions);
    return eval_finite_het_game(m, *h, a, ev);
  }
  FormulaEval ev = leaf ? leaf : classical_eval(m, max_positions);
  Arena ar = build_arena(m, *h, a, ev, max_positions);

  if (mode == OracleMode::CoverSemantics) {
    vector<char> onpath(ar.size(), 0);
    bool safety = ar.monitor.safety;
    std::function<bool(int)> go = [&](int p) -> bool {
      const auto& pos = ar.positions[static_cast<size_t>(p)];
      if (pos.terminal == TerminalKind::ExistsWins) return true;
      if (pos.terminal == TerminalKind::ForallWins) return false;
      if (onpath[static_cast<size_t>(p)]) return safety;
      onpath[static_cast<size_t>(p)] = 1;
      bool result = pos.owner == Player::Forall;
      for (auto& [e, q] : pos.edges) {
        bool v = go(q);
        if (pos.owner == Player::Exists && v) {
          result = true;
          break;
        }
        if (pos.owner == Player::Forall && !v) {
          result = false;
          break;
        }
      }
      onpath[static_cast<size_t>(p)] = 0;
      return result;
    };
    return go(ar.initial);
  }

  if (ar.size() > 30) throw OracleError("instance too large for strategy enumeration");
  vector<int> owned;
  for (size_t p = 0; p < ar.size(); ++p)
    if (!ar.is_terminal(static_cast<int>(p)) &&
        ar.positions[p].owner == Player::Exists)
      owned.push_back(static_cast<int>(p));
  double combos = 1;
  for (int p : owned) combos *= static_cast<double>(ar.positions[static_cast<size_t>(p)].edges.size());
  if (combos > (1 << 20)) throw OracleError("instance too large for strategy enumeration");

  vector<size_t> choice(owned.size(), 0);
  vector<int> sigma(ar.size(), -1);
  while (true) {
    for (size_t i = 0; i < owned.size(); ++i)
      sigma[static_cast<size_t>(owned[i])] =
          ar.positions[static_cast<size_t>(owned[i])].edges[choice[i]].first;
    if (detail::strategy_wins(ar, sigma)) return true;
    size_t i = 0;
    for (; i < owned.size(); ++i) {
      if (++choice[i] < ar.positions[static_cast<size_t>(owned[i])].edges.size()) break;
      choice[i] = 0;
    }
    if (i == owned.size()) break;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Determinacy / preservation / well-determinedness

struct Lasso {
  vector<string> stem;
  vector<string> cycle;
};

struct GameSummary {
  string game;
  int positions = 0;
  int exists_region = 0;
  int forall_region = 0;
};

struct DeterminacyReport {
  bool pass = true;
  vector<GameSummary> games;
  vector<string> violations;
};

struct PreservationReport {
  bool pass = true;
  optional<Lasso> lasso;
  string game;
  string assignment;
};

inline vector<Formula> collect_theory_games(const Theory& t) {
  vector<Formula> games;
  auto add = [&](const Formula& f) {
    for (auto& g : games)
      if (alpha_equal(g, f)) return;
    games.push_back(f);
  };
  for (auto& ax : t.axioms) {
    vector<Formula> hets;
    collect_het(ax.sequent.antecedent, hets);
    collect_het(ax.sequent.succedent, hets);
    for (auto& h : hets)
      if (as<HetF>(h)->block.is_omega()) {
        add(h);
        add(flip_polarity(h));
      }
  }
  return games;
}

inline string describe_assignment(const Structure& m, const vector<Var>& params,
                                  const Assignment& a) {
  string out;
  for (auto& v : params) {
    if (!out.empty()) out += ", ";
    out += v.name + "=" + m.element_name(v.sort, a.at(v.name));
  }
  return out;
}

// For every game and parameter tuple: regions partition positions (checked
// inside solve_game) and exactly one of the block and its dual holds.
inline DeterminacyReport check_determinacy(const Structure& m,
                                           const vector<Formula>& games,
                                           int max_positions = kDefaultMaxPositions) {
  DeterminacyReport rep;
  FormulaEval ev = classical_eval(m, max_positions);
  for (auto& g : games) {
    auto* h = as<HetF>(g);
    GameSummary sum;
    sum.game = print_formula(g);
    auto params = canonical_context(g);
    for_each_assignment(m, params, [&](const Assignment& a) {
      Arena ar = build_arena(m, *h, a, ev, max_positions);
      GameResult res = solve_game(ar);
      sum.positions = static_cast<int>(ar.size());
      sum.exists_region = res.exists_region;
      sum.forall_region = res.forall_region;
      bool direct = res.win_exists[static_cast<size_t>(ar.initial)];
      bool dual = eval_het(m, dual_het(*h), a, ev, max_positions);
      if (direct == dual) {
        rep.pass = false;
        rep.violations.push_back("determinacy fails for " + sum.game + " at [" +
                                 describe_assignment(m, params, a) + "]");
      }
    });
    rep.games.push_back(std::move(sum));
  }
  return rep;
}

// Pass iff every infinite play whose finite prefixes all stay inside the
// existential player's winning region satisfies the payoff. Safety payoffs
// pass by construction (verified); reach payoffs fail exactly when the
// region subgraph has a reachable cycle, and the cycle is the witness.
inline PreservationReport check_preservation(const Structure& m, const Formula& g,
                                             int max_positions = kDefaultMaxPositions) {
  auto* h = as<HetF>(g);
  if (!h || !h->block.is_omega())
    throw std::runtime_error("check_preservation requires an omega block");
  PreservationReport rep;
  rep.game = print_formula(g);
  FormulaEval ev = classical_eval(m, max_positions);
  auto params = canonical_context(g);
  bool failed = false;
  for_each_assignment(m, params, [&](const Assignment& a) {
    if (failed) return;
    Arena ar = build_arena(m, *h, a, ev, max_positions);
    GameResult res = solve_game(ar);
    if (!res.win_exists[static_cast<size_t>(ar.initial)]) return;  // vacuous
    if (ar.monitor.safety) {
      // Leaving Alive exits the region, so verify Dead is outside it.
      for (size_t p = 0; p < ar.size(); ++p)
        if (res.win_exists[p] && ar.positions[p].terminal == TerminalKind::ForallWins)
          throw std::logic_error("safety region contains a losing terminal");
      return;
    }
    // Reach: search the win_exists subgraph for a reachable cycle.
    enum { White, Grey, Black };
    vector<int> color(ar.size(), White);
    vector<std::pair<int, int>> stack;  // (position, move leading OUT of it)
    std::function<bool(int)> dfs = [&](int p) -> bool {
      color[static_cast<size_t>(p)] = Grey;
      for (auto& [e, q] : ar.positions[static_cast<size_t>(p)].edges) {
        if (!res.win_exists[static_cast<size_t>(q)]) continue;
        if (ar.is_terminal(q)) continue;
        if (color[static_cast<size_t>(q)] == Grey) {
          // Cycle q .. p; record the closing move.
          stack.emplace_back(p, e);
          Lasso lasso;
          size_t start = 0;
          while (stack[start].first != q) ++start;
          for (size_t i = 0; i < stack.size(); ++i) {
            int pos = stack[i].first;
            int phase = ar.monitor.states[static_cast<size_t>(
                ar.positions[static_cast<size_t>(pos)].mstate)].phase;
            const string& sort = ar.stage_sorts[static_cast<size_t>(phase)];
            string name = m.element_name(sort, stack[i].second);
            if (i < start)
              lasso.stem.push_back(name);
            else
              lasso.cycle.push_back(name);
          }
          rep.lasso = std::move(lasso);
          return true;
        }
        if (color[static_cast<size_t>(q)] == White) {
          stack.emplace_back(p, e);
          if (dfs(q)) return true;
          stack.pop_back();
        }
      }
      color[static_cast<size_t>(p)] = Black;
      return false;
    };
    if (dfs(ar.initial)) {
      rep.pass = false;
      rep.assignment = describe_assignment(m, params, a);
      failed = true;
    }
  });
  return rep;
}

struct WellDeterminedReport {
  bool well_determined = true;
  DeterminacyReport determinacy;
  vector<PreservationReport> preservation;
};

// Both checks over every omega game of the theory, in both polarities.
inline WellDeterminedReport check_well_determined(const Structure& m, const Theory& t,
                                                  int max_positions = kDefaultMaxPositions) {
  WellDeterminedReport rep;
  auto games = collect_theory_games(t);
  rep.determinacy = check_determinacy(m, games, max_positions);
  if (!rep.determinacy.pass) rep.well_determined = false;
  for (auto& g : games) {
    rep.preservation.push_back(check_preservation(m, g, max_positions));
    if (!rep.preservation.back().pass) rep.well_determined = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Interactive stepping (drives the CLI REPL)

struct StepResult {
  int position = 0;
  optional<int> engine_move;
  string status;
  TerminalKind terminal = TerminalKind::None;
};

inline string monitor_status_name(const Arena& ar, int pos) {
  const auto& p = ar.positions[static_cast<size_t>(pos)];
  if (p.terminal == TerminalKind::ExistsWins) return "exists-wins";
  if (p.terminal == TerminalKind::ForallWins) return "forall-wins";
  switch (ar.monitor.status_of(p.mstate)) {
    case MStatus::Alive: return "alive";
    case MStatus::Dead: return "dead";
    case MStatus::Pending: return "pending";
    case MStatus::Hit: return "hit";
  }
  return "?";
}

// Applies one move at `pos` (the mover's when supplied, otherwise the
// engine's positional strategy choice, falling back to the lowest move).
inline StepResult play_step(const Arena& ar, const GameResult& res, int pos,
                            optional<int> move) {
  const auto& p = ar.positions[static_cast<size_t>(pos)];
  StepResult out;
  if (p.terminal != TerminalKind::None) {
    out.position = pos;
    out.terminal = p.terminal;
    out.status = monitor_status_name(ar, pos);
    return out;
  }
  int mv;
  if (move.has_value()) {
    mv = *move;
  } else {
    mv = p.owner == Player::Exists ? res.strategy_exists[static_cast<size_t>(pos)]
                                   : res.strategy_forall[static_cast<size_t>(pos)];
    if (mv < 0) mv = p.edges.front().first;
    out.engine_move = mv;
  }
  for (auto& [e, q] : p.edges) {
    if (e == mv) {
      out.position = q;
      out.terminal = ar.positions[static_cast<size_t>(q)].terminal;
      out.status = monitor_status_name(ar, q);
      return out;
    }
  }
  throw std::runtime_error("illegal move");
}

}  // namespace hetlog
