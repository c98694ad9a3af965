#pragma once

// Finite-state monitors presenting clopen omega-payoffs. A monitor state
// records (stage mod period, last window-1 moves); the Dead (safety) and Hit
// (reach) states are absorbing sinks. Stage checks whose window is not yet
// full are skipped, which the window contents encode directly.

#include "hetlog/eval.hpp"

namespace hetlog {

enum class MStatus { Alive, Dead, Pending, Hit };

struct Monitor {
  struct State {
    int phase = 0;          // stage mod period
    vector<int> window;     // last min(w-1, history) moves, oldest first
    MStatus status = MStatus::Alive;
  };

  bool safety = true;
  int window = 1;
  int period = 1;
  int init = 0;
  int sink = -1;  // Dead or Hit state, -1 if unreachable
  vector<State> states;
  vector<vector<int>> trans;  // trans[s][move] = successor; empty for sinks

  bool is_sink(int s) const { return s == sink; }
  MStatus status_of(int s) const { return states[static_cast<size_t>(s)].status; }
  int size() const { return static_cast<int>(states.size()); }
};

struct GameTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compiles the payoff of an omega block over a structure. `params` supplies
// the outer parameters of the templates; `prefix` the already-played moves
// (evaluated window_prefix terms); `leaf` evaluates the het-free templates.
inline Monitor compile_monitor(const Structure& m, const HetBlock& block,
                               const OmegaPayoff& payoff, const Assignment& params,
                               const vector<int>& prefix, const FormulaEval& leaf,
                               int max_states = 100000) {
  Monitor mon;
  mon.safety = payoff.safety;
  mon.window = payoff.window;
  mon.period = block.period();

  std::map<std::pair<int, vector<int>>, int> index;
  auto intern = [&](int phase, vector<int> window) {
    auto key = std::make_pair(phase, window);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = mon.size();
    if (id >= max_states) throw GameTooLarge("monitor exceeds state cap");
    index[key] = id;
    mon.states.push_back(Monitor::State{
        phase, std::move(window), payoff.safety ? MStatus::Alive : MStatus::Pending});
    mon.trans.emplace_back();
    return id;
  };

  auto sink_state = [&]() {
    if (mon.sink < 0) {
      mon.sink = mon.size();
      mon.states.push_back(Monitor::State{
          -1, {}, payoff.safety ? MStatus::Dead : MStatus::Hit});
      mon.trans.emplace_back();  // absorbing: no explicit transitions
    }
    return mon.sink;
  };

  // Past conditions already decided over the freed prefix: a failed safety
  // condition or an achieved reach condition starts the monitor in its sink.
  bool start_in_sink = false;
  for (auto& g : block.past) {
    bool holds = leaf(g, params);
    if (payoff.safety ? !holds : holds) start_in_sink = true;
  }
  if (start_in_sink) {
    mon.init = sink_state();
    return mon;
  }

  vector<int> init_window = prefix;
  int keep = std::min<int>(static_cast<int>(init_window.size()), payoff.window - 1);
  init_window.assign(init_window.end() - keep, init_window.end());
  mon.init = intern(0, init_window);

  // States are interned in discovery order, so a plain index scan visits
  // every reachable state exactly once.
  for (int s = 0; s < mon.size(); ++s) {
    if (mon.is_sink(s)) continue;
    Monitor::State st = mon.states[static_cast<size_t>(s)];
    const string& sort = block.schedule[static_cast<size_t>(st.phase)][0].sort;
    int alphabet = m.carrier_size(sort);
    vector<int> row(static_cast<size_t>(alphabet), -1);
    for (int e = 0; e < alphabet; ++e) {
      vector<int> full = st.window;
      full.push_back(e);
      bool check_applies = static_cast<int>(full.size()) >= payoff.window;
      bool ok = true;
      if (check_applies) {
        Assignment asg = params;
        for (int i = 0; i < payoff.window; ++i)
          asg[placeholder_name(i)] = full[full.size() - payoff.window + i];
        ok = leaf(payoff.templates[static_cast<size_t>(st.phase)], asg);
      }
      bool to_sink = payoff.safety ? (check_applies && !ok)
                                   : (check_applies && ok);
      if (to_sink) {
        row[static_cast<size_t>(e)] = sink_state();
        continue;
      }
      int w_keep = std::min<int>(static_cast<int>(full.size()), payoff.window - 1);
      vector<int> next_window(full.end() - w_keep, full.end());
      row[static_cast<size_t>(e)] =
          intern((st.phase + 1) % mon.period, std::move(next_window));
    }
    mon.trans[static_cast<size_t>(s)] = std::move(row);
  }
  return mon;
}

// Reference evaluation of a move sequence straight from the payoff
// definition: the conjunction (safety) / disjunction (reach) of all stage
// checks whose window fits inside the prefix+moves history.
inline bool payoff_prefix_ok(const Structure&, const HetBlock& block,
                             const OmegaPayoff& payoff, const Assignment& params,
                             const vector<int>& prefix, const vector<int>& moves,
                             const FormulaEval& leaf) {
  vector<int> history = prefix;
  history.insert(history.end(), moves.begin(), moves.end());
  bool any_hit = false;
  for (auto& g : block.past) {
    bool holds = leaf(g, params);
    if (payoff.safety && !holds) return false;
    if (!payoff.safety && holds) any_hit = true;
  }
  for (size_t n = prefix.size(); n < history.size(); ++n) {
    int stage = static_cast<int>(n - prefix.size());
    if (static_cast<int>(n) + 1 < payoff.window) continue;  // window not full
    Assignment asg = params;
    for (int i = 0; i < payoff.window; ++i)
      asg[placeholder_name(i)] =
          history[n + 1 - static_cast<size_t>(payoff.window) + static_cast<size_t>(i)];
    bool ok = leaf(payoff.templates[static_cast<size_t>(stage % block.period())], asg);
    if (payoff.safety && !ok) return false;
    if (!payoff.safety && ok) any_hit = true;
  }
  return payoff.safety ? true : any_hit;
}

}  // namespace hetlog
