#pragma once

// Structured report documents for the CLI: fixed key order (kind, schema,
// verdict, regions, witness, timings), schema version pinned. Structured
// output must be byte-identical across runs with a fixed seed, so the
// timings field carries real durations only in human-readable output.

#include <json.hpp>

#include "hetlog/game.hpp"

namespace hetlog {

using Json = nlohmann::ordered_json;

constexpr int kReportSchema = 1;

inline Json base_report(const string& kind, const string& verdict) {
  Json j;
  j["kind"] = kind;
  j["schema"] = kReportSchema;
  j["verdict"] = verdict;
  j["regions"] = nullptr;
  j["witness"] = nullptr;
  j["timings"] = Json{{"total_ms", nullptr}};
  return j;
}

inline Json lasso_json(const Lasso& l) {
  return Json{{"stem", l.stem}, {"cycle", l.cycle}};
}

inline Json determinacy_json(const DeterminacyReport& rep) {
  Json games = Json::array();
  for (auto& g : rep.games)
    games.push_back(Json{{"game", g.game},
                         {"positions", g.positions},
                         {"exists", g.exists_region},
                         {"forall", g.forall_region}});
  return Json{{"pass", rep.pass}, {"games", games}, {"violations", rep.violations}};
}

}  // namespace hetlog
