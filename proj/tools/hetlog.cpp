// Command-line workbench: parse/check inputs, evaluate formulas, solve
// heterogeneous games, certify structures as well-determined, check proof
// scripts, Morleyize theories, evaluate Kripke forcing and play games
// interactively. Exit codes: 0 pass/true verdicts, 1 fail verdicts,
// 2 usage or parse errors.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hetlog/hetlog.hpp"
#include "hetlog/report.hpp"

namespace {

using namespace hetlog;

struct Options {
  std::string format = "human";
  uint64_t seed = 0;
  int max_positions = kDefaultMaxPositions;
  std::string mode;
  std::string classc;
  bool intuitionistic = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_ext(const std::string& path, const std::string& ext) {
  return path.size() > ext.size() &&
         path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
}

// Applies --mode and --class overrides.
void apply_overrides(Theory& t, const Options& opt) {
  if (opt.mode == "classical") t.mode = Mode::Classical;
  if (opt.mode == "intuitionistic") t.mode = Mode::Intuitionistic;
  if (opt.classc.empty()) return;
  if (opt.classc == "safety") {
    t.classc = ClassC{ClassC::SafetyOnly, {}};
  } else if (opt.classc == "clopen") {
    t.classc = ClassC{ClassC::Clopen, {}};
  } else {
    // A file holding an explicit list: payoff specs separated by commas.
    Parser ps = Parser::from_text(slurp(opt.classc), &t.signature);
    ClassC cls;
    cls.kind = ClassC::Explicit;
    do {
      Payoff p = ps.payoff_spec(nullptr, {}, {});
      cls.entries.push_back(std::get<OmegaPayoff>(p));
    } while (ps.accept(","));
    t.classc = cls;
  }
}

struct LoadedInputs {
  optional<Theory> theory;
  optional<Structure> structure;
  optional<string> proof_text;
  optional<string> kripke_text;
};

LoadedInputs load(const std::vector<std::string>& files, const Options& opt) {
  LoadedInputs in;
  // Theories first: structures and proofs resolve against their signature.
  for (auto& f : files)
    if (has_ext(f, ".thy")) {
      in.theory = parse_theory(slurp(f));
      apply_overrides(*in.theory, opt);
    } else if (has_ext(f, ".sig")) {
      Theory t;
      t.signature = parse_signature(slurp(f));
      in.theory = t;
      apply_overrides(*in.theory, opt);
    }
  for (auto& f : files) {
    if (has_ext(f, ".str")) {
      if (!in.theory) throw UsageError("a .thy or .sig file must accompany " + f);
      in.structure = parse_structure(slurp(f), in.theory->signature);
      auto errors = validate_structure(*in.structure);
      if (!errors.empty()) throw SyntaxError({0, 0, f + ": " + errors[0]});
    } else if (has_ext(f, ".prf")) {
      in.proof_text = slurp(f);
    } else if (has_ext(f, ".krp")) {
      in.kripke_text = slurp(f);
    }
  }
  return in;
}

struct Emitter {
  const Options& opt;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  int emit(Json report, int exit_code, const std::vector<std::string>& human_lines) {
    if (opt.format == "structured") {
      std::cout << report.dump(2) << "\n";
    } else {
      for (auto& line : human_lines) std::cout << line << "\n";
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
      std::cout << "(" << ms << " ms)\n";
    }
    return exit_code;
  }
};

vector<Var> parse_ctx(const std::string& text) {
  vector<Var> ctx;
  if (text.empty()) return ctx;
  Parser ps = Parser::from_text("[" + text + "]");
  return ps.var_list();
}

Assignment parse_assign(const std::string& text, const Structure& m,
                        const vector<Var>& ctx) {
  Assignment a;
  if (text.empty()) return a;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("bad --assign entry: " + item);
    std::string name = item.substr(0, eq);
    std::string elem = item.substr(eq + 1);
    for (auto& v : ctx)
      if (v.name == name) {
        int idx = m.element_index(v.sort, elem);
        if (idx < 0) throw UsageError("unknown element " + elem);
        a[name] = idx;
      }
    if (!a.count(name)) throw UsageError("assignment variable " + name + " not in --ctx");
  }
  return a;
}

// ---------------------------------------------------------------------------

int cmd_check(const LoadedInputs& in, const std::string& formula,
              const std::string& ctx_text, Emitter& em) {
  std::vector<std::string> lines;
  bool ok = true;
  if (in.theory) {
    const Theory& t = *in.theory;
    WfReport sig_rep = well_formed(t.signature);
    for (auto& e : sig_rep.errors) lines.push_back("signature: " + e), ok = false;
    for (auto& ax : t.axioms) {
      WfReport rep = well_formed(ax.sequent, t.signature);
      for (auto& e : rep.errors) lines.push_back("axiom " + ax.name + ": " + e), ok = false;
      vector<Formula> hets;
      collect_het(ax.sequent.antecedent, hets);
      collect_het(ax.sequent.succedent, hets);
      for (auto& h : hets)
        if (as<HetF>(h)->block.is_omega() && !formula_in_class(h, t.classc)) {
          lines.push_back("axiom " + ax.name + ": payoff outside class C");
          ok = false;
        }
    }
  }
  if (!formula.empty()) {
    if (!in.theory) throw UsageError("--formula needs a theory or signature");
    Formula f = parse_formula(formula, in.theory->signature, parse_ctx(ctx_text));
    WfReport rep = well_formed(f, in.theory->signature, parse_ctx(ctx_text));
    for (auto& e : rep.errors) lines.push_back("formula: " + e), ok = false;
  }
  if (ok) lines.insert(lines.begin(), "well-formed");
  Json rep = base_report("check", ok ? "well-formed" : "ill-formed");
  rep["witness"] = lines;
  return em.emit(rep, ok ? 0 : 1, lines);
}

int cmd_eval(const LoadedInputs& in, const Options& opt, const std::string& formula,
             const std::string& ctx_text, const std::string& assign, Emitter& em) {
  if (!in.theory || !in.structure) throw UsageError("eval needs a theory and a structure");
  auto ctx = parse_ctx(ctx_text);
  Formula f = parse_formula(formula, in.theory->signature, ctx);
  Assignment a = parse_assign(assign, *in.structure, ctx);
  for (auto& v : free_vars(f))
    if (!a.count(v.name)) throw UsageError("missing assignment for " + v.name);
  bool value = classical_eval(*in.structure, opt.max_positions)(f, a);
  Json rep = base_report("eval", value ? "true" : "false");
  return em.emit(rep, value ? 0 : 1,
                 {print_formula(f) + " evaluates to " + (value ? "true" : "false")});
}

int cmd_extension(const LoadedInputs& in, const Options& opt,
                  const std::string& formula, const std::string& ctx_text,
                  Emitter& em) {
  if (!in.theory || !in.structure)
    throw UsageError("extension needs a theory and a structure");
  Formula f = parse_formula(formula, in.theory->signature, parse_ctx(ctx_text));
  Extension ext = het_extension(*in.structure, f, nullptr, opt.max_positions);
  Json tuples = Json::array();
  std::vector<std::string> lines;
  for (auto& row : ext.tuples) {
    Json t = Json::array();
    std::string line;
    for (size_t i = 0; i < row.size(); ++i) {
      std::string name = in.structure->element_name(ext.params[i].sort, row[i]);
      t.push_back(name);
      line += (i ? ", " : "") + ext.params[i].name + "=" + name;
    }
    tuples.push_back(t);
    lines.push_back("(" + line + ")");
  }
  Json rep = base_report("extension", std::to_string(ext.tuples.size()) + " tuples");
  rep["witness"] = tuples;
  lines.insert(lines.begin(),
               "extension has " + std::to_string(ext.tuples.size()) + " tuples");
  return em.emit(rep, 0, lines);
}

int cmd_solve(const LoadedInputs& in, const Options& opt, const std::string& formula,
              const std::string& ctx_text, const std::string& assign, Emitter& em) {
  if (!in.theory || !in.structure) throw UsageError("solve needs a theory and a structure");
  auto ctx = parse_ctx(ctx_text);
  Formula f = parse_formula(formula, in.theory->signature, ctx);
  auto* h = as<HetF>(f);
  if (!h || !h->block.is_omega())
    throw UsageError("solve expects an omega heterogeneous formula");
  Assignment a = parse_assign(assign, *in.structure, ctx);
  Arena ar = build_arena(*in.structure, *h, a,
                         classical_eval(*in.structure, opt.max_positions),
                         opt.max_positions);
  GameResult res = solve_game(ar);
  bool value = res.win_exists[static_cast<size_t>(ar.initial)];
  Json rep = base_report("solve", value ? "exists-wins" : "forall-wins");
  rep["regions"] = Json{{"exists", res.exists_region}, {"forall", res.forall_region}};
  Json strat = Json::array();
  for (size_t p = 0; p < ar.size(); ++p) {
    if (ar.is_terminal(static_cast<int>(p))) continue;
    const auto& pos = ar.positions[p];
    int mv = pos.owner == Player::Exists ? res.strategy_exists[p] : res.strategy_forall[p];
    if (mv < 0) continue;
    int phase = ar.monitor.states[static_cast<size_t>(pos.mstate)].phase;
    strat.push_back(Json{{"position", static_cast<int>(p)},
                         {"owner", pos.owner == Player::Exists ? "exists" : "forall"},
                         {"move", in.structure->element_name(
                                      ar.stage_sorts[static_cast<size_t>(phase)], mv)}});
  }
  rep["witness"] = Json{{"positions", ar.positions.size()}, {"strategy", strat}};
  return em.emit(rep, value ? 0 : 1,
                 {std::string("initial position: ") + (value ? "exists wins" : "forall wins"),
                  "positions: " + std::to_string(ar.size()),
                  "regions: exists=" + std::to_string(res.exists_region) +
                      " forall=" + std::to_string(res.forall_region)});
}

int cmd_certify(const LoadedInputs& in, const Options& opt, Emitter& em) {
  if (!in.theory || !in.structure)
    throw UsageError("certify needs a theory and a structure");
  auto wd = check_well_determined(*in.structure, *in.theory, opt.max_positions);
  Json rep = base_report("certify", wd.well_determined ? "well-determined"
                                                       : "not-well-determined");
  rep["regions"] = determinacy_json(wd.determinacy);
  std::vector<std::string> lines;
  lines.push_back(wd.well_determined ? "well-determined" : "not well-determined");
  Json pres = Json::array();
  for (auto& p : wd.preservation) {
    Json e{{"game", p.game}, {"pass", p.pass}};
    if (p.lasso) {
      e["lasso"] = lasso_json(*p.lasso);
      e["assignment"] = p.assignment;
      std::string stem, cyc;
      for (auto& s : p.lasso->stem) stem += (stem.empty() ? "" : ",") + s;
      for (auto& s : p.lasso->cycle) cyc += (cyc.empty() ? "" : ",") + s;
      lines.push_back("preservation fails for " + p.game);
      lines.push_back("  lasso stem (" + stem + ") cycle (" + cyc + ")");
    }
    pres.push_back(e);
  }
  rep["witness"] = pres;
  return em.emit(rep, wd.well_determined ? 0 : 1, lines);
}

int cmd_prove(const LoadedInputs& in, Emitter& em) {
  if (!in.theory || !in.proof_text) throw UsageError("prove needs a theory and a proof");
  ProofPtr proof = parse_proof(*in.proof_text, *in.theory);
  CheckResult res = check_proof(proof, *in.theory);
  Json rep = base_report("prove", res.ok ? "accepted" : "rejected");
  std::vector<std::string> lines;
  if (res.ok) {
    lines.push_back("proof accepted: " + print_sequent(proof->conclusion));
  } else {
    Json path = Json::array();
    std::string path_text;
    for (int i : res.path) {
      path.push_back(i);
      path_text += (path_text.empty() ? "" : ".") + std::to_string(i);
    }
    rep["witness"] = Json{{"message", res.message}, {"path", path}};
    lines.push_back("proof rejected: " + res.message);
    lines.push_back("at premise path [" + path_text + "]");
  }
  return em.emit(rep, res.ok ? 0 : 1, lines);
}

int cmd_morleyize(const LoadedInputs& in, bool intuit,
                  const std::string& out_path, const std::string& sidecar_path,
                  Emitter& em) {
  if (!in.theory) throw UsageError("morleyize needs a theory");
  MorleyizedTheory mt = intuit ? morleyize_intuitionistic(*in.theory)
                               : morleyize_classical(*in.theory);
  std::string text = print_theory(mt.theory);
  Json sidecar = Json::object();
  for (auto& [name, pretty] : morley_symbol_table(mt)) sidecar[name] = pretty;
  if (!out_path.empty()) std::ofstream(out_path) << text;
  if (!sidecar_path.empty()) std::ofstream(sidecar_path) << sidecar.dump(2) << "\n";
  Json rep = base_report("morleyize", "ok");
  rep["witness"] = Json{{"symbols", mt.symbols.size()},
                        {"axioms", mt.theory.axioms.size()},
                        {"theory", text},
                        {"sidecar", sidecar}};
  std::vector<std::string> lines;
  if (out_path.empty()) {
    std::istringstream body(text);
    std::string line;
    while (std::getline(body, line)) lines.push_back(line);
  } else {
    lines.push_back("wrote " + out_path);
  }
  lines.push_back("// " + std::to_string(mt.symbols.size()) + " subformulas, " +
                  std::to_string(mt.theory.axioms.size()) + " axioms");
  return em.emit(rep, 0, lines);
}

int cmd_force(const LoadedInputs& in, const Options& opt, const std::string& node,
              const std::string& formula, const std::string& ctx_text,
              const std::string& assign, Emitter& em) {
  if (!in.theory || !in.kripke_text) throw UsageError("force needs a theory and a model");
  KripkeModel k = parse_kripke(*in.kripke_text, in.theory->signature);
  auto rep_model = check_kripke_model(k, *in.theory, opt.max_positions);
  if (!rep_model.ok()) {
    Json rep = base_report("force", "model-rejected");
    rep["witness"] = rep_model.errors;
    return em.emit(rep, 1, {"kripke model rejected: " + rep_model.errors[0]});
  }
  int p = k.node_index(node);
  if (p < 0) throw UsageError("unknown node " + node);
  auto ctx = parse_ctx(ctx_text);
  Formula f = parse_formula(formula, in.theory->signature, ctx);
  Assignment a = parse_assign(assign, k.structures[static_cast<size_t>(p)], ctx);
  bool value = force(k, p, f, a, opt.max_positions);
  Json rep = base_report("force", value ? "forced" : "not-forced");
  return em.emit(rep, value ? 0 : 1,
                 {k.nodes[static_cast<size_t>(p)] + (value ? " forces " : " does not force ") +
                  print_formula(f)});
}

int cmd_oracle(const LoadedInputs& in, const Options& opt, Emitter& em) {
  if (!in.theory || !in.structure) throw UsageError("oracle needs a theory and a structure");
  auto games = collect_theory_games(*in.theory);
  int checked = 0, agreed = 0;
  std::vector<std::string> mismatches;
  for (auto& g : games) {
    auto params = canonical_context(g);
    for_each_assignment(*in.structure, params, [&](const Assignment& a) {
      ++checked;
      bool solver = eval_het(*in.structure, g, a, nullptr, opt.max_positions);
      bool enumd, cover;
      try {
        enumd = oracle_eval(*in.structure, g, a, OracleMode::StrategyEnum, nullptr,
                            opt.max_positions);
        cover = oracle_eval(*in.structure, g, a, OracleMode::CoverSemantics, nullptr,
                            opt.max_positions);
      } catch (const OracleError&) {
        --checked;
        return;
      }
      if (solver == enumd && solver == cover)
        ++agreed;
      else
        mismatches.push_back(print_formula(g));
    });
  }
  bool ok = checked == agreed;
  Json rep = base_report("oracle", ok ? "agree" : "disagree");
  rep["witness"] = Json{{"instances", checked}, {"agreed", agreed},
                        {"mismatches", mismatches}};
  return em.emit(rep, ok ? 0 : 1,
                 {"oracle agreement on " + std::to_string(agreed) + "/" +
                  std::to_string(checked) + " instances"});
}

int cmd_play(const LoadedInputs& in, const Options& opt, const std::string& formula,
             const std::string& side, Emitter& em) {
  if (!in.theory || !in.structure) throw UsageError("play needs a theory and a structure");
  const Structure& m = *in.structure;
  Formula f = parse_formula(formula, in.theory->signature);
  auto* h = as<HetF>(f);
  if (!h || !h->block.is_omega())
    throw UsageError("play expects a closed omega heterogeneous formula");
  Player human = side == "exists" ? Player::Exists : Player::Forall;
  Arena ar = build_arena(m, *h, {}, classical_eval(m, opt.max_positions),
                         opt.max_positions);
  GameResult res = solve_game(ar);
  std::vector<std::string> transcript;
  auto say = [&](const std::string& line) {
    std::cout << line << "\n";
    transcript.push_back(line);
  };
  bool exists_wins = res.win_exists[static_cast<size_t>(ar.initial)];
  bool human_winning = (human == Player::Exists) == exists_wins;
  say(human_winning ? "you win from the initial position"
                    : "opponent wins from initial position");
  int pos = ar.initial;
  std::string line;
  while (true) {
    const auto& p = ar.positions[static_cast<size_t>(pos)];
    if (p.terminal != TerminalKind::None) {
      say(std::string("game over: ") +
          (p.terminal == TerminalKind::ExistsWins ? "exists wins" : "forall wins"));
      break;
    }
    int phase = ar.monitor.states[static_cast<size_t>(p.mstate)].phase;
    const std::string& sort = ar.stage_sorts[static_cast<size_t>(phase)];
    if (p.owner == human) {
      std::cout << "your move (" << sort << "; status " << monitor_status_name(ar, pos)
                << ")> " << std::flush;
      if (!std::getline(std::cin, line)) break;
      transcript.push_back("> " + line);
      if (line == "quit") break;
      if (line.rfind("save ", 0) == 0) {
        std::ofstream out(line.substr(5));
        for (auto& t : transcript) out << t << "\n";
        say("saved transcript");
        continue;
      }
      int e = m.element_index(sort, line);
      if (e < 0) {
        say("illegal move, try again");
        continue;
      }
      try {
        StepResult step = play_step(ar, res, pos, e);
        pos = step.position;
        say("status: " + step.status);
      } catch (const std::exception&) {
        say("illegal move, try again");
      }
    } else {
      StepResult step = play_step(ar, res, pos, std::nullopt);
      pos = step.position;
      say("engine plays " +
          m.element_name(sort, step.engine_move.value_or(0)) + " (status " +
          step.status + ")");
    }
  }
  Json rep = base_report("play", "done");
  return em.emit(rep, 0, {});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for heterogeneous-quantifier logic"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "human or structured")
      ->check(CLI::IsMember({"human", "structured"}));
  app.add_option("--seed", opt.seed, "seed for randomized runs");
  app.add_option("--max-positions", opt.max_positions, "arena position cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--mode", opt.mode, "override theory mode")
      ->check(CLI::IsMember({"classical", "intuitionistic"}));
  app.add_option("--class", opt.classc, "override class C: safety, clopen or a file");

  std::vector<std::string> files;
  std::string formula, ctx_text, assign, node, side = "forall";
  std::string out_path, sidecar_path;
  bool intuit = false;

  auto add_common = [&](CLI::App* cmd, bool needs_formula) {
    cmd->add_option("files", files, "input files (.thy/.sig/.str/.prf/.krp)");
    if (needs_formula) {
      cmd->add_option("--formula", formula, "formula text");
      cmd->add_option("--ctx", ctx_text, "context, e.g. x:s,y:t");
      cmd->add_option("--assign", assign, "assignment, e.g. x=a,y=b");
    }
  };
  add_common(app.add_subcommand("check", "well-formedness of inputs"), true);
  add_common(app.add_subcommand("eval", "evaluate a formula"), true);
  add_common(app.add_subcommand("extension", "heterogeneous extension table"), true);
  add_common(app.add_subcommand("solve", "winning regions and strategies"), true);
  add_common(app.add_subcommand("certify", "well-determinedness of a structure"), false);
  add_common(app.add_subcommand("prove", "check a proof script"), false);
  auto* morl = app.add_subcommand("morleyize", "translate to the coherent fragment");
  add_common(morl, false);
  morl->add_flag("--intuitionistic", intuit, "use the intuitionistic clause list");
  morl->add_option("--out", out_path, "write the theory here");
  morl->add_option("--sidecar", sidecar_path, "write the symbol table here");
  auto* frc = app.add_subcommand("force", "Kripke forcing at a node");
  add_common(frc, true);
  frc->add_option("--node", node, "node name")->required();
  add_common(app.add_subcommand("oracle", "oracle agreement run"), false);
  auto* ply = app.add_subcommand("play", "interactive game REPL");
  add_common(ply, true);
  ply->add_option("--side", side, "human side")
      ->check(CLI::IsMember({"exists", "forall"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  Emitter em{opt};
  try {
    LoadedInputs in = load(files, opt);
    if (app.got_subcommand("check")) return cmd_check(in, formula, ctx_text, em);
    if (app.got_subcommand("eval"))
      return cmd_eval(in, opt, formula, ctx_text, assign, em);
    if (app.got_subcommand("extension"))
      return cmd_extension(in, opt, formula, ctx_text, em);
    if (app.got_subcommand("solve"))
      return cmd_solve(in, opt, formula, ctx_text, assign, em);
    if (app.got_subcommand("certify")) return cmd_certify(in, opt, em);
    if (app.got_subcommand("prove")) return cmd_prove(in, em);
    if (app.got_subcommand("morleyize"))
      return cmd_morleyize(in, intuit, out_path, sidecar_path, em);
    if (app.got_subcommand("force"))
      return cmd_force(in, opt, node, formula, ctx_text, assign, em);
    if (app.got_subcommand("oracle")) return cmd_oracle(in, opt, em);
    if (app.got_subcommand("play")) return cmd_play(in, opt, formula, side, em);
  } catch (const SyntaxError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
