#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hetlog/hetlog.hpp"

namespace {

std::string bin() {
  const char* b = std::getenv("HETLOG_BIN");
  REQUIRE(b != nullptr);
  return b;
}

std::string corpus() {
  const char* c = std::getenv("HETLOG_CORPUS");
  REQUIRE(c != nullptr);
  return c;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args, const std::string& stdin_text = "") {
  std::string cmd = bin() + " " + args + " 2>/dev/null";
  if (!stdin_text.empty()) {
    std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                       "/hetlog_stdin.txt";
    std::ofstream(path) << stdin_text;
    cmd = cmd + " < " + path;
  }
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Golden {
  std::string args;
  std::string expected_file;
  int exit_code;
};

std::vector<Golden> goldens() {
  std::string c = corpus() + "/";
  return {
      {"--format structured certify " + c + "m2.str " + c + "demo_safety.thy",
       "certify_safety_m2.json", 0},
      {"--format structured certify " + c + "m2.str " + c + "demo_clopen.thy",
       "certify_clopen_m2.json", 1},
      {"--format structured certify " + c + "m1.str " + c + "demo_clopen.thy",
       "certify_clopen_m1.json", 0},
      {"--format structured certify " + c + "m2.str " + c + "demo_bounded.thy",
       "certify_bounded_m2.json", 0},
      {"--format structured prove " + c + "proofs/p02_cut_subst.prf " + c +
           "demo_safety.thy",
       "prove_p02.json", 0},
      {"--format structured prove " + c + "proofs/p20_detax.prf " + c +
           "demo_clopen.thy",
       "prove_p20.json", 0},
      {"--format structured eval " + c + "demo_safety.thy " + c +
           "m2.str --formula \"forall [x:s] exists [y:s] (x = y)\"",
       "eval_true.json", 0},
      {"--format structured eval " + c + "demo_safety.thy " + c +
           "m2.str --formula \"(zero = one)\"",
       "eval_false.json", 1},
      {"--format structured solve " + c + "demo_safety.thy " + c +
           "m2.str --formula \"hetAE { len: omega; sched: [[x:s], [y:s]]; "
           "payoff: safety(2)[true, (v0 = v1)] }\"",
       "solve_copycat.json", 0},
      {"--format structured force " + c + "em2.krp " + c +
           "demo_int.thy --node r --formula \"or(P(zero), not(P(zero)))\"",
       "force_em_root.json", 1},
      {"--format structured force " + c + "em2.krp " + c +
           "demo_int.thy --node t --formula \"or(P(zero), not(P(zero)))\"",
       "force_em_top.json", 0},
      {"--format structured oracle " + c + "demo_safety.thy " + c + "m2.str",
       "oracle_m2.json", 0},
      {"--format structured morleyize " + c + "prop.thy", "morleyize_prop.json", 0},
      {"--format structured check " + c + "demo_safety.thy", "check_safety.json", 0},
      {"--format structured check " + c + "demo.sig", "check_sig.json", 0},
  };
}

}  // namespace

TEST_CASE("exit codes and byte-stable structured reports", "[cli]") {
  for (auto& g : goldens()) {
    CAPTURE(g.args);
    RunResult first = run(g.args);
    CHECK(first.exit_code == g.exit_code);
    CHECK(first.output == slurp(corpus() + "/expected/" + g.expected_file));
    RunResult second = run("--seed 7 " + g.args);
    CHECK(second.output == first.output);  // byte-identical across runs
  }
}

TEST_CASE("every bundled proof script is accepted", "[cli]") {
  std::string c = corpus() + "/";
  std::vector<std::string> safety = {
      "p01_identity", "p02_cut_subst", "p03_eqrefl", "p04_eqsubst", "p05_conj",
      "p06_disj",     "p07_impl",      "p08_exists", "p09_forall",  "p10_existsintro",
      "p11_em",       "p12_em_leaf",   "p13_tt",     "p14_hetax1",  "p15_hetax2",
      "p16_hetax3",   "p17_hetax4",    "p18_presax1", "p19_presax2"};
  for (auto& name : safety) {
    CAPTURE(name);
    CHECK(run("prove " + c + "proofs/" + name + ".prf " + c + "demo_safety.thy")
              .exit_code == 0);
  }
  CHECK(run("prove " + c + "proofs/p20_detax.prf " + c + "demo_clopen.thy").exit_code ==
        0);
  SECTION("morleyized proofs over the extended theories") {
    for (auto& name : {"mp01_map", "mp02_partition", "mp03_lift"})
      CHECK(run("prove " + c + "morley/" + std::string(name) + ".prf " + c +
                "morley/prop_m.thy")
                .exit_code == 0);
    CHECK(run("prove " + c + "morley/mp04_het_transfer.prf " + c +
              "morley/demo_clopen_m.thy")
              .exit_code == 0);
  }
}

TEST_CASE("print and parse round trip on every corpus object", "[cli]") {
  using namespace hetlog;
  namespace fs = std::filesystem;
  Theory safety = parse_theory(slurp(corpus() + "/demo_safety.thy"));
  Theory clopen = parse_theory(slurp(corpus() + "/demo_clopen.thy"));
  int objects = 0;
  for (auto& entry : fs::recursive_directory_iterator(corpus())) {
    if (!entry.is_regular_file()) continue;
    std::string path = entry.path().string();
    std::string ext = entry.path().extension().string();
    if (entry.path().filename() == "bad.thy") continue;  // deliberately malformed
    CAPTURE(path);
    if (ext == ".thy") {
      Theory t = parse_theory(slurp(path));
      CHECK(print_theory(parse_theory(print_theory(t))) == print_theory(t));
      ++objects;
    } else if (ext == ".str") {
      const Signature& sig = path.find("prop") != std::string::npos
                                 ? parse_theory(slurp(corpus() + "/prop.thy")).signature
                                 : safety.signature;
      Structure m = parse_structure(slurp(path), sig);
      CHECK(print_structure(parse_structure(print_structure(m), sig)) ==
            print_structure(m));
      ++objects;
    } else if (ext == ".prf") {
      static const Theory prop_m = parse_theory(slurp(corpus() + "/morley/prop_m.thy"));
      static const Theory clopen_m =
          parse_theory(slurp(corpus() + "/morley/demo_clopen_m.thy"));
      bool done = false;
      const Theory* candidates[] = {&safety, &clopen, &prop_m, &clopen_m};
      for (const Theory* t : candidates) {
        try {
          ProofPtr p = parse_proof(slurp(path), *t);
          CHECK(print_proof(parse_proof(print_proof(p), *t)) == print_proof(p));
          ++objects;
          done = true;
          break;
        } catch (const SyntaxError&) {
          continue;  // belongs to another theory
        }
      }
      CHECK(done);
    } else if (ext == ".krp") {
      KripkeModel k = parse_kripke(slurp(path), safety.signature);
      CHECK(print_kripke(parse_kripke(print_kripke(k), safety.signature)) ==
            print_kripke(k));
      ++objects;
    }
  }
  CHECK(objects >= 25);
}

TEST_CASE("usage and parse failures exit with 2", "[cli]") {
  std::string c = corpus() + "/";
  CHECK(run("check " + c + "bad.thy").exit_code == 2);
  CHECK(run("eval " + c + "demo_safety.thy --formula \"P(zero)\"").exit_code == 2);
  CHECK(run("nonsense").exit_code == 2);
}

TEST_CASE("interactive play follows the strategy", "[cli]") {
  std::string c = corpus() + "/";
  std::string formula =
      "\"hetAE { len: omega; sched: [[x:s], [y:s]]; payoff: safety(2)[true, (v0 = v1)] }\"";
  RunResult res = run("play " + c + "demo_safety.thy " + c + "m2.str --formula " +
                          formula + " --side forall",
                      "b\nb\nquit\n");
  CHECK(res.exit_code == 0);
  // The engine copies each universal move, so the monitor stays alive.
  CHECK(res.output.find("engine plays b") != std::string::npos);
  CHECK(res.output.find("you win from the initial position") == std::string::npos);
  CHECK(res.output.find("opponent wins from initial position") != std::string::npos);
  RunResult res2 = run("play " + c + "demo_clopen.thy " + c + "m2.str --formula " +
                           "\"hetAE { len: omega; sched: [[x:s]]; payoff: reach(1)[(v0 = one)] }\"" +
                           " --side exists",
                       "b\n");
  CHECK(res2.output.find("game over: exists wins") != std::string::npos);
}
