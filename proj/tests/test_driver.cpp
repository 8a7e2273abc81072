#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "testutil.hpp"

using namespace metastab;
namespace fs = std::filesystem;

namespace {

// Scratch directory shared by the whole binary; file names stay unique via a
// counter so individual sections cannot collide.
const fs::path& scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("metastab-driver-test-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path scratch_file(const std::string& stem) {
  static int counter = 0;
  return scratch_dir() / (std::to_string(counter++) + "-" + stem);
}

fs::path write_file(const std::string& stem, const std::string& content) {
  fs::path p = scratch_file(stem);
  std::ofstream f(p);
  f << content;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(METASTAB_CLI_PATH) + " " + args;
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("sampling sources parse or fail loudly") {
  REQUIRE(parse_sampling_source("pairs:3") == pairs_sampling(3));
  REQUIRE(parse_sampling_source("interval:2:4") == interval_sampling(2, 4));
  REQUIRE(parse_sampling_source("straddle:5") == straddle_sampling(5));
  REQUIRE(parse_sampling_source("straddle:5:8") == straddle_sampling(5, 8));

  std::ostringstream ss;
  save_sampling(ss, straddle_sampling(4, 7));
  fs::path p = write_file("eta.json", ss.str());
  REQUIRE(parse_sampling_source("@" + p.string()) == straddle_sampling(4, 7));

  REQUIRE_THROWS_AS(parse_sampling_source(""), config_error);
  REQUIRE_THROWS_AS(parse_sampling_source("pairs"), config_error);
  REQUIRE_THROWS_AS(parse_sampling_source("pairs:x"), config_error);
  REQUIRE_THROWS_AS(parse_sampling_source("bogus:1"), config_error);
  REQUIRE_THROWS_AS(parse_sampling_source("@" + (scratch_dir() / "missing.json").string()),
                    config_error);
  fs::path bad = write_file("eta-bad.json", "{\"levels\": [[1], [0]]}");
  REQUIRE_THROWS_WITH(parse_sampling_source("@" + bad.string()),
                      Catch::Matchers::ContainsSubstring(bad.string()));
}

TEST_CASE("rate sources parse or fail loudly") {
  REQUIRE(parse_rate_source("const:4").which() == rate_bound::kind::constant);
  REQUIRE(parse_rate_source("maxeta0plus1").which() == rate_bound::kind::max_eta0_plus_1);
  sampling_prefix eta = pairs_sampling(4);
  REQUIRE(parse_rate_source("expr:2/eps").eval({0, rational(1, 2), 0, eta}) == 4);

  fs::path p = write_file("rate.json", rate_bound::constant(6).to_json().dump());
  REQUIRE(parse_rate_source("@" + p.string()).eval({0, rational(1), 0, eta}) == 6);

  REQUIRE_THROWS_AS(parse_rate_source(""), config_error);
  REQUIRE_THROWS_AS(parse_rate_source("const:0"), config_error);
  REQUIRE_THROWS_AS(parse_rate_source("expr:1 +"), config_error);
  REQUIRE_THROWS_AS(parse_rate_source("wat"), config_error);
  fs::path garbled = write_file("rate-bad.json", "{nope");
  REQUIRE_THROWS_WITH(parse_rate_source("@" + garbled.string()),
                      Catch::Matchers::ContainsSubstring("invalid JSON"));
}

TEST_CASE("family sources parse or fail loudly") {
  loaded_family mono = load_family_source("monotone01:8");
  REQUIRE(mono.exact);
  REQUIRE(mono.size() == 16);
  REQUIRE(mono.horizon() == 8);

  loaded_family alt = load_family_source("alternating:10:32");
  REQUIRE(alt.exact_family->has_adversary());
  REQUIRE(alt.size() == 6);

  loaded_family ces = load_family_source("cesaro:8:mod(n, 2)");
  REQUIRE(ces.provenance() == "cesaro(H=8, base=mod(n, 2))");

  loaded_family two = load_family_source("expr:6:n;1/2");
  REQUIRE(two.size() == 2);
  REQUIRE(two.exact_family->sample.member(0).label() == "expr@0");

  fs::path tr = write_file("trace.csv", "0.5,0.25,0.125\n1,1,1\n");
  loaded_family traced = load_family_source("@" + tr.string());
  REQUIRE_FALSE(traced.exact);
  REQUIRE(traced.size() == 2);
  REQUIRE(traced.horizon() == 3);
  REQUIRE(traced.trace_family->sample.member(0).at(1) == 0.25);

  REQUIRE_THROWS_AS(load_family_source(""), config_error);
  REQUIRE_THROWS_AS(load_family_source("monotone01"), config_error);
  REQUIRE_THROWS_AS(load_family_source("alternating:5"), config_error);
  REQUIRE_THROWS_AS(load_family_source("cesaro:8"), config_error);
  REQUIRE_THROWS_AS(load_family_source("expr:x:n"), config_error);
  REQUIRE_THROWS_AS(load_family_source("expr:8:n $"), config_error);
  REQUIRE_THROWS_AS(load_family_source("@" + (scratch_dir() / "nope.csv").string()),
                    config_error);
}

TEST_CASE("analyze runs over expressions and traces") {
  run_context ctx;

  analyze_config cfg;
  cfg.expr_text = "1/(n+1)";
  cfg.horizon = 32;
  cfg.epsilons = {"1/10"};
  cfg.sampling = "pairs:8";
  cfg.refute_length = 4;
  driver_result res = run_analyze(cfg, ctx);
  REQUIRE(res.exit_code == 0);
  const auto& rep = res.report;
  REQUIRE(rep["schema_version"] == 1);
  REQUIRE(rep["tool"] == "metastab");
  REQUIRE(rep["command"] == "analyze");
  REQUIRE(rep["lane"] == "exact");
  REQUIRE(rep["config"]["expr"] == "1/(n+1)");
  REQUIRE_FALSE(rep["config"].contains("tolerance"));
  REQUIRE_FALSE(rep["config"].contains("threads"));
  REQUIRE(rep.contains("timing"));
  REQUIRE(rep["result"]["label"] == "1/(n + 1)");
  REQUIRE(rep["result"]["source"] == "expression");
  const auto& e0 = rep["result"]["per_epsilon"][0];
  REQUIRE(e0["cauchy_index"] == 7);
  REQUIRE(e0["informative"] == true);
  REQUIRE(e0["witness"]["level"] == 2);
  REQUIRE_FALSE(e0["refuting_sampling"].is_null());

  // an alternating tail at the horizon edge is honest about not knowing
  analyze_config alt;
  alt.expr_text = "mod(n, 2)";
  alt.horizon = 8;
  alt.epsilons = {"1/2"};
  driver_result res2 = run_analyze(alt, ctx);
  REQUIRE(res2.exit_code == 2);
  REQUIRE(res2.report["result"]["verdict"] == "inconclusive");
  REQUIRE(res2.report["result"]["per_epsilon"][0]["cauchy_index"] == 7);
  REQUIRE(res2.report["result"]["per_epsilon"][0]["informative"] == false);

  fs::path tr = write_file("analyze.csv", "1.0,1.0,1.0,1.0\n");
  analyze_config tcfg;
  tcfg.trace_path = tr.string();
  tcfg.epsilons = {"1/10"};
  driver_result res3 = run_analyze(tcfg, ctx);
  REQUIRE(res3.exit_code == 0);
  REQUIRE(res3.report["lane"] == "float64");
  REQUIRE(res3.report["config"]["tolerance"] == 1e-9);
  REQUIRE(res3.report["result"]["per_epsilon"][0]["cauchy_index"] == 0);

  analyze_config both = cfg;
  both.trace_path = tr.string();
  REQUIRE_THROWS_AS(run_analyze(both, ctx), config_error);
  analyze_config neither;
  neither.epsilons = {"1/2"};
  REQUIRE_THROWS_AS(run_analyze(neither, ctx), config_error);
  analyze_config nohor = cfg;
  nohor.horizon = 0;
  REQUIRE_THROWS_AS(run_analyze(nohor, ctx), config_error);
  analyze_config far = cfg;
  far.sampling = "pairs:32";  // index 32 at horizon 32
  REQUIRE_THROWS_AS(run_analyze(far, ctx), config_error);
  analyze_config badrow = tcfg;
  badrow.row = 5;
  REQUIRE_THROWS_AS(run_analyze(badrow, ctx), config_error);
  analyze_config noeps = cfg;
  noeps.epsilons = {};
  REQUIRE_THROWS_AS(run_analyze(noeps, ctx), config_error);
}

TEST_CASE("certify runs and embeds a replayable refutation on failure") {
  run_context ctx;
  certify_config cfg;
  cfg.family = "monotone01:8";
  cfg.epsilons = {"1/2"};
  cfg.samplings = {"straddle:5:8"};
  cfg.rate = "maxeta0plus1";
  driver_result ok = run_certify(cfg, ctx);
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.report["result"]["verdict"] == "certified-at-horizon");
  REQUIRE(ok.report["result"]["certificate"]["kind"] == "uniform-certificate");
  REQUIRE(ok.report["config"]["rate"] == "maxeta0plus1");

  certify_config low = cfg;
  low.rate = "const:5";
  driver_result bad = run_certify(low, ctx);
  REQUIRE(bad.exit_code == 1);
  REQUIRE(bad.report["result"]["verdict"] == "refuted");
  refutation<rational> ref =
      refutation_from_json<rational>(bad.report["result"]["refutation"]);
  REQUIRE(replay_refutation(gen_monotone01(8).sample, ref));
  REQUIRE(ref.member == "up@5");

  // rate loaded from a file behaves identically
  fs::path rj = write_file("rate6.json", rate_bound::constant(6).to_json().dump());
  certify_config filed = cfg;
  filed.rate = "@" + rj.string();
  REQUIRE(run_certify(filed, ctx).exit_code == 0);

  certify_config far = cfg;
  far.samplings = {"pairs:8"};  // touches index 8, horizon is 8
  REQUIRE_THROWS_WITH(run_certify(far, ctx),
                      Catch::Matchers::ContainsSubstring("family horizon is 8"));
  certify_config nosamp = cfg;
  nosamp.samplings = {};
  REQUIRE_THROWS_AS(run_certify(nosamp, ctx), config_error);
}

TEST_CASE("refute reports a counterexample or says none was found") {
  run_context ctx;
  refute_config cfg;
  cfg.family = "alternating:110:128";
  cfg.epsilons = {"1/2"};
  cfg.bound = 3;
  driver_result hit = run_refute(cfg, ctx);
  REQUIRE(hit.exit_code == 1);
  REQUIRE(hit.report["result"]["outcome"] == "refuted");
  REQUIRE(hit.report["result"]["refutation"]["member"] == "alt@8");

  refute_config toobig = cfg;
  toobig.bound = 60;  // needs prefix 122 > max prefix 110: adversary declines
  driver_result miss = run_refute(toobig, ctx);
  REQUIRE(miss.exit_code == 0);
  REQUIRE(miss.report["result"]["outcome"] == "no-refutation-found");
  REQUIRE(miss.report["result"]["verdict"] == "no-refutation-found");
  REQUIRE_FALSE(miss.report["result"].contains("refutation"));
  REQUIRE(miss.report["result"].contains("note"));

  refute_config ex;
  ex.family = "monotone01:8";
  ex.epsilons = {"1/2"};
  ex.bound = 2;
  ex.strategy = "exhaustive";
  driver_result found = run_refute(ex, ctx);
  REQUIRE(found.exit_code == 1);
  REQUIRE(found.report["result"]["refutation"]["member"] == "up@2");

  refute_config bad = cfg;
  bad.strategy = "guess";
  REQUIRE_THROWS_AS(run_refute(bad, ctx), config_error);
  refute_config zero = cfg;
  zero.bound = 0;
  REQUIRE_THROWS_AS(run_refute(zero, ctx), config_error);
  refute_config twoeps = cfg;
  twoeps.epsilons = {"1/2", "1/4"};
  REQUIRE_THROWS_AS(run_refute(twoeps, ctx), config_error);
}

TEST_CASE("synth reports the least certifiable bound or why there is none") {
  run_context ctx;
  synth_config cfg;
  cfg.family = "monotone01:8";
  cfg.epsilons = {"1/2"};
  cfg.samplings = {"straddle:5:8"};
  driver_result res = run_synth(cfg, ctx);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.report["result"]["rate"] == 6);
  REQUIRE(res.report["result"]["synthesis"]["kind"] == "rate-synthesis");

  synth_config osc;
  osc.family = "expr:4:mod(n, 2)";
  osc.epsilons = {"1/2"};
  osc.samplings = {"pairs:3"};
  driver_result ref = run_synth(osc, ctx);
  REQUIRE(ref.exit_code == 1);
  REQUIRE(ref.report["result"]["rate"].is_null());
  REQUIRE(ref.report["result"]["verdict"] == "refuted");
}

TEST_CASE("prop23 wires the instance through both analyses") {
  run_context ctx;
  prop23_config cfg;
  cfg.points = 4;
  cfg.epsilons = {"1/2"};
  driver_result res = run_prop23(cfg, ctx);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.report["config"]["horizon"] == 8);
  REQUIRE(res.report["config"]["sampling"] == "pairs:7");
  const auto& e0 = res.report["result"]["per_epsilon"][0];
  REQUIRE(e0["uniform"]["rate"] == 6);
  std::vector<std::size_t> moduli;
  for (const auto& p : e0["pointwise"]["points"]) moduli.push_back(p["modulus"]);
  REQUIRE(moduli == std::vector<std::size_t>{0, 1, 3, 5});

  prop23_config zero;
  zero.points = 0;
  zero.epsilons = {"1/2"};
  REQUIRE_THROWS_AS(run_prop23(zero, ctx), config_error);
  prop23_config far = cfg;
  far.sampling = "pairs:8";
  REQUIRE_THROWS_AS(run_prop23(far, ctx), config_error);
}

TEST_CASE("logic runs templates, files, and vacuous theories") {
  run_context ctx;
  logic_config cfg;
  cfg.atoms = {"p"};
  cfg.template_text = "half^n(neg(p))";
  cfg.horizon = 8;
  cfg.resolution = 4;
  cfg.epsilons = {"1/10"};
  driver_result res = run_logic(cfg, ctx);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.report["config"]["sampling"] == "pairs:7");
  REQUIRE(res.report["result"]["model_count"] == 5);
  REQUIRE(res.report["result"]["sentence_count"] == 8);
  REQUIRE(res.report["result"]["empty_model_class"] == false);
  REQUIRE(res.report["result"]["per_epsilon"][0]["uniform"]["rate"] == 4);

  fs::path thy = write_file("contradiction.thy", "min(p, neg(p))\n");
  logic_config vac = cfg;
  vac.theory_path = thy.string();
  driver_result v = run_logic(vac, ctx);
  REQUIRE(v.exit_code == 0);
  REQUIRE(v.report["result"]["empty_model_class"] == true);
  REQUIRE(v.report["result"]["model_count"] == 0);
  REQUIRE(v.report["result"]["per_epsilon"][0].contains("note"));
  REQUIRE(v.report["result"]["theory"][0] == "min(p, neg(p))");

  fs::path sen = write_file("sentences.txt", "neg(p)\nhalf(neg(p))\n");
  logic_config filed;
  filed.atoms = {"p"};
  filed.sentences_path = sen.string();
  filed.resolution = 2;
  filed.epsilons = {"1/2"};
  driver_result f = run_logic(filed, ctx);
  REQUIRE(f.report["result"]["sentence_count"] == 2);
  REQUIRE(f.report["config"]["sampling"] == "pairs:1");

  logic_config both = cfg;
  both.sentences_path = sen.string();
  REQUIRE_THROWS_AS(run_logic(both, ctx), config_error);
  logic_config nores = cfg;
  nores.resolution = 0;
  REQUIRE_THROWS_AS(run_logic(nores, ctx), config_error);
  logic_config nohor = cfg;
  nohor.horizon = 0;
  REQUIRE_THROWS_AS(run_logic(nohor, ctx), config_error);
  logic_config badatom = cfg;
  badatom.atoms = {"p", "min"};
  REQUIRE_THROWS_AS(run_logic(badatom, ctx), config_error);
}

TEST_CASE("gen-sampling emits the bare loadable object") {
  run_context ctx;
  gen_sampling_config cfg;
  cfg.sampling = "straddle:3";
  driver_result res = run_gen_sampling(cfg, ctx);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.report == straddle_sampling(3).to_json());
  std::istringstream back(res.report.dump());
  REQUIRE(load_sampling(back) == straddle_sampling(3));
}

TEST_CASE("reports drop the timing block on request and ignore thread count") {
  certify_config cfg;
  cfg.family = "monotone01:16";
  cfg.epsilons = {"1/2", "1/10"};
  cfg.samplings = {"pairs:8", "straddle:9:16"};
  cfg.rate = "maxeta0plus1";

  run_context quiet1;
  quiet1.timing = false;
  quiet1.threads = 1;
  run_context quiet4;
  quiet4.timing = false;
  quiet4.threads = 4;
  driver_result a = run_certify(cfg, quiet1);
  driver_result b = run_certify(cfg, quiet4);
  REQUIRE_FALSE(a.report.contains("timing"));
  REQUIRE(a.report.dump() == b.report.dump());

  run_context timed;
  REQUIRE(run_certify(cfg, timed).report.contains("timing"));
}

TEST_CASE("the command line binary honors the exit code contract") {
  fs::path out = scratch_file("synth.json");
  REQUIRE(run_cli("synth --family monotone01:8 --epsilon 1/2 --sampling straddle:5:8 --out " +
                  out.string()) == 0);
  nlohmann::json rep = nlohmann::json::parse(read_file(out));
  REQUIRE(rep["result"]["rate"] == 6);
  REQUIRE(rep["tool"] == "metastab");

  fs::path cert_out = scratch_file("certify.json");
  REQUIRE(run_cli("certify --family monotone01:8 --epsilon 1/2 --sampling straddle:5:8 "
                  "--rate const:5 --out " +
                  cert_out.string()) == 1);
  nlohmann::json crep = nlohmann::json::parse(read_file(cert_out));
  REQUIRE(crep["result"]["refutation"]["member"] == "up@5");

  REQUIRE(run_cli("analyze --expr 'mod(n, 2)' --horizon 8 --epsilon 1/2 >/dev/null") == 2);

  fs::path err = scratch_file("stderr.txt");
  REQUIRE(run_cli("analyze --expr 'mod(n' --horizon 8 --epsilon 1/2 2> " + err.string()) == 3);
  REQUIRE_THAT(read_file(err), Catch::Matchers::ContainsSubstring("metastab:"));
  REQUIRE(run_cli("certify --family monotone01:8 --rate const:1 --epsilon 0 "
                  "--sampling pairs:2 2>/dev/null") == 3);
  REQUIRE(run_cli("--definitely-not-a-flag >/dev/null 2>&1") == 3);
  REQUIRE(run_cli("refute --family monotone01:8 --epsilon 1/2 --bound 2 "
                  "--strategy adversary 2>/dev/null") == 3);  // family has no adversary

  REQUIRE(run_cli("--help >/dev/null") == 0);
  REQUIRE(run_cli("refute --family alternating:110:128 --epsilon 1/2 --bound 3 "
                  ">/dev/null") == 1);
}

TEST_CASE("the command line binary produces byte-identical reports across threads") {
  fs::path one = scratch_file("par1.json");
  fs::path four = scratch_file("par4.json");
  std::string common = "certify --family monotone01:16 --epsilon 1/2 --epsilon 1/10 "
                       "--sampling pairs:8 --sampling straddle:9:16 --rate maxeta0plus1 "
                       "--no-timing --out ";
  REQUIRE(run_cli("--threads 1 " + common + one.string()) == 0);
  REQUIRE(run_cli("--threads 4 " + common + four.string()) == 0);
  std::string b1 = read_file(one);
  REQUIRE_FALSE(b1.empty());
  REQUIRE(b1 == read_file(four));
  REQUIRE_FALSE(nlohmann::json::parse(b1).contains("timing"));
}

TEST_CASE("generated sampling files feed back into other commands") {
  fs::path eta = scratch_file("eta.json");
  REQUIRE(run_cli("gen-sampling --sampling straddle:5:8 --out " + eta.string()) == 0);
  std::ifstream f(eta);
  REQUIRE(load_sampling(f) == straddle_sampling(5, 8));
  REQUIRE(run_cli("synth --family monotone01:8 --epsilon 1/2 --sampling @" + eta.string() +
                  " >/dev/null") == 0);
}
