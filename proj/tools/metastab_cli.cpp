#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <metastab/metastab.hpp>

namespace {

void write_report(const nlohmann::ordered_json& report, const std::string& out_path) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw metastab::config_error("--out: cannot write file '" + out_path + "'");
  f << text;
  if (!f) throw metastab::config_error("--out: write failed for '" + out_path + "'");
}

std::vector<std::string> split_atoms(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t at = csv.find(',', start);
    if (at == std::string::npos) at = csv.size();
    std::string item = csv.substr(start, at - start);
    // trim surrounding blanks so "p, q" works
    std::size_t b = item.find_first_not_of(" \t");
    std::size_t e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
    start = at + 1;
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative convergence toolkit: certify, refute, and synthesize uniform "
               "oscillation bounds for families of sequences."};
  app.require_subcommand(1);
  app.fallthrough();

  unsigned threads = 1;
  bool no_timing = false;
  double tolerance = 1e-9;
  std::string out_path;
  app.add_option("--threads", threads, "worker threads (never affects report content)")
      ->capture_default_str();
  app.add_flag("--no-timing", no_timing, "omit the timing block (byte-stable reports)");
  app.add_option("--tolerance", tolerance, "float64-lane comparison tolerance")
      ->capture_default_str();
  app.add_option("--out", out_path, "write the report here instead of stdout");

  const std::string sampling_help = "pairs:L | interval:W:L | straddle:C[:L] | @file.json";
  const std::string family_help =
      "monotone01:H | alternating:P:H | cesaro:H:EXPR | expr:H:EXPR[;EXPR...] | @file.csv";
  const std::string rate_help = "const:N | maxeta0plus1 | expr:TEXT | @file.json";

  metastab::analyze_config acfg;
  auto* analyze = app.add_subcommand(
      "analyze", "Cauchy index, witness search, and refuting prefixes for one sequence");
  analyze->add_option("--expr", acfg.expr_text, "closed-form sequence in n (exact lane)");
  analyze->add_option("--trace", acfg.trace_path, "CSV trace file (float64 lane)");
  analyze->add_option("--row", acfg.row, "trace row to analyze")->capture_default_str();
  analyze->add_option("--horizon", acfg.horizon, "number of terms to evaluate (with --expr)");
  analyze->add_option("--epsilon", acfg.epsilons, "oscillation threshold (repeatable)");
  analyze->add_option("--sampling", acfg.sampling, "witness target: " + sampling_help);
  analyze->add_option("--refute-length", acfg.refute_length,
                      "also search for a refuting pair sampling of this length");

  metastab::certify_config ccfg;
  auto* certify = app.add_subcommand(
      "certify", "check a claimed uniform rate against a family, else report the failure");
  certify->add_option("--family", ccfg.family, family_help)->required();
  certify->add_option("--epsilon", ccfg.epsilons, "oscillation threshold (repeatable)");
  certify->add_option("--sampling", ccfg.samplings, "sampling source (repeatable): " + sampling_help);
  certify->add_option("--rate", ccfg.rate, rate_help)->required();

  metastab::refute_config rcfg;
  auto* refute = app.add_subcommand(
      "refute", "try to defeat a claimed constant bound with a concrete counterexample");
  refute->add_option("--family", rcfg.family, family_help)->required();
  refute->add_option("--epsilon", rcfg.epsilons, "oscillation threshold (exactly one)");
  refute->add_option("--bound", rcfg.bound, "claimed uniform bound (>= 1)")->required();
  refute->add_option("--strategy", rcfg.strategy, "adversary | exhaustive")
      ->capture_default_str();

  metastab::synth_config scfg;
  auto* synth = app.add_subcommand(
      "synth", "synthesize the least constant bound certifiable at the horizon");
  synth->add_option("--family", scfg.family, family_help)->required();
  synth->add_option("--epsilon", scfg.epsilons, "oscillation threshold (repeatable)");
  synth->add_option("--sampling", scfg.samplings, "sampling source (repeatable): " + sampling_help);

  metastab::prop23_config pcfg;
  auto* prop23 = app.add_subcommand(
      "prop23", "step-vs-constant function family: pointwise moduli vs uniform bound");
  prop23->add_option("--points", pcfg.points, "number of evaluation points (>= 1)")->required();
  prop23->add_option("--horizon", pcfg.horizon, "sequence length (default: 2 * points)");
  prop23->add_option("--epsilon", pcfg.epsilons, "oscillation threshold (repeatable)");
  prop23->add_option("--sampling", pcfg.sampling,
                     sampling_help + " (default: pairs:horizon-1)");

  metastab::logic_config lcfg;
  std::string atoms_csv;
  auto* logic = app.add_subcommand(
      "logic", "truth-value sequences of sentences over a theory's model grid");
  logic->add_option("--atoms", atoms_csv, "comma-separated atom names, e.g. p,q")->required();
  logic->add_option("--theory", lcfg.theory_path, "theory file, one formula per line");
  logic->add_option("--sentences", lcfg.sentences_path, "sentence file, one per line in order");
  logic->add_option("--template", lcfg.template_text,
                    "sentence template in n, e.g. half^n(neg(p))");
  logic->add_option("--horizon", lcfg.horizon, "sentences to expand (with --template)");
  logic->add_option("--grid-resolution", lcfg.resolution,
                    "valuation grid steps per atom (>= 1)")->required();
  logic->add_option("--epsilon", lcfg.epsilons, "oscillation threshold (repeatable)");
  logic->add_option("--sampling", lcfg.sampling,
                    sampling_help + " (default: pairs:sentences-1)");

  metastab::gen_sampling_config gcfg;
  auto* gen = app.add_subcommand("gen-sampling",
                                 "expand a sampling source to its JSON file form");
  gen->add_option("--sampling", gcfg.sampling, sampling_help)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (threads < 1) throw metastab::config_error("--threads: must be >= 1");
    if (!(tolerance > 0.0) || !std::isfinite(tolerance))
      throw metastab::config_error("--tolerance: must be a finite value > 0");
    metastab::run_context ctx;
    ctx.threads = threads;
    ctx.timing = !no_timing;
    ctx.tolerance = tolerance;

    metastab::driver_result result;
    if (*analyze) {
      result = metastab::run_analyze(acfg, ctx);
    } else if (*certify) {
      result = metastab::run_certify(ccfg, ctx);
    } else if (*refute) {
      result = metastab::run_refute(rcfg, ctx);
    } else if (*synth) {
      result = metastab::run_synth(scfg, ctx);
    } else if (*prop23) {
      result = metastab::run_prop23(pcfg, ctx);
    } else if (*logic) {
      lcfg.atoms = split_atoms(atoms_csv);
      result = metastab::run_logic(lcfg, ctx);
    } else if (*gen) {
      result = metastab::run_gen_sampling(gcfg, ctx);
    } else {
      throw metastab::internal_error("no subcommand dispatched");
    }
    write_report(result.report, out_path);
    return result.exit_code;
  } catch (const metastab::internal_error& e) {
    std::cerr << "metastab: internal error: " << e.what() << "\n";
    return 4;
  } catch (const metastab::out_of_horizon_error& e) {
    std::cerr << "metastab: internal error: " << e.what() << "\n";
    return 4;
  } catch (const metastab::error& e) {
    std::cerr << "metastab: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "metastab: internal error: " << e.what() << "\n";
    return 4;
  }
}
