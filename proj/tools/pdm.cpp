// pdm: partitioned decomposition of roll call matrices.
//
//   pdm analyze  --input votes.csv --out run/
//   pdm analyze  --format voteview --members m.csv --votes v.csv --out run/
//   pdm eval     --input votes.csv --out run/
//   pdm simulate --alpha-grid 1:30:0.3 --trials 100 --out sim/

#include "pdm/commands.hpp"
#include "pdm/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

void add_input_flags(CLI::App* cmd, pdm::RunConfig& c, std::string& format) {
  cmd->add_option("--input", c.input, "Wide CSV vote matrix");
  cmd->add_option("--members", c.members, "Voteview members file");
  cmd->add_option("--votes", c.votes, "Voteview votes file");
  cmd->add_option("--format", format, "wide_csv or voteview")
      ->check(CLI::IsMember({"wide_csv", "voteview"}));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned decomposition of roll call matrices"};
  app.require_subcommand(1);

  pdm::RunConfig c;
  std::string format = "wide_csv";
  std::optional<std::uint64_t> seed;
  std::string decomposition, matrix_out;

  auto* analyze = app.add_subcommand("analyze", "Decompose, embed, explain and score a vote matrix");
  add_input_flags(analyze, c, format);
  analyze->add_option("--threshold", c.minority_threshold, "Minority filter fraction")
      ->check(CLI::Range(0.0, 0.5));
  analyze->add_option("--sigma", c.sigma, "Affinity bandwidth")->check(CLI::PositiveNumber);
  analyze->add_option("--null-reps", c.null_reps, "Permuted null matrices per layer")
      ->check(CLI::Range(1, 100000));
  analyze->add_option("--max-layers", c.max_layers, "Maximum number of layers")->check(CLI::Range(1, 100));
  analyze->add_option("--rounds", c.rounds, "Boosting rounds per cluster pair")->check(CLI::Range(1, 100000));
  analyze->add_option("--top-k", c.top_k, "Votes kept per cluster pair")->check(CLI::Range(1, 100000));

  auto* eval = app.add_subcommand("eval", "Re-score a stored decomposition");
  add_input_flags(eval, c, format);
  eval->add_option("--decomposition", decomposition, "Defaults to <out>/decomposition.json");

  auto* simulate = app.add_subcommand("simulate", "Party-loyalty simulation experiment");
  simulate->add_option("--alpha-grid", c.alpha_grid, "start:stop:step");
  simulate->add_option("--trials", c.trials, "Trials per alpha")->check(CLI::Range(1, 1000000));
  simulate->add_option("--matrix-out", matrix_out, "Also write one simulated matrix as wide CSV");

  for (auto* cmd : {analyze, eval, simulate}) {
    cmd->add_option("--seed", seed, "Random seed (falls back to PDM_SEED, then 0)");
    cmd->add_option("--out", c.out, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? pdm::kExitOk : pdm::kExitUsage;
  }

  if (seed) {
    c.seed = *seed;
  } else if (const char* env = std::getenv("PDM_SEED")) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      std::cerr << "PDM_SEED must be a non-negative integer\n";
      return pdm::kExitUsage;
    }
  }
  c.format = pdm::input_format_from_string(format);
  if (!decomposition.empty()) c.decomposition = decomposition;
  if (!matrix_out.empty()) c.matrix_out = matrix_out;

  if (analyze->parsed()) return pdm::cmd_analyze(c, std::cout, std::cerr);
  if (eval->parsed()) return pdm::cmd_eval(c, std::cout, std::cerr);
  return pdm::cmd_simulate(c, std::cout, std::cerr);
}
