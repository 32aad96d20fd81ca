#pragma once

#include "pdm/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace pdm {

enum class InputFormat { wide_csv, voteview };

InputFormat input_format_from_string(const std::string& s);
const char* to_string(InputFormat f) noexcept;

struct RunConfig {
  std::filesystem::path input;   // wide CSV
  std::filesystem::path members; // voteview members file
  std::filesystem::path votes;   // voteview votes file
  InputFormat format = InputFormat::wide_csv;
  double minority_threshold = kDefaultMinorityThreshold;
  double sigma = kDefaultSigma;
  int null_reps = 25;
  int max_layers = 2;
  int rounds = kDefaultBoostRounds;
  int top_k = kDefaultTopK;
  std::uint64_t seed = 0;
  std::filesystem::path out = "pdm_out";
  std::string alpha_grid = "1:30:0.3";
  int trials = 100;
  std::optional<std::filesystem::path> decomposition;
  std::optional<std::filesystem::path> matrix_out;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Random-model stream used by every command that scores a decomposition.
inline constexpr std::uint64_t kEvalStream = 0x5eed;

/// Reads the vote matrix named by the config and applies the minority filter.
VoteMatrix load_filtered(const RunConfig& config, double threshold);

/// One-layer and (when present) two-layer PDM, minority and random models.
EvalTable build_eval_table(const VoteMatrix& v, const Decomposition& d, std::uint64_t seed);

// Each command writes its artifacts under config.out and returns an exit
// code. Failures print a one-line JSON error object to `err` and, when the
// output directory is writable, to <out>/error.json.
int cmd_analyze(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& log, std::ostream& err);

} // namespace pdm
