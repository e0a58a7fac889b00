#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hawkstego/error.hpp"
#include "hawkstego/stego_engine.hpp"

namespace hawkstego::cli {

/// Process exit codes. Stable; documented in the README.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kInvalidArguments = 2,
  kCapacityExceeded = 3,
  kInputError = 4,
  kKeyMismatch = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Seed used when --seed is absent. HAWKSTEGO_SEED overrides it.
inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr const char* kSeedEnvVar = "HAWKSTEGO_SEED";
std::uint64_t default_seed();

struct RunConfig {
  OptimizerKind optimizer = OptimizerKind::Hho;
  double alpha = 0.5;
  int hawks = 30;
  int max_iterations = 200;
  std::uint64_t seed = kDefaultSeed;
  int lsb_depth = 1;
  std::uint32_t block_size = 8;
  double variance_top_fraction = 0.5;
  int stagnation_window = 30;
  double stagnation_epsilon = 1e-6;
  unsigned threads = 1;

  std::filesystem::path cover;
  std::filesystem::path audio;
  std::filesystem::path stego;
  std::filesystem::path key;
  std::filesystem::path report;
  std::filesystem::path history;
  std::filesystem::path output;
  std::filesystem::path covers_dir;
  std::vector<std::uint64_t> seeds;
  std::vector<OptimizerKind> optimizers{OptimizerKind::Hho, OptimizerKind::Random};
  bool csv = false;

  PipelineSettings pipeline_settings() const;
};

// Each command reports errors on `err` and returns an ExitCode.
int cmd_embed(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand + kebab-case flags) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hawkstego::cli
