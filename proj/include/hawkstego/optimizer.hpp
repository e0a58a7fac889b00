#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hawkstego {

/// Box-bounded maximization problem. The objective must be deterministic and,
/// when OptimizerParams::threads > 1, safe to call concurrently.
struct SearchProblem {
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<double(std::span<const double>)> objective;

  std::size_t dimension() const noexcept { return lower.size(); }
  /// Throws InvalidBounds.
  void validate() const;
};

struct OptimizerParams {
  int population_size = 30;
  int max_iterations = 200;
  /// 0 disables the stagnation stop.
  int stagnation_window = 30;
  double stagnation_epsilon = 1e-6;
  double levy_beta = 1.5;
  std::uint64_t seed = 0x5EED'4A11'C0DEULL;
  /// Hard cap on objective calls; 0 means unlimited.
  std::int64_t max_evaluations = 0;
  /// Worker threads for objective evaluation. Results do not depend on it.
  unsigned threads = 1;

  /// Throws InvalidArgument.
  void validate() const;
};

struct OptimizationResult {
  std::vector<double> best_position;
  double best_fitness = 0.0;
  /// Best-so-far fitness after each iteration.
  std::vector<double> history;
  /// Cumulative objective calls after each iteration.
  std::vector<std::int64_t> evaluation_trace;
  int iterations_run = 0;
  std::int64_t evaluations = 0;

  friend bool operator==(const OptimizationResult&, const OptimizationResult&) = default;
};

enum class OptimizerKind { Hho, Random };

std::string_view to_string(OptimizerKind kind) noexcept;
/// Accepts "hho" or "random"; throws InvalidArgument otherwise.
OptimizerKind parse_optimizer_kind(std::string_view name);

/// 2 E0 (1 - t / T).
double escape_energy(double initial_energy, int iteration, int max_iterations);

/// Mantegna's sigma_u for a Levy-stable exponent beta.
double mantegna_sigma(double beta);

/// Mantegna Levy-flight step: u / |v|^(1/beta), u ~ N(0, sigma_u^2), v ~ N(0, 1).
std::vector<double> levy_step(std::size_t dim, double beta, std::mt19937_64& rng);

/// True iff history has at least window + 1 entries and the improvement over
/// the last window iterations is below epsilon.
bool detect_stagnation(std::span<const double> history, int window, double epsilon);

OptimizationResult hho_optimize(const SearchProblem& problem, const OptimizerParams& params);
OptimizationResult random_search(const SearchProblem& problem, const OptimizerParams& params);
/// Params for a baseline run that spends exactly `evaluations` objective
/// calls: enough iterations to reach the cap, stagnation stop disabled.
OptimizerParams budget_matched_params(const OptimizerParams& params, std::int64_t evaluations);

OptimizationResult run_optimizer(OptimizerKind kind, const SearchProblem& problem, const OptimizerParams& params);

/// CSV with header iteration,best_fitness,evaluations (iterations from 1).
void write_history_csv(std::ostream& out, const OptimizationResult& result);

}  // namespace hawkstego
