#include "hawkstego/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include "hawkstego/error.hpp"

namespace hawkstego {

namespace {

// Levy leaps are measured in units of the search range and shrink with |E|.
constexpr double kLevyScale = 0.1;

enum class Phase : std::uint64_t { Init = 1, Update = 2, Sample = 3 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream per (phase, iteration, individual), so evaluation order
/// and thread count cannot influence the draws.
std::mt19937_64 substream(std::uint64_t seed, Phase phase, std::uint64_t iteration, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(phase));
  h = splitmix64(h ^ iteration);
  h = splitmix64(h ^ index);
  return std::mt19937_64(h);
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1U), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

void clamp_to_bounds(std::vector<double>& x, const SearchProblem& problem) {
  for (std::size_t d = 0; d < x.size(); ++d) {
    double v = x[d];
    if (std::isnan(v)) v = problem.lower[d];
    x[d] = std::clamp(v, problem.lower[d], problem.upper[d]);
  }
}

/// Best-so-far bookkeeping shared by both optimizers.
class Tracker {
 public:
  explicit Tracker(const OptimizerParams& params) : params_(params) {}

  void offer(const std::vector<double>& position, double fitness) {
    if (!best_ || fitness > result_.best_fitness) {
      best_ = true;
      result_.best_fitness = fitness;
      result_.best_position = position;
    }
  }

  void count(std::int64_t evaluations) { result_.evaluations += evaluations; }
  std::int64_t evaluations() const noexcept { return result_.evaluations; }
  double best_fitness() const noexcept { return result_.best_fitness; }
  const std::vector<double>& best_position() const noexcept { return result_.best_position; }

  /// Records one finished iteration; returns true when the run should stop.
  bool close_iteration() {
    ++result_.iterations_run;
    result_.history.push_back(result_.best_fitness);
    result_.evaluation_trace.push_back(result_.evaluations);
    return params_.stagnation_window > 0 &&
           detect_stagnation(result_.history, params_.stagnation_window, params_.stagnation_epsilon);
  }

  bool budget_exhausted() const noexcept {
    return params_.max_evaluations > 0 && result_.evaluations >= params_.max_evaluations;
  }

  OptimizationResult take() { return std::move(result_); }

 private:
  const OptimizerParams& params_;
  OptimizationResult result_;
  bool best_ = false;
};

struct HawkMove {
  std::vector<double> position;
  double fitness = 0.0;
  int evaluations = 0;
};

}  // namespace

void SearchProblem::validate() const {
  if (lower.empty()) throw Error(ErrorKind::InvalidBounds, "dimension must be positive");
  if (lower.size() != upper.size()) throw Error(ErrorKind::InvalidBounds, "lower/upper sizes differ");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || lower[d] > upper[d]) {
      throw Error(ErrorKind::InvalidBounds, "coordinate " + std::to_string(d) + " has invalid bounds");
    }
  }
  if (!objective) throw Error(ErrorKind::InvalidBounds, "objective is empty");
}

void OptimizerParams::validate() const {
  if (population_size < 2) throw Error(ErrorKind::InvalidArgument, "population_size must be at least 2");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be at least 1");
  if (stagnation_window < 0) throw Error(ErrorKind::InvalidArgument, "stagnation_window must be non-negative");
  if (!(stagnation_epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "stagnation_epsilon must be >= 0");
  if (!(levy_beta > 1.0 && levy_beta <= 2.0)) throw Error(ErrorKind::InvalidArgument, "levy_beta must lie in (1, 2]");
  if (max_evaluations < 0) throw Error(ErrorKind::InvalidArgument, "max_evaluations must be non-negative");
}

std::string_view to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::Hho ? "hho" : "random";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "hho") return OptimizerKind::Hho;
  if (name == "random") return OptimizerKind::Random;
  throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

double escape_energy(double initial_energy, int iteration, int max_iterations) {
  return 2.0 * initial_energy * (1.0 - static_cast<double>(iteration) / static_cast<double>(max_iterations));
}

double mantegna_sigma(double beta) {
  const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
  const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / beta);
}

std::vector<double> levy_step(std::size_t dim, double beta, std::mt19937_64& rng) {
  if (!(beta > 1.0 && beta <= 2.0)) throw Error(ErrorKind::InvalidArgument, "levy beta must lie in (1, 2]");
  std::normal_distribution<double> u_dist(0.0, mantegna_sigma(beta));
  std::normal_distribution<double> v_dist(0.0, 1.0);
  std::vector<double> step(dim);
  for (auto& s : step) {
    const double u = u_dist(rng);
    double v = 0.0;
    while (v == 0.0) v = v_dist(rng);
    s = u / std::pow(std::abs(v), 1.0 / beta);
  }
  return step;
}

bool detect_stagnation(std::span<const double> history, int window, double epsilon) {
  if (window < 1 || history.size() < static_cast<std::size_t>(window) + 1) return false;
  return history.back() - history[history.size() - 1 - static_cast<std::size_t>(window)] < epsilon;
}

OptimizationResult hho_optimize(const SearchProblem& problem, const OptimizerParams& params) {
  problem.validate();
  params.validate();
  const std::size_t dim = problem.dimension();
  const auto hawks = static_cast<std::size_t>(params.population_size);
  const int max_iter = params.max_iterations;
  Tracker tracker(params);

  std::vector<std::vector<double>> population(hawks, std::vector<double>(dim));
  std::vector<double> fitness(hawks);
  parallel_for(hawks, params.threads, [&](std::size_t i) {
    auto rng = substream(params.seed, Phase::Init, 0, i);
    for (std::size_t d = 0; d < dim; ++d) {
      population[i][d] = problem.lower[d] + uniform01(rng) * (problem.upper[d] - problem.lower[d]);
    }
    fitness[i] = problem.objective(population[i]);
  });
  tracker.count(static_cast<std::int64_t>(hawks));
  for (std::size_t i = 0; i < hawks; ++i) tracker.offer(population[i], fitness[i]);

  std::vector<HawkMove> moves(hawks);
  std::vector<double> mean(dim);
  for (int t = 0; t < max_iter && !tracker.budget_exhausted(); ++t) {
    const std::vector<double> rabbit = tracker.best_position();
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const auto& x : population) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] += x[d];
    }
    for (auto& m : mean) m /= static_cast<double>(hawks);

    parallel_for(hawks, params.threads, [&](std::size_t i) {
      auto rng = substream(params.seed, Phase::Update, static_cast<std::uint64_t>(t), i);
      const std::vector<double>& x = population[i];
      HawkMove& move = moves[i];
      move.position.assign(dim, 0.0);
      move.evaluations = 0;

      const double energy = escape_energy(2.0 * uniform01(rng) - 1.0, t, max_iter);
      const double abs_e = std::abs(energy);

      if (abs_e >= 1.0) {
        // Exploration: perch relative to a random hawk or to the flock mean.
        if (uniform01(rng) < 0.5) {
          const auto& other = population[std::uniform_int_distribution<std::size_t>(0, hawks - 1)(rng)];
          const double r1 = uniform01(rng);
          const double r2 = uniform01(rng);
          for (std::size_t d = 0; d < dim; ++d) {
            move.position[d] = other[d] - r1 * std::abs(other[d] - 2.0 * r2 * x[d]);
          }
        } else {
          const double r3 = uniform01(rng);
          const double r4 = uniform01(rng);
          for (std::size_t d = 0; d < dim; ++d) {
            const double span = problem.upper[d] - problem.lower[d];
            move.position[d] = (rabbit[d] - mean[d]) - r3 * (problem.lower[d] + r4 * span);
          }
        }
        clamp_to_bounds(move.position, problem);
        move.fitness = problem.objective(move.position);
        move.evaluations = 1;
        return;
      }

      const double escape = uniform01(rng);
      const double jump = 2.0 * (1.0 - uniform01(rng));
      if (escape >= 0.5) {
        if (abs_e >= 0.5) {
          // Soft besiege
          for (std::size_t d = 0; d < dim; ++d) {
            move.position[d] = (rabbit[d] - x[d]) - energy * std::abs(jump * rabbit[d] - x[d]);
          }
        } else {
          // Hard besiege
          for (std::size_t d = 0; d < dim; ++d) {
            move.position[d] = rabbit[d] - energy * std::abs(rabbit[d] - x[d]);
          }
        }
        clamp_to_bounds(move.position, problem);
        move.fitness = problem.objective(move.position);
        move.evaluations = 1;
        return;
      }

      // Progressive rapid dives: soft uses the hawk itself, hard uses the flock mean.
      const std::vector<double>& anchor = abs_e >= 0.5 ? x : mean;
      std::vector<double> dive(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        dive[d] = rabbit[d] - energy * std::abs(jump * rabbit[d] - anchor[d]);
      }
      clamp_to_bounds(dive, problem);
      const double dive_fitness = problem.objective(dive);
      move.evaluations = 1;
      if (dive_fitness > fitness[i]) {
        move.position = std::move(dive);
        move.fitness = dive_fitness;
        return;
      }
      const auto levy = levy_step(dim, params.levy_beta, rng);
      std::vector<double> leap(dim);
      const double reach = kLevyScale * abs_e;
      for (std::size_t d = 0; d < dim; ++d) {
        leap[d] = dive[d] + uniform01(rng) * reach * (problem.upper[d] - problem.lower[d]) * levy[d];
      }
      clamp_to_bounds(leap, problem);
      const double leap_fitness = problem.objective(leap);
      move.evaluations = 2;
      if (leap_fitness > fitness[i]) {
        move.position = std::move(leap);
        move.fitness = leap_fitness;
      } else {
        move.position = x;
        move.fitness = fitness[i];
      }
    });

    for (std::size_t i = 0; i < hawks; ++i) {
      tracker.count(moves[i].evaluations);
      if (moves[i].fitness > fitness[i]) {
        population[i] = std::move(moves[i].position);
        fitness[i] = moves[i].fitness;
      }
      tracker.offer(population[i], fitness[i]);
    }
    if (tracker.close_iteration()) break;
  }

  OptimizationResult result = tracker.take();
  return result;
}

OptimizationResult random_search(const SearchProblem& problem, const OptimizerParams& params) {
  problem.validate();
  params.validate();
  const std::size_t dim = problem.dimension();
  Tracker tracker(params);

  std::vector<std::vector<double>> samples;
  std::vector<double> fitness;
  for (int t = 0; t < params.max_iterations && !tracker.budget_exhausted(); ++t) {
    std::size_t count = static_cast<std::size_t>(params.population_size);
    if (params.max_evaluations > 0) {
      count = std::min<std::size_t>(count, static_cast<std::size_t>(params.max_evaluations - tracker.evaluations()));
    }
    samples.assign(count, std::vector<double>(dim));
    fitness.assign(count, 0.0);
    parallel_for(count, params.threads, [&](std::size_t k) {
      auto rng = substream(params.seed, Phase::Sample, static_cast<std::uint64_t>(t), k);
      for (std::size_t d = 0; d < dim; ++d) {
        samples[k][d] = problem.lower[d] + uniform01(rng) * (problem.upper[d] - problem.lower[d]);
      }
      fitness[k] = problem.objective(samples[k]);
    });
    tracker.count(static_cast<std::int64_t>(count));
    for (std::size_t k = 0; k < count; ++k) tracker.offer(samples[k], fitness[k]);
    if (tracker.close_iteration()) break;
  }
  return tracker.take();
}

OptimizerParams budget_matched_params(const OptimizerParams& params, std::int64_t evaluations) {
  OptimizerParams out = params;
  out.max_evaluations = std::max<std::int64_t>(evaluations, 1);
  out.max_iterations = static_cast<int>((out.max_evaluations + params.population_size - 1) / params.population_size);
  out.stagnation_window = 0;
  return out;
}

OptimizationResult run_optimizer(OptimizerKind kind, const SearchProblem& problem, const OptimizerParams& params) {
  return kind == OptimizerKind::Hho ? hho_optimize(problem, params) : random_search(problem, params);
}

void write_history_csv(std::ostream& out, const OptimizationResult& result) {
  out << "iteration,best_fitness,evaluations\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    out << (i + 1) << ',' << result.history[i] << ',' << result.evaluation_trace[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hawkstego
