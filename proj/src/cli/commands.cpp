#include "hawkstego/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "hawkstego/reports.hpp"

namespace hawkstego::cli {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

/// Runs a decoder and names the file in any error it raises.
template <typename Decode>
auto decode_file(const std::filesystem::path& path, Decode&& decode) {
  const auto bytes = read_file(path);
  try {
    return decode(std::span<const std::uint8_t>(bytes));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

RasterImage read_image(const std::filesystem::path& path) {
  return decode_file(path, [](auto bytes) { return load_image(bytes); });
}

template <typename Command>
int guarded(std::ostream& err, Command&& command) {
  try {
    return command();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct BenchRow {
  std::string cover;
  OptimizerKind optimizer;
  std::uint64_t seed;
  int iterations_run;
  std::int64_t evaluations;
  double best_fitness;
  double psnr;
  double ssim;
  std::int64_t elapsed_ms;
};

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ImageTooSmall:
    case ErrorKind::InvalidBounds:
    case ErrorKind::PlanInfeasible:
      return kInvalidArguments;
    case ErrorKind::CapacityExceeded:
    case ErrorKind::PayloadTooLarge:
    case ErrorKind::EmptyCandidateSet:
      return kCapacityExceeded;
    case ErrorKind::MalformedContainer:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::MalformedImage:
    case ErrorKind::UnsupportedImage:
    case ErrorKind::MalformedKey:
    case ErrorKind::VersionMismatch:
    case ErrorKind::Io:
      return kInputError;
    case ErrorKind::KeyMismatch:
    case ErrorKind::ChecksumMismatch:
    case ErrorKind::BadMagic:
    case ErrorKind::LengthMismatch:
    case ErrorKind::SlotOutOfBounds:
      return kKeyMismatch;
  }
  return kInternalError;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return kDefaultSeed;
}

PipelineSettings RunConfig::pipeline_settings() const {
  PipelineSettings s;
  s.optimizer = optimizer;
  s.fitness.alpha = alpha;
  s.lsb_depth = lsb_depth;
  s.block_size = block_size;
  s.top_fraction = variance_top_fraction;
  s.optimizer_params.population_size = hawks;
  s.optimizer_params.max_iterations = max_iterations;
  s.optimizer_params.seed = seed;
  s.optimizer_params.stagnation_window = stagnation_window;
  s.optimizer_params.stagnation_epsilon = stagnation_epsilon;
  s.optimizer_params.threads = threads;
  return s;
}

int cmd_embed(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PipelineSettings settings = config.pipeline_settings();
    settings.validate();
    const RasterImage cover = read_image(config.cover);
    const AudioPayload audio = decode_file(config.audio, [](auto bytes) { return parse_wav(bytes); });

    const EmbeddingOutcome outcome = run_embedding(cover, audio, settings);
    write_file(config.stego, save_image(outcome.stego));
    write_file(config.key, write_key(outcome.key));
    write_text(config.report, embedding_report_json(outcome, config.optimizer).dump(2) + "\n");
    if (!config.history.empty()) {
      std::ostringstream csv;
      write_history_csv(csv, outcome.optimization);
      write_text(config.history, csv.str());
    }
    out << quality_summary_line(outcome.quality) << "  (" << outcome.payload_bits << " bits, "
        << outcome.optimization.iterations_run << " iterations)\n";
    return kOk;
  });
}

int cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RasterImage stego = read_image(config.stego);
    const StegoKey key = decode_file(config.key, [](auto bytes) { return read_key(bytes); });
    const AudioPayload audio = run_extraction(stego, key);
    write_file(config.output, write_wav(audio));
    out << "recovered " << audio.data.size() << " audio bytes (" << audio.sample_rate << " Hz, "
        << audio.channels << " ch, " << audio.bits_per_sample << "-bit) -> " << config.output.string() << '\n';
    return kOk;
  });
}

int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RasterImage cover = read_image(config.cover);
    const RasterImage stego = read_image(config.stego);
    const QualityReport report = quality_report(cover, stego);
    const std::string text = config.csv ? quality_csv_header() + "\n" + quality_csv_row(report) + "\n"
                                        : quality_to_json(report).dump(2) + "\n";
    if (config.output.empty()) {
      out << text;
    } else {
      write_text(config.output, text);
      out << quality_summary_line(report) << '\n';
    }
    return kOk;
  });
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.seeds.empty()) throw Error(ErrorKind::InvalidArgument, "bench needs at least one --seeds value");
    if (config.optimizers.empty()) throw Error(ErrorKind::InvalidArgument, "bench needs at least one optimizer");
    std::error_code ec;
    if (!std::filesystem::is_directory(config.covers_dir, ec)) {
      throw Error(ErrorKind::Io, "cover directory " + config.covers_dir.string() + " is not readable");
    }
    std::vector<std::filesystem::path> covers;
    for (const auto& entry : std::filesystem::directory_iterator(config.covers_dir, ec)) {
      const auto ext = entry.path().extension().string();
      if (entry.is_regular_file() && (ext == ".png" || ext == ".bmp")) covers.push_back(entry.path());
    }
    if (ec) throw Error(ErrorKind::Io, "cannot list " + config.covers_dir.string());
    if (covers.empty()) throw Error(ErrorKind::Io, "no PNG or BMP covers in " + config.covers_dir.string());
    std::sort(covers.begin(), covers.end());

    const AudioPayload audio = decode_file(config.audio, [](auto bytes) { return parse_wav(bytes); });
    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    std::vector<OptimizerKind> optimizers = config.optimizers;
    std::sort(optimizers.begin(), optimizers.end());
    optimizers.erase(std::unique(optimizers.begin(), optimizers.end()), optimizers.end());

    std::vector<BenchRow> rows;
    for (const auto& path : covers) {
      const RasterImage cover = read_image(path);
      for (std::uint64_t seed : seeds) {
        // HHO (enum order first) sets the evaluation budget the baseline gets.
        std::int64_t hho_evaluations = 0;
        for (OptimizerKind kind : optimizers) {
          RunConfig job = config;
          job.optimizer = kind;
          job.seed = seed;
          PipelineSettings settings = job.pipeline_settings();
          if (kind == OptimizerKind::Random && hho_evaluations > 0) {
            settings.optimizer_params = budget_matched_params(settings.optimizer_params, hho_evaluations);
          }
          const auto start = std::chrono::steady_clock::now();
          const EmbeddingOutcome outcome = run_embedding(cover, audio, settings);
          const auto elapsed = std::chrono::steady_clock::now() - start;
          if (kind == OptimizerKind::Hho) hho_evaluations = outcome.optimization.evaluations;
          rows.push_back({path.filename().string(), kind, seed, outcome.optimization.iterations_run,
                          outcome.optimization.evaluations, outcome.optimization.best_fitness,
                          outcome.quality.psnr, outcome.quality.ssim,
                          std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()});
        }
      }
    }
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
      return std::tie(a.cover, a.optimizer, a.seed) < std::tie(b.cover, b.optimizer, b.seed);
    });

    std::ostringstream csv;
    csv.precision(17);
    csv << "cover,optimizer,seed,iterations_run,evaluations,best_fitness,psnr,ssim,elapsed_ms\n";
    for (const auto& r : rows) {
      csv << r.cover << ',' << to_string(r.optimizer) << ',' << r.seed << ',' << r.iterations_run << ','
          << r.evaluations << ',' << r.best_fitness << ',' << (std::isinf(r.psnr) ? "inf" : std::to_string(r.psnr))
          << ',' << r.ssim << ',' << r.elapsed_ms << '\n';
    }
    if (config.output.empty()) {
      out << csv.str();
    } else {
      write_text(config.output, csv.str());
    }

    std::map<OptimizerKind, std::vector<double>> fitness_by_optimizer;
    for (const auto& r : rows) fitness_by_optimizer[r.optimizer].push_back(r.best_fitness);
    out << "median best_fitness:";
    for (const auto& [kind, values] : fitness_by_optimizer) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %s=%.9f", std::string(to_string(kind)).c_str(), median(values));
      out << buf;
    }
    out << '\n';
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hide WAV audio in lossless RGB images with Harris Hawks slot selection"};
  app.require_subcommand(1);
  RunConfig config;
  config.seed = default_seed();
  std::string optimizer = "hho";
  std::vector<std::string> optimizer_list;
  std::string format = "json";

  auto add_search_flags = [&](CLI::App* cmd) {
    cmd->add_option("--optimizer", optimizer, "hho or random")->check(CLI::IsMember({"hho", "random"}));
    cmd->add_option("--alpha", config.alpha, "SSIM weight in the fitness")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--hawks", config.hawks, "Population size")->check(CLI::Range(2, 100000));
    cmd->add_option("--max-iterations", config.max_iterations)->check(CLI::Range(1, 10000000));
    cmd->add_option("--lsb-depth", config.lsb_depth)->check(CLI::IsMember({1, 2}));
    cmd->add_option("--block-size", config.block_size)->check(CLI::Range(1U, 1U << 20));
    cmd->add_option("--variance-top-fraction", config.variance_top_fraction)
        ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0));
    cmd->add_option("--stagnation-window", config.stagnation_window, "0 disables")->check(CLI::Range(0, 10000000));
    cmd->add_option("--stagnation-epsilon", config.stagnation_epsilon)->check(CLI::Range(0.0, 1e300));
    cmd->add_option("--threads", config.threads)->check(CLI::Range(1U, 1024U));
  };

  auto* embed = app.add_subcommand("embed", "Hide a WAV file in a cover image");
  add_search_flags(embed);
  embed->add_option("--seed", config.seed, std::string("RNG seed (default from ") + kSeedEnvVar + " or constant)");
  embed->add_option("--cover", config.cover)->required();
  embed->add_option("--audio", config.audio)->required();
  embed->add_option("--stego", config.stego, "Output PNG")->required();
  embed->add_option("--key", config.key, "Output key file")->required();
  embed->add_option("--report", config.report, "Output JSON report")->required();
  embed->add_option("--history", config.history, "Optional CSV of best fitness per iteration");

  auto* extract = app.add_subcommand("extract", "Recover the WAV file from a stego image");
  extract->add_option("--stego", config.stego)->required();
  extract->add_option("--key", config.key)->required();
  extract->add_option("--output", config.output, "Recovered WAV")->required();

  auto* metrics = app.add_subcommand("metrics", "Compare a cover and a stego image");
  metrics->add_option("--cover", config.cover)->required();
  metrics->add_option("--stego", config.stego)->required();
  metrics->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  metrics->add_option("--output", config.output, "Write the report here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Compare optimizers across covers and seeds");
  add_search_flags(bench);
  bench->add_option("--covers", config.covers_dir, "Directory of PNG/BMP covers")->required();
  bench->add_option("--audio", config.audio)->required();
  bench->add_option("--seeds", config.seeds)->required()->delimiter(',');
  bench->add_option("--optimizers", optimizer_list, "Comma-separated subset of hho,random")
      ->delimiter(',')
      ->check(CLI::IsMember({"hho", "random"}));
  bench->add_option("--output", config.output, "CSV destination (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidArguments;
  }
  config.optimizer = parse_optimizer_kind(optimizer);
  config.csv = format == "csv";
  if (!optimizer_list.empty()) {
    config.optimizers.clear();
    for (const auto& name : optimizer_list) config.optimizers.push_back(parse_optimizer_kind(name));
  }

  if (*embed) return cmd_embed(config, out, err);
  if (*extract) return cmd_extract(config, out, err);
  if (*metrics) return cmd_metrics(config, out, err);
  return cmd_bench(config, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hawkstego::cli
