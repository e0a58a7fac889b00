#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hawkstego/audio_codec.hpp"
#include "hawkstego/image_store.hpp"
#include "hawkstego/key_file.hpp"
#include "hawkstego/optimizer.hpp"
#include "hawkstego/quality_metrics.hpp"

namespace hawkstego {

struct EmbeddingPlan {
  std::vector<Slot> slots;
  int lsb_depth = 1;

  std::size_t capacity() const noexcept { return slots.size() * static_cast<std::size_t>(lsb_depth); }
};

struct FitnessConfig {
  double alpha = 0.5;

  void validate() const;
};

/// PSNR values above this are clamped inside the fitness so it stays in [0, 1].
inline constexpr double kFitnessPsnrCap = 100.0;

/// alpha * SSIM + (1 - alpha) * min(PSNR, 100) / 100. Infinite PSNR counts as 100.
double combine_fitness(double ssim_value, double psnr_value, const FitnessConfig& config);

/// Slot count times LSB depth.
std::size_t capacity(const CandidateSet& candidates, int lsb_depth);

/// Rounds each coordinate to a candidate index (clamped to the valid range);
/// collisions probe upward, wrapping, to the next unused candidate.
EmbeddingPlan decode_plan(std::span<const double> position, const CandidateSet& candidates, int lsb_depth);

/// Writes bits into the low lsb_depth bits of each slot, first bit of each
/// group into the highest replaced bit.
RasterImage embed_bits(const RasterImage& cover, const EmbeddingPlan& plan, const BitStream& bits);
BitStream extract_bits(const RasterImage& stego, const EmbeddingPlan& plan, std::size_t n_bits);

/// Payload bits landing in each colour channel under a plan.
std::array<std::size_t, RasterImage::kChannels> bits_per_channel(const EmbeddingPlan& plan, std::size_t n_bits);

/// Reference fitness: decode, embed, and score the whole image from scratch.
double fitness(const RasterImage& cover, const CandidateSet& candidates, std::span<const double> position,
               const BitStream& bits, const FitnessConfig& config, int lsb_depth);

/// Fast fitness for optimizer use. Scores only the SSIM windows touched by
/// changed luminance values; the result matches fitness() up to summation
/// order. Safe to call from several threads at once.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const RasterImage& cover, const CandidateSet& candidates, const BitStream& bits,
                   const FitnessConfig& config, int lsb_depth);
  ~FitnessEvaluator();
  FitnessEvaluator(FitnessEvaluator&&) noexcept;
  FitnessEvaluator& operator=(FitnessEvaluator&&) noexcept;

  /// Optimizer dimension: ceil(bits / lsb_depth).
  std::size_t dimension() const noexcept;
  double operator()(std::span<const double> position) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

struct PipelineSettings {
  OptimizerKind optimizer = OptimizerKind::Hho;
  OptimizerParams optimizer_params;
  FitnessConfig fitness;
  int lsb_depth = 1;
  std::uint32_t block_size = 8;
  double top_fraction = 0.5;

  void validate() const;
};

struct EmbeddingOutcome {
  RasterImage stego;
  StegoKey key;
  QualityReport quality;
  OptimizationResult optimization;
  std::size_t payload_bits = 0;
  std::size_t capacity_bits = 0;
  std::size_t candidate_count = 0;
  std::array<std::size_t, RasterImage::kChannels> channel_bits{};
};

/// Frames the audio, searches slot positions with the configured optimizer,
/// embeds, and scores the result. Throws CapacityExceeded before any search
/// when the framed payload does not fit.
EmbeddingOutcome run_embedding(const RasterImage& cover, const AudioPayload& audio, const PipelineSettings& settings);

/// Throws KeyMismatch when the key does not describe this image and
/// ChecksumMismatch when the recovered frame fails its integrity checks.
AudioPayload run_extraction(const RasterImage& stego, const StegoKey& key);

}  // namespace hawkstego
