#include "hawkstego/stego_engine.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "hawkstego/error.hpp"

namespace hawkstego {

namespace {

void require_depth(int lsb_depth) {
  if (lsb_depth != 1 && lsb_depth != 2) throw Error(ErrorKind::InvalidArgument, "lsb_depth must be 1 or 2");
}

std::size_t slots_needed(std::size_t n_bits, int lsb_depth) {
  return (n_bits + static_cast<std::size_t>(lsb_depth) - 1) / static_cast<std::size_t>(lsb_depth);
}

std::size_t candidate_index(double coordinate, std::size_t count) {
  if (std::isnan(coordinate)) return 0;
  const double r = std::round(coordinate);
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(count - 1)) return count - 1;
  return static_cast<std::size_t>(r);
}

/// New value of a channel after writing the slot's bit group. Bits past
/// n_bits leave the corresponding positions untouched.
std::uint8_t write_group(std::uint8_t value, const BitStream& bits, std::size_t first_bit, int lsb_depth) {
  for (int j = 0; j < lsb_depth; ++j) {
    const std::size_t b = first_bit + static_cast<std::size_t>(j);
    if (b >= bits.size()) break;
    const int shift = lsb_depth - 1 - j;
    value = static_cast<std::uint8_t>((value & ~(1U << shift)) | (unsigned{bits[b]} << shift));
  }
  return value;
}

/// Next-free lookup with path compression; reproduces linear probing upward
/// with wrap-around in near-constant time per query. Entries whose stamp is
/// not the current generation are free, so reuse needs no clearing.
class ProbeTable {
 public:
  void reset(std::size_t count) {
    if (next_.size() != count) {
      next_.assign(count, 0);
      stamp_.assign(count, 0);
      generation_ = 0;
    }
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
  }

  std::size_t claim(std::size_t start) {
    std::size_t root = start;
    while (stamp_[root] == generation_) root = next_[root];
    while (stamp_[start] == generation_ && next_[start] != root) {
      const std::size_t n = next_[start];
      next_[start] = static_cast<std::uint32_t>(root);
      start = n;
    }
    stamp_[root] = generation_;
    next_[root] = static_cast<std::uint32_t>(root + 1 == next_.size() ? 0 : root + 1);
    return root;
  }

 private:
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

}  // namespace

void FitnessConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
}

double combine_fitness(double ssim_value, double psnr_value, const FitnessConfig& config) {
  const double capped = std::min(psnr_value, kFitnessPsnrCap);
  return config.alpha * ssim_value + (1.0 - config.alpha) * capped / 100.0;
}

std::size_t capacity(const CandidateSet& candidates, int lsb_depth) {
  require_depth(lsb_depth);
  return candidates.size() * static_cast<std::size_t>(lsb_depth);
}

EmbeddingPlan decode_plan(std::span<const double> position, const CandidateSet& candidates, int lsb_depth) {
  require_depth(lsb_depth);
  if (position.size() > candidates.size()) {
    throw Error(ErrorKind::PlanInfeasible, std::to_string(position.size()) + " slots requested from " +
                                               std::to_string(candidates.size()) + " candidates");
  }
  EmbeddingPlan plan;
  plan.lsb_depth = lsb_depth;
  plan.slots.reserve(position.size());
  if (position.empty()) return plan;
  ProbeTable probe;
  probe.reset(candidates.size());
  for (double coordinate : position) {
    plan.slots.push_back(candidates.slots[probe.claim(candidate_index(coordinate, candidates.size()))]);
  }
  return plan;
}

RasterImage embed_bits(const RasterImage& cover, const EmbeddingPlan& plan, const BitStream& bits) {
  require_depth(plan.lsb_depth);
  if (plan.capacity() < bits.size()) {
    throw Error(ErrorKind::CapacityExceeded, "plan holds " + std::to_string(plan.capacity()) + " bits, payload needs " +
                                                 std::to_string(bits.size()));
  }
  RasterImage stego = cover;
  for (std::size_t k = 0; k < plan.slots.size(); ++k) {
    const Slot& slot = plan.slots[k];
    if (slot.pixel_index >= cover.pixel_count() || slot.channel >= RasterImage::kChannels) {
      throw Error(ErrorKind::SlotOutOfBounds, "slot " + std::to_string(k) + " lies outside the image");
    }
    const std::size_t first = k * static_cast<std::size_t>(plan.lsb_depth);
    if (first >= bits.size()) continue;
    auto& value = stego.at(slot.pixel_index, slot.channel);
    value = write_group(value, bits, first, plan.lsb_depth);
  }
  return stego;
}

BitStream extract_bits(const RasterImage& stego, const EmbeddingPlan& plan, std::size_t n_bits) {
  require_depth(plan.lsb_depth);
  if (n_bits > plan.capacity()) {
    throw Error(ErrorKind::CapacityExceeded, "cannot read " + std::to_string(n_bits) + " bits from a plan of " +
                                                 std::to_string(plan.capacity()));
  }
  BitStream out;
  for (std::size_t k = 0; k < plan.slots.size() && out.size() < n_bits; ++k) {
    const Slot& slot = plan.slots[k];
    if (slot.pixel_index >= stego.pixel_count() || slot.channel >= RasterImage::kChannels) {
      throw Error(ErrorKind::SlotOutOfBounds, "slot " + std::to_string(k) + " lies outside the image");
    }
    const std::uint8_t value = stego.at(slot.pixel_index, slot.channel);
    for (int shift = plan.lsb_depth - 1; shift >= 0 && out.size() < n_bits; --shift) {
      out.push_back(static_cast<std::uint8_t>((value >> shift) & 1U));
    }
  }
  return out;
}

std::array<std::size_t, RasterImage::kChannels> bits_per_channel(const EmbeddingPlan& plan, std::size_t n_bits) {
  std::array<std::size_t, RasterImage::kChannels> out{};
  const auto depth = static_cast<std::size_t>(plan.lsb_depth);
  for (std::size_t k = 0; k < plan.slots.size(); ++k) {
    const std::size_t first = k * depth;
    if (first >= n_bits) break;
    out[plan.slots[k].channel] += std::min(depth, n_bits - first);
  }
  return out;
}

double fitness(const RasterImage& cover, const CandidateSet& candidates, std::span<const double> position,
               const BitStream& bits, const FitnessConfig& config, int lsb_depth) {
  config.validate();
  const EmbeddingPlan plan = decode_plan(position, candidates, lsb_depth);
  const RasterImage stego = embed_bits(cover, plan, bits);
  return combine_fitness(ssim(cover, stego), psnr(cover, stego), config);
}

// ---------------------------------------------------------------------------
// FitnessEvaluator

namespace {

struct WindowDelta {
  std::uint32_t stamp = 0;
  std::int32_t sy = 0;
  std::int32_t syy = 0;
  std::int32_t sxy = 0;
};

struct PixelEdit {
  std::uint32_t stamp = 0;
  std::array<std::uint8_t, 3> rgb{};
};

struct ChangedLuma {
  std::uint32_t pixel;
  std::int32_t before;
  std::int32_t after;
};

/// Per-thread working memory for one evaluation.
struct Scratch {
  ProbeTable probe;
  std::vector<PixelEdit> pixels;
  std::vector<std::uint32_t> touched_pixels;
  std::vector<ChangedLuma> changed;
  std::vector<WindowDelta> windows;
  std::vector<std::uint32_t> touched_windows;
  std::vector<std::uint8_t> stego_luma;
  std::uint32_t generation = 0;

  std::uint32_t next_generation() {
    if (++generation == 0) {
      for (auto& p : pixels) p.stamp = 0;
      for (auto& w : windows) w.stamp = 0;
      generation = 1;
    }
    return generation;
  }
};

}  // namespace

struct FitnessEvaluator::State {
  RasterImage cover;
  std::vector<std::uint8_t> luma;
  CandidateSet candidates;
  BitStream bits;
  FitnessConfig config;
  int lsb_depth = 1;
  std::size_t dimension = 0;
  std::uint32_t windows_x = 0;
  std::uint32_t windows_y = 0;
  std::size_t window_count = 0;
  // Summed-area tables of cover luminance and its square, (W+1) x (H+1).
  std::vector<std::int64_t> sum;
  std::vector<std::int64_t> sum_sq;

  std::mutex pool_mutex;
  std::vector<std::unique_ptr<Scratch>> pool;

  std::int64_t box(const std::vector<std::int64_t>& table, std::size_t x, std::size_t y) const {
    const std::size_t stride = cover.width() + 1;
    const std::size_t x1 = x + kSsimWindow;
    const std::size_t y1 = y + kSsimWindow;
    return table[y1 * stride + x1] - table[y * stride + x1] - table[y1 * stride + x] + table[y * stride + x];
  }

  std::unique_ptr<Scratch> acquire() {
    {
      std::lock_guard lock(pool_mutex);
      if (!pool.empty()) {
        auto s = std::move(pool.back());
        pool.pop_back();
        return s;
      }
    }
    auto s = std::make_unique<Scratch>();
    s->pixels.resize(cover.pixel_count());
    s->windows.resize(window_count);
    return s;
  }

  void release(std::unique_ptr<Scratch> s) {
    std::lock_guard lock(pool_mutex);
    pool.push_back(std::move(s));
  }

  double evaluate(std::span<const double> position, Scratch& scratch) const;
};

double FitnessEvaluator::State::evaluate(std::span<const double> position, Scratch& s) const {
  if (position.size() != dimension) {
    throw Error(ErrorKind::InvalidArgument, "position has " + std::to_string(position.size()) +
                                                " coordinates, expected " + std::to_string(dimension));
  }
  const std::uint32_t gen = s.next_generation();
  s.probe.reset(candidates.size());
  s.touched_pixels.clear();

  // Simulated embedding: squared error and the final colour of every edited pixel.
  std::int64_t squared_error = 0;
  for (std::size_t k = 0; k < position.size(); ++k) {
    const Slot slot = candidates.slots[s.probe.claim(candidate_index(position[k], candidates.size()))];
    const std::uint8_t before = cover.at(slot.pixel_index, slot.channel);
    const std::uint8_t after = write_group(before, bits, k * static_cast<std::size_t>(lsb_depth), lsb_depth);
    if (before == after) continue;
    const int d = int{after} - int{before};
    squared_error += d * d;
    PixelEdit& edit = s.pixels[slot.pixel_index];
    if (edit.stamp != gen) {
      edit.stamp = gen;
      for (int c = 0; c < 3; ++c) edit.rgb[c] = cover.at(slot.pixel_index, c);
      s.touched_pixels.push_back(slot.pixel_index);
    }
    edit.rgb[slot.channel] = after;
  }
  const double mse_value = static_cast<double>(squared_error) / static_cast<double>(cover.value_count());

  s.changed.clear();
  for (std::uint32_t p : s.touched_pixels) {
    const auto& rgb = s.pixels[p].rgb;
    const int after = luminance(rgb[0], rgb[1], rgb[2]);
    if (after != luma[p]) s.changed.push_back({p, luma[p], after});
  }

  double ssim_value = 1.0;
  const std::uint32_t w = cover.width();
  if (s.changed.empty()) {
    ssim_value = 1.0;
  } else if (s.changed.size() * 32 >= cover.pixel_count()) {
    // Dense edits: a full pass is cheaper than per-window updates.
    s.stego_luma = luma;
    for (const auto& c : s.changed) s.stego_luma[c.pixel] = static_cast<std::uint8_t>(c.after);
    ssim_value = ssim_luminance(luma, s.stego_luma, w, cover.height());
  } else {
    s.touched_windows.clear();
    for (const auto& c : s.changed) {
      const std::uint32_t px = c.pixel % w;
      const std::uint32_t py = c.pixel / w;
      const std::uint32_t x0 = px >= kSsimWindow - 1 ? px - (kSsimWindow - 1) : 0;
      const std::uint32_t y0 = py >= kSsimWindow - 1 ? py - (kSsimWindow - 1) : 0;
      const std::uint32_t x1 = std::min(px, windows_x - 1);
      const std::uint32_t y1 = std::min(py, windows_y - 1);
      const std::int32_t d = c.after - c.before;
      const std::int32_t d_sq = c.after * c.after - c.before * c.before;
      const std::int32_t d_cross = c.before * d;
      for (std::uint32_t wy = y0; wy <= y1; ++wy) {
        for (std::uint32_t wx = x0; wx <= x1; ++wx) {
          const std::uint32_t idx = wy * windows_x + wx;
          WindowDelta& delta = s.windows[idx];
          if (delta.stamp != gen) {
            delta = WindowDelta{gen, 0, 0, 0};
            s.touched_windows.push_back(idx);
          }
          delta.sy += d;
          delta.syy += d_sq;
          delta.sxy += d_cross;
        }
      }
    }
    constexpr std::int64_t n = std::int64_t{kSsimWindow} * kSsimWindow;
    double touched_total = 0.0;
    for (std::uint32_t idx : s.touched_windows) {
      const WindowDelta& delta = s.windows[idx];
      const std::int64_t sx = box(sum, idx % windows_x, idx / windows_x);
      const std::int64_t sxx = box(sum_sq, idx % windows_x, idx / windows_x);
      touched_total += window_ssim({sx, sx + delta.sy, sxx, sxx + delta.syy, sxx + delta.sxy}, n);
    }
    const double untouched = static_cast<double>(window_count - s.touched_windows.size());
    ssim_value = (untouched + touched_total) / static_cast<double>(window_count);
  }
  return combine_fitness(ssim_value, psnr_from_mse(mse_value), config);
}

FitnessEvaluator::FitnessEvaluator(const RasterImage& cover, const CandidateSet& candidates, const BitStream& bits,
                                   const FitnessConfig& config, int lsb_depth)
    : state_(std::make_unique<State>()) {
  require_depth(lsb_depth);
  config.validate();
  if (candidates.width != cover.width() || candidates.height != cover.height()) {
    throw Error(ErrorKind::DimensionMismatch, "candidate set was built for a different image size");
  }
  if (cover.width() < kSsimWindow || cover.height() < kSsimWindow) {
    throw Error(ErrorKind::ImageTooSmall, "fitness needs at least 8x8 pixels for SSIM");
  }
  State& st = *state_;
  st.cover = cover;
  st.luma = luminance_plane(cover);
  st.candidates = candidates;
  st.bits = bits;
  st.config = config;
  st.lsb_depth = lsb_depth;
  st.dimension = slots_needed(bits.size(), lsb_depth);
  if (st.dimension > candidates.size()) {
    throw Error(ErrorKind::PlanInfeasible, std::to_string(st.dimension) + " slots requested from " +
                                               std::to_string(candidates.size()) + " candidates");
  }
  const std::uint32_t w = cover.width();
  const std::uint32_t h = cover.height();
  st.windows_x = w - kSsimWindow + 1;
  st.windows_y = h - kSsimWindow + 1;
  st.window_count = std::size_t{st.windows_x} * st.windows_y;
  const std::size_t stride = std::size_t{w} + 1;
  st.sum.assign(stride * (h + 1), 0);
  st.sum_sq.assign(stride * (h + 1), 0);
  for (std::uint32_t y = 0; y < h; ++y) {
    std::int64_t row = 0;
    std::int64_t row_sq = 0;
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::int64_t l = st.luma[std::size_t{y} * w + x];
      row += l;
      row_sq += l * l;
      st.sum[(y + 1) * stride + x + 1] = st.sum[y * stride + x + 1] + row;
      st.sum_sq[(y + 1) * stride + x + 1] = st.sum_sq[y * stride + x + 1] + row_sq;
    }
  }
}

FitnessEvaluator::~FitnessEvaluator() = default;
FitnessEvaluator::FitnessEvaluator(FitnessEvaluator&&) noexcept = default;
FitnessEvaluator& FitnessEvaluator::operator=(FitnessEvaluator&&) noexcept = default;

std::size_t FitnessEvaluator::dimension() const noexcept { return state_->dimension; }

double FitnessEvaluator::operator()(std::span<const double> position) const {
  auto scratch = state_->acquire();
  const double z = state_->evaluate(position, *scratch);
  state_->release(std::move(scratch));
  return z;
}

// ---------------------------------------------------------------------------
// Pipelines

void PipelineSettings::validate() const {
  optimizer_params.validate();
  fitness.validate();
  require_depth(lsb_depth);
  if (block_size == 0) throw Error(ErrorKind::InvalidArgument, "block_size must be at least 1");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "top_fraction must lie in (0, 1]");
  }
}

EmbeddingOutcome run_embedding(const RasterImage& cover, const AudioPayload& audio, const PipelineSettings& settings) {
  settings.validate();
  const BitStream bits = frame_payload(audio);
  const VarianceMap vmap = block_variance_map(cover, settings.block_size);
  const CandidateSet candidates = candidate_positions(vmap, cover, settings.top_fraction);

  EmbeddingOutcome out;
  out.payload_bits = bits.size();
  out.capacity_bits = capacity(candidates, settings.lsb_depth);
  out.candidate_count = candidates.size();
  if (out.payload_bits > out.capacity_bits) {
    throw Error(ErrorKind::CapacityExceeded, "payload requires " + std::to_string(out.payload_bits) +
                                                 " bits but only " + std::to_string(out.capacity_bits) +
                                                 " are available");
  }

  const FitnessEvaluator evaluator(cover, candidates, bits, settings.fitness, settings.lsb_depth);
  SearchProblem problem;
  problem.lower.assign(evaluator.dimension(), 0.0);
  problem.upper.assign(evaluator.dimension(), static_cast<double>(candidates.size() - 1));
  problem.objective = [&evaluator](std::span<const double> x) { return evaluator(x); };
  out.optimization = run_optimizer(settings.optimizer, problem, settings.optimizer_params);

  const EmbeddingPlan plan = decode_plan(out.optimization.best_position, candidates, settings.lsb_depth);
  out.stego = embed_bits(cover, plan, bits);
  out.quality = quality_report(cover, out.stego);
  out.channel_bits = bits_per_channel(plan, bits.size());

  out.key.width = cover.width();
  out.key.height = cover.height();
  out.key.lsb_depth = static_cast<std::uint8_t>(settings.lsb_depth);
  out.key.payload_bit_length = bits.size();
  out.key.slots = plan.slots;
  return out;
}

AudioPayload run_extraction(const RasterImage& stego, const StegoKey& key) {
  if (key.width != stego.width() || key.height != stego.height()) {
    throw Error(ErrorKind::KeyMismatch, "key describes a " + std::to_string(key.width) + "x" +
                                            std::to_string(key.height) + " image, stego is " +
                                            std::to_string(stego.width()) + "x" + std::to_string(stego.height()));
  }
  if (key.lsb_depth != 1 && key.lsb_depth != 2) throw Error(ErrorKind::KeyMismatch, "key has invalid lsb_depth");
  if (slots_needed(key.payload_bit_length, key.lsb_depth) != key.slots.size()) {
    throw Error(ErrorKind::KeyMismatch, "key slot count does not match its payload length");
  }
  const EmbeddingPlan plan{key.slots, key.lsb_depth};
  BitStream bits;
  try {
    bits = extract_bits(stego, plan, key.payload_bit_length);
  } catch (const Error& e) {
    throw Error(ErrorKind::KeyMismatch, e.what());
  }
  // Any frame defect here means the key and image do not belong together, or
  // the image lost its low bits; all of them surface as a checksum failure.
  try {
    AudioPayload audio = deframe_payload(bits);
    if (framed_bit_length(audio.data.size()) != key.payload_bit_length) {
      throw Error(ErrorKind::LengthMismatch, "frame length disagrees with the key");
    }
    return audio;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ChecksumMismatch) throw;
    throw Error(ErrorKind::ChecksumMismatch, std::string("recovered payload failed integrity checks (") + e.what() + ")");
  }
}

}  // namespace hawkstego
