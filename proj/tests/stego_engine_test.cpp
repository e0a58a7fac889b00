#include "hawkstego/stego_engine.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "test_support.hpp"

namespace hawkstego {
namespace {

CandidateSet numbered_candidates(std::size_t n, std::uint32_t width = 64, std::uint32_t height = 64) {
  CandidateSet set;
  set.width = width;
  set.height = height;
  for (std::size_t i = 0; i < n; ++i) set.slots.push_back({static_cast<std::uint32_t>(i / 3), static_cast<std::uint8_t>(i % 3)});
  return set;
}

BitStream bits_of(std::initializer_list<int> bits) {
  BitStream b;
  for (int v : bits) b.push_back(static_cast<std::uint8_t>(v));
  return b;
}

BitStream random_bits(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  BitStream b;
  for (std::size_t i = 0; i < n; ++i) b.push_back(coin(rng));
  return b;
}

std::vector<double> random_position(std::size_t dim, std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, static_cast<double>(count) + 1.0);
  std::vector<double> x(dim);
  for (auto& v : x) v = u(rng);
  return x;
}

// Linear probing exactly as described: round, clamp, walk upward with wrap.
std::vector<std::size_t> naive_probe(std::span<const double> position, std::size_t count) {
  std::vector<bool> used(count, false);
  std::vector<std::size_t> out;
  for (double v : position) {
    long long idx = std::llround(v);
    idx = std::clamp<long long>(idx, 0, static_cast<long long>(count) - 1);
    auto i = static_cast<std::size_t>(idx);
    while (used[i]) i = (i + 1) % count;
    used[i] = true;
    out.push_back(i);
  }
  return out;
}

TEST(DecodePlan, Examples) {
  const CandidateSet c = numbered_candidates(10);
  EXPECT_EQ(decode_plan(std::vector<double>{2.4}, c, 1).slots, (std::vector<Slot>{c.slots[2]}));
  EXPECT_EQ(decode_plan(std::vector<double>{2.4, 1.6}, c, 1).slots, (std::vector<Slot>{c.slots[2], c.slots[3]}));
  EXPECT_EQ(decode_plan(std::vector<double>{-0.7}, c, 1).slots, (std::vector<Slot>{c.slots[0]}));
  EXPECT_EQ(decode_plan(std::vector<double>{42.0}, c, 1).slots, (std::vector<Slot>{c.slots[9]}));
  EXPECT_EQ(decode_plan(std::vector<double>{9.0, 9.2, 8.7}, c, 1).slots,
            (std::vector<Slot>{c.slots[9], c.slots[0], c.slots[1]}));
}

TEST(DecodePlan, Infeasible) {
  const CandidateSet c = numbered_candidates(3);
  EXPECT_ERROR_KIND(decode_plan(std::vector<double>{0, 1, 2, 3}, c, 1), PlanInfeasible);
  EXPECT_ERROR_KIND(decode_plan(std::vector<double>{0}, c, 3), InvalidArgument);
}

TEST(DecodePlanProperty, MatchesNaiveProbingAndStaysDistinct) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t count = 1 + rng() % 60;
    const std::size_t dim = 1 + rng() % count;
    const CandidateSet c = numbered_candidates(count);
    std::vector<double> x = random_position(dim, count, rng);
    // Force heavy collisions on some trials.
    if (trial % 3 == 0) {
      for (auto& v : x) v = std::floor(v / 7.0) * 7.0;
    }
    const auto plan = decode_plan(x, c, 1);
    const auto expected = naive_probe(x, count);
    ASSERT_EQ(plan.slots.size(), dim);
    for (std::size_t k = 0; k < dim; ++k) ASSERT_EQ(plan.slots[k], c.slots[expected[k]]);
    std::set<Slot> unique(plan.slots.begin(), plan.slots.end());
    ASSERT_EQ(unique.size(), dim);
  }
}

TEST(EmbedBits, Examples) {
  RasterImage img(1, 1);
  img.at(0, 0) = 200;
  const EmbeddingPlan plan{{{0, 0}}, 1};
  EXPECT_EQ(embed_bits(img, plan, bits_of({1})).at(0, 0), 201);
  img.at(0, 0) = 201;
  EXPECT_EQ(embed_bits(img, plan, bits_of({1})).at(0, 0), 201);
  img.at(0, 0) = 200;
  EXPECT_EQ(embed_bits(img, EmbeddingPlan{{{0, 0}}, 2}, bits_of({1, 1})).at(0, 0), 203);
  // A lone trailing bit at depth 2 lands in the higher replaced bit.
  EXPECT_EQ(embed_bits(img, EmbeddingPlan{{{0, 0}}, 2}, bits_of({1})).at(0, 0), 202);
  img.at(0, 0) = 203;
  EXPECT_EQ(embed_bits(img, EmbeddingPlan{{{0, 0}}, 2}, bits_of({0})).at(0, 0), 201);
}

TEST(EmbedBits, UnusedSlotsAndOtherValuesUntouched) {
  std::mt19937_64 rng(1);
  const RasterImage cover = testing::noise_image(4, 4, rng);
  const EmbeddingPlan plan{{{3, 1}, {7, 2}, {9, 0}}, 1};
  const RasterImage stego = embed_bits(cover, plan, bits_of({1, 0}));
  for (std::size_t p = 0; p < cover.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) {
      if ((p == 3 && c == 1) || (p == 7 && c == 2)) continue;
      EXPECT_EQ(stego.at(p, c), cover.at(p, c));
    }
  }
  EXPECT_EQ(stego.at(3, 1) & 1, 1);
  EXPECT_EQ(stego.at(7, 2) & 1, 0);
}

TEST(EmbedBits, Errors) {
  const RasterImage img(2, 2);
  EXPECT_ERROR_KIND(embed_bits(img, EmbeddingPlan{{{0, 0}}, 1}, bits_of({1, 0})), CapacityExceeded);
  EXPECT_ERROR_KIND(embed_bits(img, EmbeddingPlan{{{4, 0}}, 1}, bits_of({1})), SlotOutOfBounds);
  EXPECT_ERROR_KIND(embed_bits(img, EmbeddingPlan{{{0, 3}}, 1}, bits_of({1})), SlotOutOfBounds);
  EXPECT_ERROR_KIND(extract_bits(img, EmbeddingPlan{{{9, 0}}, 1}, 1), SlotOutOfBounds);
  EXPECT_ERROR_KIND(extract_bits(img, EmbeddingPlan{{{0, 0}}, 1}, 2), CapacityExceeded);
}

TEST(ExtractBits, Examples) {
  RasterImage img(1, 1);
  img.at(0, 0) = 203;
  EXPECT_EQ(extract_bits(img, EmbeddingPlan{{{0, 0}}, 2}, 2), bits_of({1, 1}));
  EXPECT_EQ(extract_bits(img, EmbeddingPlan{{{0, 0}}, 2}, 0), BitStream{});
  EXPECT_EQ(extract_bits(img, EmbeddingPlan{{{0, 0}}, 2}, 1), bits_of({1}));
}

TEST(EmbedExtractProperty, InverseAndDistortionBounds) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int depth = 1 + trial % 2;
    const RasterImage cover = testing::noise_image(8 + rng() % 30, 8 + rng() % 30, rng);
    const auto set = candidate_positions(block_variance_map(cover, 4), cover, 0.5);
    const std::size_t n_bits = 1 + rng() % std::min<std::size_t>(capacity(set, depth), 400);
    const BitStream bits = random_bits(n_bits, rng);
    const std::size_t slots = (n_bits + depth - 1) / depth;
    const auto plan = decode_plan(random_position(slots, set.size(), rng), set, depth);
    const RasterImage stego = embed_bits(cover, plan, bits);
    ASSERT_EQ(extract_bits(stego, plan, n_bits), bits);

    std::size_t changed = 0;
    for (std::size_t i = 0; i < cover.value_count(); ++i) {
      const int d = std::abs(int{cover.values()[i]} - int{stego.values()[i]});
      ASSERT_LE(d, (1 << depth) - 1);
      changed += d != 0;
    }
    ASSERT_LE(changed, plan.slots.size());
    if (depth == 1) {
      ASSERT_LE(mse(cover, stego), static_cast<double>(plan.slots.size()) / static_cast<double>(cover.value_count()));
    }
  }
}

TEST(EmbedProperty, FewerPayloadBitsNeverLowerPsnr) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const RasterImage cover = testing::noise_image(24, 24, rng);
    const auto set = candidate_positions(block_variance_map(cover, 8), cover, 1.0);
    const BitStream bits = random_bits(500, rng);
    const auto plan = decode_plan(random_position(500, set.size(), rng), set, 1);
    double previous = kInfinitePsnr;
    for (std::size_t n = 0; n <= 500; n += 50) {
      const BitStream prefix(std::vector<std::uint8_t>(bits.bits().begin(), bits.bits().begin() + n));
      const double p = psnr(cover, embed_bits(cover, plan, prefix));
      ASSERT_LE(p, previous);
      previous = p;
    }
  }
}

TEST(BitsPerChannel, CountsGroups) {
  const EmbeddingPlan plan{{{0, 0}, {0, 1}, {1, 0}, {2, 2}}, 2};
  EXPECT_EQ(bits_per_channel(plan, 7), (std::array<std::size_t, 3>{4, 2, 1}));
}

TEST(Capacity, Examples) {
  EXPECT_EQ(capacity(numbered_candidates(1000, 1000, 1), 1), 1000U);
  EXPECT_EQ(capacity(numbered_candidates(1000, 1000, 1), 2), 2000U);
  EXPECT_EQ(capacity(CandidateSet{}, 1), 0U);
}

TEST(CombineFitness, Examples) {
  const FitnessConfig half{0.5};
  EXPECT_EQ(combine_fitness(1.0, kInfinitePsnr, half), 1.0);
  EXPECT_EQ(combine_fitness(1.0, 140.0, half), 1.0);
  EXPECT_NEAR(combine_fitness(0.999, 55.0, half), 0.7745, 1e-12);
  EXPECT_EQ(combine_fitness(0.3, 61.25, FitnessConfig{0.0}), 61.25 / 100.0);
  EXPECT_EQ(combine_fitness(0.3, 61.25, FitnessConfig{1.0}), 0.3);
  EXPECT_ERROR_KIND(FitnessConfig{1.5}.validate(), InvalidArgument);
}

TEST(Fitness, IdenticalEmbeddingScoresOne) {
  // Cover LSBs already equal the payload: nothing changes.
  RasterImage cover = testing::constant_image(16, 16, 10, 20, 30);
  const auto set = candidate_positions(block_variance_map(cover, 8), cover, 1.0);
  const BitStream zeros(std::vector<std::uint8_t>(12, 0));
  std::vector<double> x(12);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  EXPECT_EQ(fitness(cover, set, x, zeros, FitnessConfig{}, 1), 1.0);
  EXPECT_EQ(FitnessEvaluator(cover, set, zeros, FitnessConfig{}, 1)(x), 1.0);
}

TEST(FitnessEvaluator, MatchesReferenceFitness) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const int depth = 1 + trial % 2;
    const std::uint32_t w = 8 + static_cast<std::uint32_t>(rng() % 60);
    const std::uint32_t h = 8 + static_cast<std::uint32_t>(rng() % 60);
    const RasterImage cover = trial % 3 ? testing::textured_image(w, h, rng) : testing::noise_image(w, h, rng);
    const auto set = candidate_positions(block_variance_map(cover, 8), cover, 0.5 + 0.5 * (trial % 2));
    // Mix sparse payloads (incremental path) with dense ones (full pass).
    const std::size_t max_bits = capacity(set, depth);
    const std::size_t n_bits = trial % 4 == 0 ? max_bits : 1 + rng() % std::max<std::size_t>(1, max_bits / 20);
    const BitStream bits = random_bits(n_bits, rng);
    const FitnessConfig config{(trial % 5) / 4.0};
    const FitnessEvaluator eval(cover, set, bits, config, depth);
    ASSERT_EQ(eval.dimension(), (n_bits + depth - 1) / depth);
    for (int k = 0; k < 3; ++k) {
      const auto x = random_position(eval.dimension(), set.size(), rng);
      const double expected = fitness(cover, set, x, bits, config, depth);
      ASSERT_NEAR(eval(x), expected, 1e-12) << "trial " << trial;
    }
  }
}

TEST(FitnessEvaluator, ConcurrentCallsAgree) {
  std::mt19937_64 rng(52);
  const RasterImage cover = testing::textured_image(64, 64, rng);
  const auto set = candidate_positions(block_variance_map(cover, 8), cover, 0.5);
  const BitStream bits = random_bits(300, rng);
  const FitnessEvaluator eval(cover, set, bits, FitnessConfig{}, 1);
  std::vector<std::vector<double>> xs;
  std::vector<double> expected;
  for (int i = 0; i < 16; ++i) {
    xs.push_back(random_position(300, set.size(), rng));
    expected.push_back(eval(xs.back()));
  }
  std::vector<double> got(xs.size());
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < xs.size(); i += 4) got[i] = eval(xs[i]);
      });
    }
  }
  EXPECT_EQ(got, expected);
}

TEST(FitnessProperty, IgnoresUnreferencedCandidates) {
  std::mt19937_64 rng(61);
  const RasterImage cover = testing::noise_image(32, 32, rng);
  auto set = candidate_positions(block_variance_map(cover, 8), cover, 1.0);
  const BitStream bits = random_bits(40, rng);
  // Coordinates pick distinct even indices, so no probing touches odd ones.
  std::vector<double> x(40);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(2 * (i * 37 % 1000));
  const double before = fitness(cover, set, x, bits, FitnessConfig{}, 1);
  CandidateSet altered = set;
  for (std::size_t i = 1; i < altered.size(); i += 2) altered.slots[i] = altered.slots[(i + 500) % altered.size() | 1];
  EXPECT_EQ(fitness(cover, altered, x, bits, FitnessConfig{}, 1), before);
  EXPECT_EQ(FitnessEvaluator(cover, altered, bits, FitnessConfig{}, 1)(x),
            FitnessEvaluator(cover, set, bits, FitnessConfig{}, 1)(x));
}

TEST(FitnessEvaluator, RejectsMismatchedInputs) {
  const RasterImage cover(16, 16);
  const auto set = candidate_positions(block_variance_map(cover, 8), cover, 0.25);
  EXPECT_ERROR_KIND(FitnessEvaluator(RasterImage(16, 8), set, BitStream{}, FitnessConfig{}, 1), DimensionMismatch);
  EXPECT_ERROR_KIND(FitnessEvaluator(cover, set, BitStream(std::vector<std::uint8_t>(193, 0)), FitnessConfig{}, 1),
                    PlanInfeasible);
  const FitnessEvaluator eval(cover, set, BitStream(std::vector<std::uint8_t>(10, 1)), FitnessConfig{}, 1);
  EXPECT_ERROR_KIND(eval(std::vector<double>{1, 2}), InvalidArgument);
}

PipelineSettings quick_settings(std::uint64_t seed = 1) {
  PipelineSettings s;
  s.optimizer_params.population_size = 4;
  s.optimizer_params.max_iterations = 3;
  s.optimizer_params.seed = seed;
  return s;
}

TEST(Pipeline, EndToEndRoundTrip) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    const RasterImage cover = testing::textured_image(40 + rng() % 40, 40 + rng() % 40, rng);
    PipelineSettings settings = quick_settings(trial);
    settings.lsb_depth = 1 + trial % 2;
    settings.optimizer = trial % 3 ? OptimizerKind::Hho : OptimizerKind::Random;
    const std::size_t cap = capacity(candidate_positions(block_variance_map(cover, 8), cover, 0.5), settings.lsb_depth);
    const AudioPayload audio = testing::random_audio(1 + rng() % (cap / 8 / 4 - 24), rng);
    if (framed_bit_length(audio.data.size()) > cap) continue;
    const auto out = run_embedding(cover, audio, settings);
    EXPECT_EQ(run_extraction(out.stego, out.key), audio);
    EXPECT_EQ(out.key.payload_bit_length, framed_bit_length(audio.data.size()));
    EXPECT_EQ(out.key.slots.size(), (out.payload_bits + settings.lsb_depth - 1) / settings.lsb_depth);
    const auto cb = out.channel_bits;
    EXPECT_EQ(cb[0] + cb[1] + cb[2], out.payload_bits);
    // Re-saving losslessly keeps the payload.
    EXPECT_EQ(run_extraction(load_image(save_image(out.stego)), read_key(write_key(out.key))), audio);
  }
}

TEST(Pipeline, DeterministicForSeed) {
  std::mt19937_64 rng(72);
  const RasterImage cover = testing::textured_image(48, 48, rng);
  const AudioPayload audio = testing::sine_audio(40);
  const auto a = run_embedding(cover, audio, quick_settings(9));
  const auto b = run_embedding(cover, audio, quick_settings(9));
  EXPECT_EQ(a.stego, b.stego);
  EXPECT_EQ(a.key, b.key);
  EXPECT_EQ(a.optimization, b.optimization);
}

TEST(Pipeline, CapacityExceededBeforeSearch) {
  const RasterImage cover = testing::constant_image(16, 16, 1, 2, 3);
  PipelineSettings settings;
  // A search this large would never finish; the guard must fire first.
  settings.optimizer_params.population_size = 1'000'000;
  settings.optimizer_params.max_iterations = 1'000'000;
  try {
    run_embedding(cover, testing::sine_audio(100), settings);
    FAIL() << "expected CapacityExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapacityExceeded);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("requires 992 bits"), std::string::npos) << msg;
    EXPECT_NE(msg.find("only 384"), std::string::npos) << msg;
  }
}

TEST(Pipeline, WrongKeyIsChecksumMismatch) {
  std::mt19937_64 rng(73);
  std::vector<EmbeddingOutcome> runs;
  for (int i = 0; i < 11; ++i) {
    const RasterImage cover = testing::noise_image(32, 32, rng);
    runs.push_back(run_embedding(cover, testing::random_audio(10 + rng() % 30, rng), quick_settings(i)));
  }
  int pairs = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = 0; j < runs.size(); ++j) {
      if (i == j) continue;
      EXPECT_ERROR_KIND(run_extraction(runs[i].stego, runs[j].key), ChecksumMismatch);
      ++pairs;
    }
  }
  EXPECT_GE(pairs, 100);
}

TEST(Pipeline, KeyForOtherDimensions) {
  std::mt19937_64 rng(74);
  const auto out = run_embedding(testing::noise_image(32, 32, rng), testing::sine_audio(8), quick_settings());
  EXPECT_ERROR_KIND(run_extraction(testing::noise_image(32, 33, rng), out.key), KeyMismatch);
}

TEST(Pipeline, CorruptedLowBitsFailChecksum) {
  std::mt19937_64 rng(75);
  const auto out = run_embedding(testing::textured_image(48, 48, rng), testing::sine_audio(60), quick_settings());
  RasterImage damaged = out.stego;
  for (auto& v : damaged.values()) v = static_cast<std::uint8_t>((v & 0xFC) | 0x02);
  EXPECT_ERROR_KIND(run_extraction(damaged, out.key), ChecksumMismatch);
}

TEST(Pipeline, SettingsValidation) {
  PipelineSettings s;
  s.lsb_depth = 3;
  EXPECT_ERROR_KIND(s.validate(), InvalidArgument);
  s = PipelineSettings{};
  s.top_fraction = 0.0;
  EXPECT_ERROR_KIND(s.validate(), InvalidArgument);
  s = PipelineSettings{};
  s.fitness.alpha = -0.1;
  EXPECT_ERROR_KIND(s.validate(), InvalidArgument);
}

}  // namespace
}  // namespace hawkstego
