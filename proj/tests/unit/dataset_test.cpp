#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "scorekeeping/dataset.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/tokenize.hpp"

namespace sk = scorekeeping;

namespace {

// Pool of propositions over a handful of surfaces, with caption pairs mixed in.
std::vector<sk::Proposition> random_pool(sktest::Gen& gen, int n_pairs, int n_surfaces) {
  std::vector<sk::Proposition> out;
  std::int64_t id = 0;
  for (int k = 0; k < n_pairs; ++k) {
    const int s = gen.between(0, n_surfaces - 1);
    const std::int64_t dialogue = gen.between(1, 40);
    const int turn = gen.coin(0.2) ? 0 : gen.between(1, 10);
    const bool swap = gen.coin();
    for (int m = 0; m < 2; ++m) {
      sk::Proposition p;
      p.id = id++;
      p.dialogue_id = dialogue;
      p.source_turn = turn;
      p.pair_id = k;
      // The two members carry the two surfaces of one fact; which one is true varies.
      p.surface = sk::tokenize("fact " + std::to_string(s) + (m == 0 ? " holds" : " fails"));
      p.truth = (m == 0) != swap ? sk::Truth::TrueToA : sk::Truth::FalseToA;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<std::int64_t> ids(const std::vector<sk::Proposition>& props) {
  std::vector<std::int64_t> out;
  for (const auto& p : props) out.push_back(p.id);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sk_dataset_" + name);
}

}  // namespace

TEST(Datapoints, ExpansionMatchesBruteForceLabeler) {
  sktest::Gen gen(3);
  std::vector<sk::Dialogue> dialogues;
  std::vector<sk::Proposition> props;
  std::int64_t next = 0;
  for (int i = 0; i < 50; ++i) {
    auto [d, p] = gen.dialogue_with_props(i + 1, next);
    dialogues.push_back(std::move(d));
    props.insert(props.end(), p.begin(), p.end());
  }
  std::map<std::int64_t, const sk::Proposition*> by_id;
  for (const auto& p : props) by_id[p.id] = &p;
  std::size_t expected = 0;
  for (const auto& d : dialogues) {
    std::size_t own = 0;
    for (const auto& p : props) own += p.dialogue_id == d.id;
    expected += own * static_cast<std::size_t>(d.num_turns() + 1);
  }
  const auto points = sk::build_datapoints(dialogues, props, sk::Role::Answerer);
  ASSERT_EQ(points.size(), expected);
  for (const auto& dp : points) {
    const auto& p = *by_id.at(dp.prop_id);
    ASSERT_EQ(dp.rep.dialogue_id, p.dialogue_id);
    ASSERT_EQ(dp.gold.index(), sktest::brute_force_class(p.source_turn, p.truth == sk::Truth::TrueToA, dp.rep.turn));
  }
}

TEST(Datapoints, UnknownDialogueOrLateTurnIsRejected) {
  sktest::Gen gen(4);
  std::int64_t next = 0;
  auto [d, props] = gen.dialogue_with_props(1, next);
  sk::Proposition stray;
  stray.dialogue_id = 2;
  std::vector<sk::Dialogue> ds{d};
  std::vector<sk::Proposition> bad{stray};
  EXPECT_THROW(sk::build_datapoints(ds, bad, sk::Role::Answerer), sk::ConsistencyError);
  bad[0].dialogue_id = 1;
  bad[0].source_turn = d.num_turns() + 1;
  EXPECT_THROW(sk::build_datapoints(ds, bad, sk::Role::Answerer), sk::ConsistencyError);
}

TEST(Downsample, KeepsRoundedShareOfIntactPairs) {
  sktest::Gen gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pool = random_pool(gen, gen.between(1, 80), 7);
    const double rate = gen.real(0.0, 1.0);
    const auto out = sk::downsample_captions(pool, rate, static_cast<std::uint64_t>(trial));
    std::map<std::int64_t, int> caption_pairs_in;
    std::map<std::int64_t, int> caption_pairs_out;
    std::size_t non_caption_in = 0;
    std::size_t non_caption_out = 0;
    for (const auto& p : pool) p.source_turn == 0 ? ++caption_pairs_in[p.pair_id] : ++non_caption_in;
    for (const auto& p : out) p.source_turn == 0 ? ++caption_pairs_out[p.pair_id] : ++non_caption_out;
    EXPECT_EQ(non_caption_out, non_caption_in);
    EXPECT_EQ(caption_pairs_out.size(), static_cast<std::size_t>(std::llround(rate * double(caption_pairs_in.size()))));
    for (const auto& [pair, n] : caption_pairs_out) EXPECT_EQ(n, 2) << "pair " << pair << " split";
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LT(out[i - 1].id, out[i].id);
  }
}

TEST(Downsample, RateBoundsAndDeterminism) {
  sktest::Gen gen(9);
  const auto pool = random_pool(gen, 60, 5);
  EXPECT_EQ(sk::downsample_captions(pool, 1.0, 1).size(), pool.size());
  for (const auto& p : sk::downsample_captions(pool, 0.0, 1)) EXPECT_NE(p.source_turn, 0);
  EXPECT_EQ(ids(sk::downsample_captions(pool, 0.3, 11)), ids(sk::downsample_captions(pool, 0.3, 11)));
  EXPECT_THROW(sk::downsample_captions(pool, 1.5, 1), sk::ConfigError);
}

// Property: balancing leaves every surface with equal, capped true/false
// counts equal to min(#true, #false, cap), and is a subsequence of its input.
TEST(BalanceProperty, EqualCappedCountsPerSurface) {
  sktest::Gen gen(10);
  for (int trial = 0; trial < 60; ++trial) {
    const auto pool = random_pool(gen, gen.between(1, 300), gen.between(1, 12));
    const std::size_t cap = static_cast<std::size_t>(gen.between(1, 20));
    const auto out = sk::balance_truth(pool, cap, static_cast<std::uint64_t>(trial));
    std::map<std::string, std::pair<std::size_t, std::size_t>> in_counts;
    std::map<std::string, std::pair<std::size_t, std::size_t>> out_counts;
    for (const auto& p : pool) {
      auto& c = in_counts[sk::join_tokens(p.surface)];
      (p.truth == sk::Truth::TrueToA ? c.first : c.second)++;
    }
    std::size_t trues = 0;
    for (const auto& p : out) {
      auto& c = out_counts[sk::join_tokens(p.surface)];
      (p.truth == sk::Truth::TrueToA ? c.first : c.second)++;
      trues += p.truth == sk::Truth::TrueToA;
    }
    EXPECT_EQ(2 * trues, out.size());
    for (const auto& [surface, c] : in_counts) {
      const std::size_t k = std::min({c.first, c.second, cap});
      const auto it = out_counts.find(surface);
      if (k == 0) {
        EXPECT_EQ(it, out_counts.end()) << surface;
        continue;
      }
      ASSERT_NE(it, out_counts.end()) << surface;
      EXPECT_EQ(it->second.first, k) << surface;
      EXPECT_EQ(it->second.second, k) << surface;
    }
    std::size_t j = 0;
    for (const auto& p : pool) {
      if (j < out.size() && out[j].id == p.id) ++j;
    }
    EXPECT_EQ(j, out.size()) << "output is not an order-preserving subset";
  }
}

TEST(Balance, SeedSelectsInstances) {
  sktest::Gen gen(12);
  const auto pool = random_pool(gen, 400, 3);
  const auto a = ids(sk::balance_truth(pool, 5, 1));
  EXPECT_EQ(a, ids(sk::balance_truth(pool, 5, 1)));
  EXPECT_NE(a, ids(sk::balance_truth(pool, 5, 2)));
}

TEST(Stats, PercentagesFromCounts) {
  sktest::Gen gen(13);
  std::vector<sk::Dialogue> dialogues;
  std::vector<sk::Proposition> props;
  std::int64_t next = 0;
  for (int i = 0; i < 20; ++i) {
    auto [d, p] = gen.dialogue_with_props(i + 1, next);
    dialogues.push_back(std::move(d));
    props.insert(props.end(), p.begin(), p.end());
  }
  const auto points = sk::build_datapoints(dialogues, props, sk::Role::Answerer);
  const auto s = sk::compute_stats(props, points);
  double total = 0.0;
  for (double v : s.class_percent) total += v;
  EXPECT_NEAR(total, 100.0, 1e-9);
  EXPECT_NEAR(s.truth_percent[0] + s.truth_percent[1], 100.0, 1e-9);
  EXPECT_EQ(s.propositions, props.size());
  EXPECT_EQ(s.datapoints, points.size());

  const auto at5 = sk::compute_stats(props, points, 5);
  std::array<std::size_t, 4> counts{};
  std::size_t n = 0;
  for (const auto& dp : points) {
    if (dp.rep.turn != 5) continue;
    ++counts[static_cast<std::size_t>(dp.gold.index())];
    ++n;
  }
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(at5.class_percent[c], 100.0 * double(counts[c]) / double(n), 1e-9);

  const auto empty = sk::compute_stats({}, {});
  EXPECT_EQ(empty.class_percent[0], 0.0);
  EXPECT_FALSE(sk::render_stats_table(empty).empty());
}

TEST(Skds, RoundTrip) {
  sktest::Gen gen(14);
  std::vector<sk::Dialogue> dialogues;
  std::vector<sk::Proposition> props;
  std::int64_t next = 0;
  for (int i = 0; i < 10; ++i) {
    auto [d, p] = gen.dialogue_with_props(i + 1000, next);
    dialogues.push_back(std::move(d));
    props.insert(props.end(), p.begin(), p.end());
  }
  const auto points = sk::build_datapoints(dialogues, props, sk::Role::Questioner);
  const auto path = temp_file("rt.skds");
  sk::write_dataset(path, points);
  EXPECT_EQ(std::filesystem::file_size(path), 4 + 2 + 8 + 19 * points.size());
  EXPECT_EQ(sk::read_dataset(path), points);
  sk::write_dataset(path, {});
  EXPECT_TRUE(sk::read_dataset(path).empty());
  std::filesystem::remove(path);
}

TEST(Skds, RejectsDamagedFiles) {
  std::vector<sk::Datapoint> points(3);
  points[1].rep.turn = 4;
  const auto path = temp_file("bad.skds");
  sk::write_dataset(path, points);
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& b) { std::ofstream(path, std::ios::binary) << b; };

  write("SKDX" + bytes.substr(4));
  EXPECT_THROW(sk::read_dataset(path), sk::FormatError);
  write(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(sk::read_dataset(path), sk::FormatError);
  write(bytes + "x");
  EXPECT_THROW(sk::read_dataset(path), sk::FormatError);
  auto v2 = bytes;
  v2[4] = 2;
  write(v2);
  EXPECT_THROW(sk::read_dataset(path), sk::FormatError);
  auto bad_gold = bytes;
  bad_gold[bad_gold.size() - 1] = 9;
  write(bad_gold);
  EXPECT_THROW(sk::read_dataset(path), sk::Error);
  std::filesystem::remove(path);
}
