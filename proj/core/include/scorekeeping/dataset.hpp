#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scorekeeping/model.hpp"

namespace scorekeeping {

struct RepKey {
  std::int64_t dialogue_id = 0;
  Role role = Role::Answerer;
  int turn = 0;

  friend bool operator==(const RepKey&, const RepKey&) = default;
};

/// Unit consumed by the probe: representation at a turn, a proposition, and
/// the gold class of that proposition at that turn.
struct Datapoint {
  RepKey rep;
  std::int64_t prop_id = 0;
  ScoreClass gold;

  friend bool operator==(const Datapoint&, const Datapoint&) = default;
};

inline constexpr double kDefaultCaptionRate = 0.15;
inline constexpr std::size_t kDefaultCapPerSide = 1000;

/// One datapoint per (turn 0..T, proposition), dialogue by dialogue in input
/// order, turn-major within a dialogue. Throws ConsistencyError when a
/// proposition names an unknown dialogue or a source turn beyond T.
std::vector<Datapoint> build_datapoints(std::span<const Dialogue> dialogues, std::span<const Proposition> props,
                                        Role role);

/// Keeps round(rate * n) of the n caption pairs, chosen by a seeded shuffle;
/// pairs stay intact and non-caption propositions pass through. Input order
/// is preserved.
std::vector<Proposition> downsample_captions(std::span<const Proposition> props, double rate, std::uint64_t seed);

/// Per surface (token sequence), keeps k = min(#true, #false, cap) instances
/// of each truth value, chosen by a seeded shuffle over the instances sorted
/// by (dialogue_id, source_turn, id). Surfaces seen with a single truth value
/// disappear. Input order is preserved.
std::vector<Proposition> balance_truth(std::span<const Proposition> props, std::size_t cap_per_side,
                                       std::uint64_t seed);

struct DatasetStats {
  std::size_t dialogues = 0;
  std::size_t propositions = 0;
  std::size_t proposition_types = 0;
  std::size_t datapoints = 0;
  std::size_t vocab_size = 0;
  double avg_props_per_dialogue = 0.0;
  /// Percent of datapoints per class, canonical order; all zero when empty.
  std::array<double, 4> class_percent{};
  /// Percent of propositions: true, false.
  std::array<double, 2> truth_percent{};
  /// Percent of propositions per question kind (polar +, polar -, other).
  std::array<double, 3> kind_percent{};
  std::optional<int> turn_filter;
};

/// `props` should be the propositions the datapoints refer to. Class
/// proportions are restricted to datapoints at `turn` when given.
DatasetStats compute_stats(std::span<const Proposition> props, std::span<const Datapoint> datapoints,
                           std::optional<int> turn = std::nullopt);

std::string stats_to_json(const DatasetStats& stats);
/// Plain-text table in the layout of a dataset summary.
std::string render_stats_table(const DatasetStats& stats);

// SKDS: "SKDS", u16 version, u64 count, then per record
// u64 dialogue_id, u8 role, u8 turn, u64 prop_id, u8 gold; little-endian.
inline constexpr std::uint16_t kDatasetVersion = 1;

void write_dataset(const std::filesystem::path& path, std::span<const Datapoint> datapoints);
std::vector<Datapoint> read_dataset(const std::filesystem::path& path);

}  // namespace scorekeeping
