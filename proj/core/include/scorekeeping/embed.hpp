#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scorekeeping/dataset.hpp"
#include "scorekeeping/model.hpp"

namespace scorekeeping {

inline constexpr std::size_t kRepDim = 512;
inline constexpr std::size_t kPropDim = 768;

/// Fixed-dimension float32 vectors keyed by string.
class VectorStore {
 public:
  explicit VectorStore(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view key) const;

  /// Throws ShapeError on a wrong length and FormatError on a duplicate key.
  void insert(std::string key, std::vector<float> vec);

  /// Throws MissingKeyError naming the key.
  std::span<const float> lookup(std::string_view key) const;
  /// Widened copy.
  std::vector<double> lookup_f64(std::string_view key) const;

  const std::map<std::string, std::vector<float>, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<float>, std::less<>> entries_;
};

// SKVE: "SKVE", u16 version=1, u32 dim, u64 count, then per record
// u32 key byte length, UTF-8 key, dim x f32; little-endian. Records are
// written in key order.
inline constexpr std::uint16_t kStoreVersion = 1;

void write_store(const VectorStore& store, const std::filesystem::path& path);
/// `expected_dim` of 0 accepts any dimension.
VectorStore read_store(const std::filesystem::path& path, std::size_t expected_dim = 0);
/// Streams records without holding the file in memory.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(std::string_view key, std::span<const float> vec)>& fn,
                     std::size_t expected_dim = 0);

/// "d{dialogue_id}/{A|Q}/t{turn}".
std::string rep_key(const RepKey& key);
RepKey parse_rep_key(std::string_view key);
/// "s" + 16 hex digits of FNV-1a over the space-joined surface tokens.
std::string prop_key(std::span<const std::string> surface);

/// Bag-of-tokens pseudo embedding, unit L2 norm (zero vector for no tokens).
/// Each token vector is a splitmix64 stream seeded from hash(token) ^ seed with
/// components uniform in [-1, 1); a prefix of a larger dim equals the smaller dim.
std::vector<double> synth_embed(std::span<const std::string> tokens, std::size_t dim, std::uint64_t seed);

enum class SynthMode { Cumulative, Noise };

/// r_0..r_T for a dialogue. Cumulative: r_l is the normalised sum of the
/// embeddings of turns 0..l (caption, then question+answer tokens). Noise:
/// r_l is a random unit vector depending only on (seed, dialogue, role, l).
std::vector<std::vector<double>> synth_dialogue_reps(const Dialogue& dialogue, Role role, std::size_t dim,
                                                     std::uint64_t seed, SynthMode mode);

/// Fills a representation store for every dialogue and role.
VectorStore synth_rep_store(std::span<const Dialogue> dialogues, std::span<const Role> roles, std::size_t dim,
                            std::uint64_t seed, SynthMode mode);
/// One embedding per distinct proposition surface.
VectorStore synth_prop_store(std::span<const Proposition> props, std::size_t dim, std::uint64_t seed);

/// Synthetic VisDial-like dialogues whose turns exercise the canonical rules,
/// for self-contained end-to-end runs. Each turn draws its noun from a pool
/// reserved for that turn position, so content words do not repeat within a
/// dialogue and a proposition's source turn is recoverable from its words.
std::vector<Dialogue> synth_corpus(std::size_t count, std::uint64_t seed, Split split, std::int64_t first_id = 1);

SynthMode parse_synth_mode(std::string_view s);

}  // namespace scorekeeping
