#include "scorekeeping/embed.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "scorekeeping/binary_io.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/propgen.hpp"
#include "scorekeeping/rng.hpp"
#include "scorekeeping/tokenize.hpp"

namespace scorekeeping {

namespace {

constexpr std::uint32_t kMaxKeyBytes = 1u << 16;

void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

void add_token_vector(std::vector<double>& acc, std::string_view token, std::uint64_t seed) {
  std::uint64_t state = fnv1a64(token) ^ mix64(seed);
  for (double& x : acc) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x += 2.0 * u - 1.0;
  }
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view whole) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("malformed key: " + std::string(whole));
  return value;
}

}  // namespace

VectorStore::VectorStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ShapeError("vector store dimension must be positive");
}

bool VectorStore::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void VectorStore::insert(std::string key, std::vector<float> vec) {
  if (vec.size() != dim_) {
    throw ShapeError("vector for '" + key + "' has " + std::to_string(vec.size()) + " components, store dim is " +
                     std::to_string(dim_));
  }
  if (key.size() > kMaxKeyBytes) throw FormatError("key too long");
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(vec));
  if (!inserted) throw FormatError("duplicate key '" + it->first + "'");
}

std::span<const float> VectorStore::lookup(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw MissingKeyError(std::string(key));
  return it->second;
}

std::vector<double> VectorStore::lookup_f64(std::string_view key) const {
  const auto v = lookup(key);
  return {v.begin(), v.end()};
}

void write_store(const VectorStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("SKVE", 4);
  binary::write_le<std::uint16_t>(out, kStoreVersion);
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim()));
  binary::write_le<std::uint64_t>(out, store.size());
  for (const auto& [key, vec] : store.entries()) {
    binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(key.size()));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    for (float x : vec) binary::write_f32(out, x);
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(std::string_view, std::span<const float>)>& fn,
                     std::size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  binary::expect_magic(in, "SKVE");
  const auto version = binary::read_le<std::uint16_t>(in, "version");
  if (version != kStoreVersion) throw FormatError("unsupported vector store version " + std::to_string(version));
  const auto dim = binary::read_le<std::uint32_t>(in, "dim");
  if (dim == 0) throw FormatError("vector store with dimension 0");
  if (expected_dim != 0 && dim != expected_dim) {
    throw ShapeError(path.string() + ": dimension " + std::to_string(dim) + ", expected " +
                     std::to_string(expected_dim));
  }
  const auto count = binary::read_le<std::uint64_t>(in, "count");
  std::string key;
  std::vector<float> vec(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = binary::read_le<std::uint32_t>(in, "key length");
    if (len > kMaxKeyBytes) throw FormatError("key length " + std::to_string(len) + " exceeds limit");
    key.resize(len);
    binary::read_exact(in, key.data(), len, "key");
    for (auto& x : vec) x = binary::read_f32(in, "vector");
    fn(key, vec);
  }
  if (!binary::at_eof(in)) throw FormatError("trailing bytes after " + std::to_string(count) + " records");
}

VectorStore read_store(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw FormatError("cannot open " + path.string());
  binary::expect_magic(probe, "SKVE");
  (void)binary::read_le<std::uint16_t>(probe, "version");
  const auto dim = binary::read_le<std::uint32_t>(probe, "dim");
  probe.close();
  if (dim == 0) throw FormatError("vector store with dimension 0");

  VectorStore store(dim);
  for_each_record(
      path, [&](std::string_view key, std::span<const float> vec) {
        store.insert(std::string(key), std::vector<float>(vec.begin(), vec.end()));
      },
      expected_dim);
  return store;
}

std::string rep_key(const RepKey& key) {
  return "d" + std::to_string(key.dialogue_id) + "/" + std::string(role_tag(key.role)) + "/t" +
         std::to_string(key.turn);
}

RepKey parse_rep_key(std::string_view key) {
  const auto slash1 = key.find('/');
  const auto slash2 = slash1 == std::string_view::npos ? slash1 : key.find('/', slash1 + 1);
  if (key.empty() || key.front() != 'd' || slash2 == std::string_view::npos) {
    throw FormatError("malformed representation key: " + std::string(key));
  }
  RepKey out;
  out.dialogue_id = parse_int<std::int64_t>(key.substr(1, slash1 - 1), key);
  const auto role = key.substr(slash1 + 1, slash2 - slash1 - 1);
  if (role == "A") {
    out.role = Role::Answerer;
  } else if (role == "Q") {
    out.role = Role::Questioner;
  } else {
    throw FormatError("malformed representation key: " + std::string(key));
  }
  const auto turn = key.substr(slash2 + 1);
  if (turn.size() < 2 || turn.front() != 't') throw FormatError("malformed representation key: " + std::string(key));
  out.turn = parse_int<int>(turn.substr(1), key);
  return out;
}

std::string prop_key(std::span<const std::string> surface) { return "s" + hex64(fnv1a64(join_tokens(surface))); }

std::vector<double> synth_embed(std::span<const std::string> tokens, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ShapeError("embedding dimension must be positive");
  std::vector<double> v(dim, 0.0);
  if (tokens.empty()) return v;
  for (const auto& t : tokens) add_token_vector(v, t, seed);
  const auto n = static_cast<double>(tokens.size());
  for (double& x : v) x /= n;
  normalize(v);
  return v;
}

std::vector<std::vector<double>> synth_dialogue_reps(const Dialogue& dialogue, Role role, std::size_t dim,
                                                     std::uint64_t seed, SynthMode mode) {
  std::vector<std::vector<double>> reps;
  const int rows = dialogue.num_turns() + 1;
  if (mode == SynthMode::Noise) {
    for (int l = 0; l < rows; ++l) {
      std::uint64_t state = mix64(seed ^ mix64(static_cast<std::uint64_t>(dialogue.id) ^
                                               mix64(static_cast<std::uint64_t>(role) * 1315423911ULL +
                                                     static_cast<std::uint64_t>(l))));
      std::vector<double> v(dim);
      for (double& x : v) x = 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
      normalize(v);
      reps.push_back(std::move(v));
    }
    return reps;
  }
  std::vector<double> acc(dim, 0.0);
  for (int l = 0; l < rows; ++l) {
    const auto turn = synth_embed(turn_tokens(dialogue, l), dim, seed);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += turn[i];
    auto r = acc;
    normalize(r);
    reps.push_back(std::move(r));
  }
  return reps;
}

VectorStore synth_rep_store(std::span<const Dialogue> dialogues, std::span<const Role> roles, std::size_t dim,
                            std::uint64_t seed, SynthMode mode) {
  VectorStore store(dim);
  for (const auto& d : dialogues) {
    for (Role role : roles) {
      const auto reps = synth_dialogue_reps(d, role, dim, seed, mode);
      for (std::size_t l = 0; l < reps.size(); ++l) {
        store.insert(rep_key({d.id, role, static_cast<int>(l)}), std::vector<float>(reps[l].begin(), reps[l].end()));
      }
    }
  }
  return store;
}

VectorStore synth_prop_store(std::span<const Proposition> props, std::size_t dim, std::uint64_t seed) {
  VectorStore store(dim);
  for (const auto& p : props) {
    auto key = prop_key(p.surface);
    if (store.contains(key)) continue;
    const auto v = synth_embed(p.surface, dim, seed);
    store.insert(std::move(key), std::vector<float>(v.begin(), v.end()));
  }
  return store;
}

SynthMode parse_synth_mode(std::string_view s) {
  if (s == "cumulative") return SynthMode::Cumulative;
  if (s == "noise") return SynthMode::Noise;
  throw ConfigError("unknown synthetic mode: " + std::string(s));
}

}  // namespace scorekeeping
