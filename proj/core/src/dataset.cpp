#include "scorekeeping/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "scorekeeping/binary_io.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/rng.hpp"
#include "scorekeeping/tokenize.hpp"

namespace scorekeeping {

std::vector<Datapoint> build_datapoints(std::span<const Dialogue> dialogues, std::span<const Proposition> props,
                                        Role role) {
  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < dialogues.size(); ++i) index.emplace(dialogues[i].id, i);

  std::vector<std::vector<const Proposition*>> by_dialogue(dialogues.size());
  for (const auto& p : props) {
    auto it = index.find(p.dialogue_id);
    if (it == index.end()) {
      throw ConsistencyError("proposition " + std::to_string(p.id) + " refers to unknown dialogue " +
                             std::to_string(p.dialogue_id));
    }
    const int t = dialogues[it->second].num_turns();
    if (p.source_turn < 0 || p.source_turn > t) {
      throw ConsistencyError("proposition " + std::to_string(p.id) + " has source turn " +
                             std::to_string(p.source_turn) + " but dialogue has " + std::to_string(t) + " turns");
    }
    by_dialogue[it->second].push_back(&p);
  }

  std::vector<Datapoint> out;
  for (std::size_t d = 0; d < dialogues.size(); ++d) {
    const auto& dialogue = dialogues[d];
    for (int l = 0; l <= dialogue.num_turns(); ++l) {
      for (const auto* p : by_dialogue[d]) {
        out.push_back({RepKey{dialogue.id, role, l}, p->id, score_class(*p, role, l, dialogue.num_turns())});
      }
    }
  }
  return out;
}

std::vector<Proposition> downsample_captions(std::span<const Proposition> props, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("caption rate must lie in [0, 1]");
  std::set<std::int64_t> pair_set;
  for (const auto& p : props) {
    if (p.source_turn == 0) pair_set.insert(p.pair_id);
  }
  std::vector<std::int64_t> pairs(pair_set.begin(), pair_set.end());
  Rng rng(seed);
  shuffle(std::span(pairs), rng);
  const auto keep_n = static_cast<std::size_t>(std::llround(rate * static_cast<double>(pairs.size())));
  const std::set<std::int64_t> keep(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(keep_n));

  std::vector<Proposition> out;
  for (const auto& p : props) {
    if (p.source_turn != 0 || keep.contains(p.pair_id)) out.push_back(p);
  }
  return out;
}

std::vector<Proposition> balance_truth(std::span<const Proposition> props, std::size_t cap_per_side,
                                       std::uint64_t seed) {
  struct Buckets {
    std::vector<std::size_t> true_idx;
    std::vector<std::size_t> false_idx;
  };
  std::map<std::string, Buckets> by_surface;
  for (std::size_t i = 0; i < props.size(); ++i) {
    auto& b = by_surface[join_tokens(props[i].surface)];
    (props[i].truth == Truth::TrueToA ? b.true_idx : b.false_idx).push_back(i);
  }

  auto canonical = [&](std::vector<std::size_t>& idx) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& pa = props[a];
      const auto& pb = props[b];
      return std::tie(pa.dialogue_id, pa.source_turn, pa.id) < std::tie(pb.dialogue_id, pb.source_turn, pb.id);
    });
  };

  Rng rng(seed);
  std::vector<char> keep(props.size(), 0);
  for (auto& [surface, b] : by_surface) {
    const std::size_t k = std::min({b.true_idx.size(), b.false_idx.size(), cap_per_side});
    if (k == 0) continue;
    for (auto* bucket : {&b.true_idx, &b.false_idx}) {
      canonical(*bucket);
      shuffle(std::span(*bucket), rng);
      for (std::size_t j = 0; j < k; ++j) keep[(*bucket)[j]] = 1;
    }
  }
  std::vector<Proposition> out;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (keep[i]) out.push_back(props[i]);
  }
  return out;
}

DatasetStats compute_stats(std::span<const Proposition> props, std::span<const Datapoint> datapoints,
                           std::optional<int> turn) {
  DatasetStats s;
  s.turn_filter = turn;
  std::set<std::int64_t> dialogues;
  std::set<std::string> types;
  std::set<std::string> vocab;
  std::array<std::size_t, 2> truth{};
  std::array<std::size_t, 3> kinds{};
  for (const auto& p : props) {
    dialogues.insert(p.dialogue_id);
    types.insert(join_tokens(p.surface));
    vocab.insert(p.surface.begin(), p.surface.end());
    ++truth[p.truth == Truth::TrueToA ? 0 : 1];
    ++kinds[static_cast<std::size_t>(p.question_kind)];
  }
  s.dialogues = dialogues.size();
  s.propositions = props.size();
  s.proposition_types = types.size();
  s.vocab_size = vocab.size();
  s.avg_props_per_dialogue = s.dialogues ? static_cast<double>(s.propositions) / static_cast<double>(s.dialogues) : 0.0;
  if (!props.empty()) {
    const auto n = static_cast<double>(props.size());
    for (std::size_t i = 0; i < 2; ++i) s.truth_percent[i] = 100.0 * static_cast<double>(truth[i]) / n;
    for (std::size_t i = 0; i < 3; ++i) s.kind_percent[i] = 100.0 * static_cast<double>(kinds[i]) / n;
  }

  std::array<std::size_t, 4> classes{};
  std::size_t counted = 0;
  for (const auto& dp : datapoints) {
    if (turn && dp.rep.turn != *turn) continue;
    ++classes[static_cast<std::size_t>(dp.gold.index())];
    ++counted;
  }
  s.datapoints = datapoints.size();
  if (counted > 0) {
    for (std::size_t i = 0; i < 4; ++i) {
      s.class_percent[i] = 100.0 * static_cast<double>(classes[i]) / static_cast<double>(counted);
    }
  }
  return s;
}

std::string stats_to_json(const DatasetStats& s) {
  nlohmann::ordered_json j;
  j["dialogues"] = s.dialogues;
  j["propositions"] = s.propositions;
  j["proposition_types"] = s.proposition_types;
  j["datapoints"] = s.datapoints;
  j["vocab_size"] = s.vocab_size;
  j["avg_props_per_dialogue"] = s.avg_props_per_dialogue;
  j["turn_filter"] = s.turn_filter ? nlohmann::ordered_json(*s.turn_filter) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json classes;
  for (int i = 0; i < 4; ++i) classes[class_name(ScoreClass::from_index(i))] = s.class_percent[static_cast<std::size_t>(i)];
  j["class_percent"] = classes;
  j["truth_percent"] = {{"true", s.truth_percent[0]}, {"false", s.truth_percent[1]}};
  j["question_kind_percent"] = {{"polar_positive", s.kind_percent[0]},
                                {"polar_negative", s.kind_percent[1]},
                                {"other", s.kind_percent[2]}};
  return j.dump(2);
}

std::string render_stats_table(const DatasetStats& s) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const std::string& value) {
    out << std::left << std::setw(26) << name << value << '\n';
  };
  auto pct = [](double v) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(2) << v;
    return o.str();
  };
  row("dialogues", std::to_string(s.dialogues));
  row("propositions", std::to_string(s.propositions));
  row("proposition types", std::to_string(s.proposition_types));
  row("datapoints", std::to_string(s.datapoints));
  row("vocab size", std::to_string(s.vocab_size));
  row("avg. |P_D|", pct(s.avg_props_per_dialogue));
  row("true to A and private", pct(s.class_percent[0]));
  row("true to A and shared", pct(s.class_percent[1]));
  row("false to A and private", pct(s.class_percent[2]));
  row("false to A and shared", pct(s.class_percent[3]));
  row("true to A (props)", pct(s.truth_percent[0]));
  row("false to A (props)", pct(s.truth_percent[1]));
  row("polar q, positive a", pct(s.kind_percent[0]));
  row("polar q, negative a", pct(s.kind_percent[1]));
  row("other q", pct(s.kind_percent[2]));
  return out.str();
}

void write_dataset(const std::filesystem::path& path, std::span<const Datapoint> datapoints) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("SKDS", 4);
  binary::write_le<std::uint16_t>(out, kDatasetVersion);
  binary::write_le<std::uint64_t>(out, datapoints.size());
  for (const auto& dp : datapoints) {
    if (dp.rep.turn < 0 || dp.rep.turn > 255) throw RangeError("turn does not fit the dataset format");
    binary::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(dp.rep.dialogue_id));
    binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(dp.rep.role));
    binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(dp.rep.turn));
    binary::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(dp.prop_id));
    binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(dp.gold.index()));
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

std::vector<Datapoint> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  binary::expect_magic(in, "SKDS");
  const auto version = binary::read_le<std::uint16_t>(in, "version");
  if (version != kDatasetVersion) throw FormatError("unsupported dataset version " + std::to_string(version));
  const auto count = binary::read_le<std::uint64_t>(in, "record count");
  std::vector<Datapoint> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) {
    Datapoint dp;
    dp.rep.dialogue_id = static_cast<std::int64_t>(binary::read_le<std::uint64_t>(in, "dialogue id"));
    const auto role = binary::read_le<std::uint8_t>(in, "role");
    if (role > 1) throw FormatError("bad role byte " + std::to_string(role));
    dp.rep.role = static_cast<Role>(role);
    dp.rep.turn = binary::read_le<std::uint8_t>(in, "turn");
    dp.prop_id = static_cast<std::int64_t>(binary::read_le<std::uint64_t>(in, "proposition id"));
    const auto gold = binary::read_le<std::uint8_t>(in, "gold");
    if (gold > 3) throw FormatError("bad gold class byte " + std::to_string(gold));
    dp.gold = ScoreClass::from_index(gold);
    out.push_back(dp);
  }
  if (!binary::at_eof(in)) throw FormatError("trailing bytes after " + std::to_string(count) + " records");
  return out;
}

}  // namespace scorekeeping
