#include "scorekeeping/corpus_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scorekeeping/errors.hpp"
#include "scorekeeping/rng.hpp"
#include "scorekeeping/tokenize.hpp"

namespace scorekeeping {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string resolve_text(const json& value, const json* pool, const char* what) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) {
    if (pool == nullptr || !pool->is_array()) {
      throw FormatError(std::string("dialog ") + what + " is an index but no pooled '" + what + "s' array exists");
    }
    const auto idx = value.get<std::int64_t>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= pool->size()) {
      throw FormatError(std::string(what) + " index " + std::to_string(idx) + " out of range");
    }
    return (*pool)[static_cast<std::size_t>(idx)].get<std::string>();
  }
  throw FormatError(std::string("dialog ") + what + " must be a string or an integer index");
}

PosTag parse_tag(const std::string& s) {
  if (s == "NOUN" || s == "PROPN") return PosTag::Noun;
  if (s == "ADJ") return PosTag::Adj;
  return PosTag::Other;
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<Dialogue> parse_dialogues(const std::string& json_text, Split default_split) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("dialogue JSON: ") + e.what());
  }
  std::optional<Split> top_split;
  if (root.is_object() && root.contains("split")) top_split = parse_split(root["split"].get<std::string>());
  const json* data = &root;
  if (root.is_object() && root.contains("data") && root["data"].is_object()) data = &root["data"];
  if (!data->is_object() || !data->contains("dialogs") || !(*data)["dialogs"].is_array()) {
    throw FormatError("dialogue JSON must contain a 'dialogs' array");
  }
  const json* questions = data->contains("questions") ? &(*data)["questions"] : nullptr;
  const json* answers = data->contains("answers") ? &(*data)["answers"] : nullptr;

  std::vector<Dialogue> out;
  try {
    for (const auto& d : (*data)["dialogs"]) {
      Dialogue dialogue;
      dialogue.image_id = d.value("image_id", std::int64_t{0});
      dialogue.id = d.contains("id") ? d["id"].get<std::int64_t>() : dialogue.image_id;
      dialogue.caption = tokenize(d.value("caption", std::string{}));
      dialogue.split = d.contains("split") ? parse_split(d["split"].get<std::string>())
                                           : top_split.value_or(default_split);
      int index = 0;
      for (const auto& round : d.value("dialog", json::array())) {
        // VisDial test dialogs stop at the round without an answer.
        if (!round.contains("answer") || !round.contains("question")) break;
        QaTurn turn;
        turn.index = ++index;
        turn.question = tokenize(resolve_text(round["question"], questions, "question"));
        turn.answer = tokenize(resolve_text(round["answer"], answers, "answer"));
        dialogue.turns.push_back(std::move(turn));
      }
      if (dialogue.caption.empty()) throw FormatError("dialogue " + std::to_string(dialogue.id) + " has no caption");
      validate(dialogue);
      out.push_back(std::move(dialogue));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("dialogue JSON: ") + e.what());
  }
  return out;
}

std::vector<Dialogue> load_dialogues(const std::filesystem::path& path, Split default_split) {
  return parse_dialogues(read_file(path), default_split);
}

void write_dialogues(const std::filesystem::path& path, const std::vector<Dialogue>& dialogues) {
  ordered_json dialogs = ordered_json::array();
  for (const auto& d : dialogues) {
    ordered_json rounds = ordered_json::array();
    for (const auto& t : d.turns) {
      rounds.push_back({{"question", detokenize(t.question)}, {"answer", detokenize(t.answer)}});
    }
    dialogs.push_back({{"id", d.id},
                       {"image_id", d.image_id},
                       {"split", std::string(to_string(d.split))},
                       {"caption", detokenize(d.caption)},
                       {"dialog", std::move(rounds)}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << ordered_json{{"dialogs", std::move(dialogs)}}.dump(1) << '\n';
}

std::map<std::int64_t, CorefSidecar> load_coref(const std::filesystem::path& path) {
  std::map<std::int64_t, CorefSidecar> out;
  for_each_json_line(path, [&](const json& obj) {
    CorefSidecar sc;
    sc.dialogue_id = obj.at("dialogue_id").get<std::int64_t>();
    for (const auto& cluster : obj.at("clusters")) {
      std::vector<Mention> mentions;
      for (const auto& m : cluster) {
        if (!m.is_array() || m.size() != 3) throw SidecarError("mention must be [turn,start,end]");
        const auto start = m[1].get<std::int64_t>();
        const auto end = m[2].get<std::int64_t>();
        if (start < 0 || end < 0) throw SidecarError("negative mention offset");
        mentions.push_back({m[0].get<int>(), static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
      }
      sc.clusters.push_back(std::move(mentions));
    }
    out[sc.dialogue_id] = std::move(sc);
  });
  return out;
}

std::map<std::int64_t, PosSidecar> load_pos(const std::filesystem::path& path) {
  std::map<std::int64_t, PosSidecar> out;
  for_each_json_line(path, [&](const json& obj) {
    PosSidecar sc;
    sc.dialogue_id = obj.at("dialogue_id").get<std::int64_t>();
    for (const auto& turn : obj.at("tags")) {
      std::vector<PosTag> tags;
      for (const auto& t : turn) tags.push_back(parse_tag(t.get<std::string>()));
      sc.tags.push_back(std::move(tags));
    }
    out[sc.dialogue_id] = std::move(sc);
  });
  return out;
}

std::string proposition_to_json(const Proposition& p) {
  ordered_json obj;
  obj["id"] = p.id;
  obj["dialogue_id"] = p.dialogue_id;
  obj["source_turn"] = p.source_turn;
  obj["surface"] = detokenize(p.surface);
  obj["truth"] = to_string(p.truth);
  obj["polarity_kind"] = to_string(p.polarity_kind);
  obj["rule_id"] = p.rule_id;
  obj["question_kind"] = to_string(p.question_kind);
  obj["pair_id"] = p.pair_id;
  return obj.dump();
}

Proposition proposition_from_json(const std::string& line) {
  try {
    const auto obj = json::parse(line);
    Proposition p;
    p.id = obj.at("id").get<std::int64_t>();
    p.dialogue_id = obj.at("dialogue_id").get<std::int64_t>();
    p.source_turn = obj.at("source_turn").get<int>();
    p.surface = tokenize(obj.at("surface").get<std::string>());
    p.truth = parse_truth(obj.at("truth").get<std::string>());
    p.polarity_kind = parse_polarity_kind(obj.at("polarity_kind").get<std::string>());
    p.rule_id = obj.at("rule_id").get<std::string>();
    p.question_kind = parse_question_kind(obj.at("question_kind").get<std::string>());
    p.pair_id = obj.value("pair_id", p.id);
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("proposition record: ") + e.what());
  }
}

void write_propositions(std::ostream& out, const std::vector<Proposition>& props) {
  for (const auto& p : props) out << proposition_to_json(p) << '\n';
}

void write_propositions(const std::filesystem::path& path, const std::vector<Proposition>& props) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_propositions(out, props);
}

std::vector<Proposition> read_propositions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<Proposition> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(proposition_from_json(line));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string file_digest(const std::filesystem::path& path) { return hex64(fnv1a64(read_file(path))); }

}  // namespace scorekeeping
