#pragma once

// JSON readers and writers for dialogues, sidecars and propositions.
//
// Dialogues: {"dialogs":[{"id":1,"image_id":2,"caption":"...","dialog":[{"question":"...","answer":"..."}]}]}
// or the pooled VisDial v1.0 layout where "question"/"answer" are indices into
// top-level "questions"/"answers" arrays (optionally nested under "data").
// A missing "id" falls back to "image_id"; the split comes from the dialog,
// the top-level "split", or the caller's default, in that order.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scorekeeping/model.hpp"
#include "scorekeeping/propgen.hpp"

namespace scorekeeping {

std::vector<Dialogue> parse_dialogues(const std::string& json_text, Split default_split = Split::Train);
std::vector<Dialogue> load_dialogues(const std::filesystem::path& path, Split default_split = Split::Train);
void write_dialogues(const std::filesystem::path& path, const std::vector<Dialogue>& dialogues);

/// {"dialogue_id":int, "clusters":[[[turn,start,end],...],...]} per line.
std::map<std::int64_t, CorefSidecar> load_coref(const std::filesystem::path& path);
/// {"dialogue_id":int, "tags":[["NOUN","ADJ","OTHER",...],...]} per line.
std::map<std::int64_t, PosSidecar> load_pos(const std::filesystem::path& path);

std::string proposition_to_json(const Proposition& p);
Proposition proposition_from_json(const std::string& line);
void write_propositions(std::ostream& out, const std::vector<Proposition>& props);
void write_propositions(const std::filesystem::path& path, const std::vector<Proposition>& props);
std::vector<Proposition> read_propositions(const std::filesystem::path& path);

/// Reads a whole file; throws FormatError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// FNV-1a digest of a file's bytes, hex-encoded.
std::string file_digest(const std::filesystem::path& path);

}  // namespace scorekeeping
