#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace scorekeeping {

using WordSet = std::set<std::string, std::less<>>;

/// Word lists consulted by the rule engine and caption chunker. Every list
/// can be replaced from a file (one lowercase word per line, "#" comments).
struct Lexicons {
  WordSet positive_cues;      // yes, yeah, ...
  WordSet negative_cues;      // no, nope, 0, ...
  WordSet colors;
  WordSet adjectives;
  WordSet nouns;              // caption fallback chunker
  WordSet irregular_plurals;
  WordSet determiners;        // stripped by the {X:bare} modifier
  WordSet prepositions;       // bound the head noun for number agreement
  WordSet pronouns;           // replacement and filter list

  static const Lexicons& defaults();
};

WordSet load_word_list(const std::filesystem::path& path);

/// Number heuristic: the head is the last token before the first preposition;
/// plural if it is an irregular plural or ends in "s" (but not "ss", "us", "is").
bool looks_plural(const Lexicons& lex, std::span<const std::string> phrase);

}  // namespace scorekeeping
