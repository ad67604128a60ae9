#pragma once

#include <span>
#include <string>
#include <string_view>

#include "scorekeeping/model.hpp"

namespace scorekeeping {

/// Lowercases, splits on whitespace and detaches . , ? ! ; : as separate
/// tokens. Apostrophes stay inside tokens ("it's" is one token).
Tokens tokenize(std::string_view text);

bool is_punctuation(std::string_view token) noexcept;

/// Joins tokens with single spaces, attaching punctuation to the preceding
/// token. tokenize(detokenize(t)) == t for any tokenizer output t.
std::string detokenize(std::span<const std::string> tokens);

/// Tokens joined by single spaces; the canonical key for surface equality.
std::string join_tokens(std::span<const std::string> tokens);

}  // namespace scorekeeping
