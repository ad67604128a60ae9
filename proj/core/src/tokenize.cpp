#include "scorekeeping/tokenize.hpp"

#include <cctype>

namespace scorekeeping {

namespace {

constexpr std::string_view kPunctuation = ".,?!;:";

bool is_punct_char(char c) noexcept { return kPunctuation.find(c) != std::string_view::npos; }

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (is_punct_char(raw)) {
      flush();
      out.emplace_back(1, raw);
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : raw);
    }
  }
  flush();
  return out;
}

bool is_punctuation(std::string_view token) noexcept {
  return token.size() == 1 && is_punct_char(token.front());
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !is_punctuation(t)) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace scorekeeping
