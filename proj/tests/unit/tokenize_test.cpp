#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "scorekeeping/tokenize.hpp"

namespace sk = scorekeeping;

TEST(Tokenizer, ConformanceFixture) {
  std::ifstream in(std::string(SK_FIXTURE_DIR) + "/tokenizer_conformance.jsonl");
  ASSERT_TRUE(in);
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    const auto want = j["tokens"].get<std::vector<std::string>>();
    EXPECT_EQ(sk::tokenize(j["text"].get<std::string>()), want) << j["text"];
    ++n;
  }
  EXPECT_EQ(n, 20);
}

TEST(Tokenizer, PunctuationPredicate) {
  for (const char* p : {".", ",", "?", "!", ";", ":"}) EXPECT_TRUE(sk::is_punctuation(p));
  for (const char* p : {"'", "-", "..", "a", ""}) EXPECT_FALSE(sk::is_punctuation(p));
}

TEST(Tokenizer, DetokenizeAttachesPunctuation) {
  EXPECT_EQ(sk::detokenize(sk::tokenize("yes , it is .")), "yes, it is.");
  EXPECT_EQ(sk::join_tokens(sk::tokenize("yes, it is.")), "yes , it is .");
  EXPECT_EQ(sk::detokenize(sk::Tokens{}), "");
}

// Property: detokenize is a right inverse of tokenize on tokenizer output.
TEST(TokenizerProperty, DetokenizeRoundTrips) {
  sktest::Gen gen(77);
  const std::string alphabet = "ab'-1 .,?!;:\tXY";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int len = gen.between(0, 40);
    for (int i = 0; i < len; ++i) text.push_back(alphabet[static_cast<std::size_t>(gen.between(0, int(alphabet.size()) - 1))]);
    const auto tokens = sk::tokenize(text);
    for (const auto& t : tokens) {
      ASSERT_FALSE(t.empty());
      ASSERT_EQ(t.find(' '), std::string::npos);
    }
    ASSERT_EQ(sk::tokenize(sk::detokenize(tokens)), tokens) << text;
    ASSERT_EQ(sk::tokenize(sk::join_tokens(tokens)), tokens) << text;
  }
}
