#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/model.hpp"

namespace sk = scorekeeping;

namespace {

sk::Proposition prop_at(int source_turn, sk::Truth truth = sk::Truth::TrueToA, std::int64_t dialogue = 1) {
  sk::Proposition p;
  p.id = source_turn;
  p.dialogue_id = dialogue;
  p.source_turn = source_turn;
  p.truth = truth;
  p.surface = {"there", "are", "two", "birds", "."};
  return p;
}

sk::Dialogue full_dialogue(std::int64_t id) {
  sk::Dialogue d;
  d.id = id;
  d.caption = {"a", "bird"};
  for (int t = 1; t <= sk::kMaxTurns; ++t) d.turns.push_back({t, {"any", "birds", "?"}, {"yes"}});
  return d;
}

}  // namespace

TEST(ScoreClass, TurnFourColumnIsPrivateThenShared) {
  const auto p = prop_at(4);
  for (int row = 0; row <= 10; ++row) {
    const auto c = sk::score_class(p, sk::Role::Answerer, row);
    EXPECT_EQ(c.visibility, row < 4 ? sk::Visibility::Private : sk::Visibility::Shared) << row;
    EXPECT_EQ(c.truth, sk::Truth::TrueToA);
  }
}

TEST(ScoreClass, BirdsSharedFromSecondRow) {
  const auto p = prop_at(2);
  EXPECT_EQ(sk::score_class(p, sk::Role::Answerer, 1), sk::kTruePrivate);
  EXPECT_EQ(sk::score_class(p, sk::Role::Answerer, 2), sk::kTrueShared);
  EXPECT_EQ(sk::score_class(p, sk::Role::Answerer, 10), sk::kTrueShared);
}

TEST(ScoreClass, CaptionIsSharedEverywhere) {
  const auto p = prop_at(0, sk::Truth::FalseToA);
  for (int row = 0; row <= 10; ++row) EXPECT_EQ(sk::score_class(p, sk::Role::Answerer, row), sk::kFalseShared);
}

TEST(ScoreClass, RowOutsideDialogueIsRangeError) {
  const auto p = prop_at(3);
  EXPECT_THROW(sk::score_class(p, sk::Role::Answerer, -1), sk::RangeError);
  EXPECT_THROW(sk::score_class(p, sk::Role::Answerer, 11), sk::RangeError);
  EXPECT_THROW(sk::score_class(p, sk::Role::Answerer, 6, 5), sk::RangeError);
}

TEST(ScoreClass, CanonicalOrder) {
  const auto& all = sk::ScoreClass::all();
  EXPECT_EQ(all[0], sk::kTruePrivate);
  EXPECT_EQ(all[1], sk::kTrueShared);
  EXPECT_EQ(all[2], sk::kFalsePrivate);
  EXPECT_EQ(all[3], sk::kFalseShared);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(sk::ScoreClass::from_index(i).index(), i);
  EXPECT_THROW(sk::ScoreClass::from_index(4), sk::RangeError);
}

TEST(TaskProjection, LabelTables) {
  using sk::TaskVariant;
  const int tf[] = {0, 0, 1, 1};
  const int ps[] = {0, 1, 0, 1};
  const int px[] = {0, 1, 0, 2};
  for (int i = 0; i < 4; ++i) {
    const auto c = sk::ScoreClass::from_index(i);
    EXPECT_EQ(sk::project_class(c, TaskVariant::TFxPS), i);
    EXPECT_EQ(sk::project_class(c, TaskVariant::TF), tf[i]);
    EXPECT_EQ(sk::project_class(c, TaskVariant::PS), ps[i]);
    EXPECT_EQ(sk::project_class(c, TaskVariant::PxTSFS), px[i]);
  }
  EXPECT_EQ(sk::num_labels(TaskVariant::TFxPS), 4);
  EXPECT_EQ(sk::num_labels(TaskVariant::PxTSFS), 3);
  EXPECT_EQ(sk::num_labels(TaskVariant::TF), 2);
  EXPECT_EQ(sk::num_labels(TaskVariant::PS), 2);
}

TEST(TaskProjection, LabelsCarryWhatTheTaskDistinguishes) {
  using sk::TaskVariant;
  EXPECT_FALSE(sk::label_visibility(TaskVariant::TF, 0).has_value());
  EXPECT_FALSE(sk::label_truth(TaskVariant::PS, 1).has_value());
  EXPECT_FALSE(sk::label_truth(TaskVariant::PxTSFS, 0).has_value());
  EXPECT_EQ(sk::label_truth(TaskVariant::PxTSFS, 2), sk::Truth::FalseToA);
  EXPECT_EQ(sk::label_visibility(TaskVariant::PxTSFS, 1), sk::Visibility::Shared);
  EXPECT_THROW(sk::label_visibility(TaskVariant::PS, 2), sk::RangeError);
}

TEST(TaskProjection, QuestionerCannotBeProbedForTruth) {
  EXPECT_THROW(sk::check_task_allowed(sk::TaskVariant::TFxPS, sk::Role::Questioner), sk::ConfigError);
  EXPECT_THROW(sk::check_task_allowed(sk::TaskVariant::TF, sk::Role::Questioner), sk::ConfigError);
  EXPECT_NO_THROW(sk::check_task_allowed(sk::TaskVariant::PS, sk::Role::Questioner));
  EXPECT_NO_THROW(sk::check_task_allowed(sk::TaskVariant::PxTSFS, sk::Role::Questioner));
  for (auto t : {sk::TaskVariant::TFxPS, sk::TaskVariant::TF, sk::TaskVariant::PS, sk::TaskVariant::PxTSFS}) {
    EXPECT_NO_THROW(sk::check_task_allowed(t, sk::Role::Answerer));
  }
}

TEST(Names, RoundTrip) {
  for (auto t : {sk::TaskVariant::TFxPS, sk::TaskVariant::TF, sk::TaskVariant::PS, sk::TaskVariant::PxTSFS}) {
    EXPECT_EQ(sk::parse_task(sk::to_string(t)), t);
  }
  for (auto r : {sk::Role::Answerer, sk::Role::Questioner}) EXPECT_EQ(sk::parse_role(sk::to_string(r)), r);
  for (auto s : {sk::Split::Train, sk::Split::Valid, sk::Split::Test}) EXPECT_EQ(sk::parse_split(sk::to_string(s)), s);
  EXPECT_THROW(sk::parse_task("truth"), sk::ConfigError);
  EXPECT_THROW(sk::parse_role("observer"), sk::ConfigError);
}

TEST(Scoreboard, ColumnsFollowPropositionOrder) {
  const auto d = full_dialogue(7);
  std::vector<sk::Proposition> props{prop_at(0, sk::Truth::TrueToA, 7), prop_at(4, sk::Truth::FalseToA, 7)};
  props[1].id = 99;
  const auto board = sk::build_scoreboard(d, props, sk::Role::Answerer);
  ASSERT_EQ(board.num_rows, 11);
  ASSERT_EQ(board.num_cols(), 2u);
  EXPECT_EQ(board.prop_ids[1], 99);
  EXPECT_EQ(board.at(3, 1), sk::kFalsePrivate);
  EXPECT_EQ(board.at(4, 1), sk::kFalseShared);
  EXPECT_EQ(board.at(0, 0), sk::kTrueShared);
}

TEST(Scoreboard, ForeignPropositionIsRejected) {
  const auto d = full_dialogue(7);
  const std::vector<sk::Proposition> props{prop_at(1, sk::Truth::TrueToA, 8)};
  EXPECT_THROW(sk::build_scoreboard(d, props, sk::Role::Answerer), sk::ConsistencyError);
}

TEST(Scoreboard, ShortTestDialogueHasNoPadding) {
  auto d = full_dialogue(3);
  d.turns.resize(6);
  d.split = sk::Split::Test;
  EXPECT_NO_THROW(sk::validate(d));
  const std::vector<sk::Proposition> props{prop_at(6, sk::Truth::TrueToA, 3)};
  EXPECT_EQ(sk::build_scoreboard(d, props, sk::Role::Answerer).num_rows, 7);
  const std::vector<sk::Proposition> late{prop_at(7, sk::Truth::TrueToA, 3)};
  EXPECT_THROW(sk::build_scoreboard(d, late, sk::Role::Answerer), sk::RangeError);
}

TEST(Dialogue, ValidateRejectsBrokenStructure) {
  auto d = full_dialogue(1);
  EXPECT_NO_THROW(sk::validate(d));
  auto short_train = d;
  short_train.turns.pop_back();
  EXPECT_THROW(sk::validate(short_train), sk::ConsistencyError);
  auto gap = d;
  gap.turns[3].index = 9;
  EXPECT_THROW(sk::validate(gap), sk::ConsistencyError);
  auto empty = d;
  empty.turns[0].answer.clear();
  EXPECT_THROW(sk::validate(empty), sk::ConsistencyError);
}

// Property: every cell of every generated scoreboard equals the definition,
// and each column switches from private to shared at most once.
TEST(ScoreboardProperty, CellsMatchDefinitionAndAreMonotone) {
  sktest::Gen gen(20240611);
  std::int64_t next = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto [d, props] = gen.dialogue_with_props(trial, next);
    for (auto role : {sk::Role::Answerer, sk::Role::Questioner}) {
      const auto board = sk::build_scoreboard(d, props, role);
      ASSERT_EQ(board.num_rows, d.num_turns() + 1);
      for (std::size_t c = 0; c < props.size(); ++c) {
        int shifts = 0;
        for (int row = 0; row < board.num_rows; ++row) {
          const int want = sktest::brute_force_class(props[c].source_turn, props[c].truth == sk::Truth::TrueToA, row);
          ASSERT_EQ(board.at(row, c).index(), want);
          if (row > 0 && board.at(row, c).visibility != board.at(row - 1, c).visibility) ++shifts;
          ASSERT_EQ(board.at(row, c).truth, props[c].truth);
        }
        EXPECT_LE(shifts, 1);
      }
    }
  }
}
