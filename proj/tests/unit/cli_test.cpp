// Drives the built command-line tool end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) {
    const std::string cmd = std::string(SK_CLI_BIN) + " -q " + args + " > " + path("stdout") + " 2> " + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string err() const { return read_file(path("stderr")); }
  std::string out() const { return read_file(path("stdout")); }

  // Small corpus, propositions, datasets and stores shared by the training tests.
  void pipeline() {
    ASSERT_EQ(run("synth-corpus --count 40 --seed 1 --split train --out " + path("train.json")), 0) << err();
    ASSERT_EQ(run("synth-corpus --count 10 --seed 2 --split valid --first-id 1000 --out " + path("valid.json")), 0);
    ASSERT_EQ(run("gen-props --dialogues " + path("train.json") + " " + path("valid.json") + " --out " +
                  path("props.jsonl")),
              0)
        << err();
    ASSERT_EQ(run("build-dataset --dialogues " + path("train.json") + " --props " + path("props.jsonl") +
                  " --split train --out " + path("train.skds")),
              0)
        << err();
    ASSERT_EQ(run("build-dataset --dialogues " + path("valid.json") + " --props " + path("props.jsonl") +
                  " --split valid --out " + path("valid.skds")),
              0)
        << err();
    ASSERT_EQ(run("synth-embed --dialogues " + path("train.json") + " " + path("valid.json") + " --props " +
                  path("props.jsonl") + " --rep-dim 16 --prop-dim 16 --reps " + path("reps.skve") + " --prop-emb " +
                  path("props.skve")),
              0)
        << err();
  }

  std::string train_args(const std::string& out, const std::string& extra = "") {
    return "train --train-data " + path("train.skds") + " --valid-data " + path("valid.skds") + " --props " +
           path("props.jsonl") + " --reps " + path("reps.skve") + " --prop-emb " + path("props.skve") +
           " --hidden 8 --epochs 2 --batch-size 64 " + extra + " --out " + path(out);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenPropsReproducesFrozenFixture) {
  const std::string fixture = std::string(SK_FIXTURE_DIR);
  ASSERT_EQ(run("gen-props --dialogues " + fixture + "/golden_dialogues.json --out " + path("p.jsonl")), 0) << err();
  EXPECT_EQ(read_file(path("p.jsonl")), read_file(fixture + "/golden_props.jsonl"));
  const auto meta = nlohmann::json::parse(read_file(path("p.jsonl.meta.json")));
  EXPECT_EQ(meta["command"], "gen-props");
  EXPECT_TRUE(meta.contains("config_digest"));
  EXPECT_EQ(meta["inputs"]["--dialogues"].size(), 1u);
  EXPECT_TRUE(fs::exists(path("p.jsonl.log.json")));
}

TEST_F(Cli, EmptyCorpusYieldsEmptyOutputs) {
  std::ofstream(path("empty.json")) << R"({"dialogs": []})";
  ASSERT_EQ(run("gen-props --dialogues " + path("empty.json") + " --out " + path("p.jsonl")), 0) << err();
  EXPECT_EQ(read_file(path("p.jsonl")), "");
  ASSERT_EQ(run("build-dataset --dialogues " + path("empty.json") + " --props " + path("p.jsonl") + " --out " +
                path("d.skds")),
            0)
      << err();
  ASSERT_EQ(run("stats --data " + path("d.skds") + " --props " + path("p.jsonl") + " --format json"), 0) << err();
  EXPECT_EQ(nlohmann::json::parse(out())["datapoints"], 0);
}

TEST_F(Cli, TrainEvalPermTestAreDeterministic) {
  pipeline();
  ASSERT_EQ(run(train_args("a.skpm")), 0) << err();
  ASSERT_EQ(run(train_args("b.skpm")), 0) << err();
  EXPECT_EQ(read_file(path("a.skpm")), read_file(path("b.skpm")));
  EXPECT_EQ(read_file(path("a.skpm.history.json")), read_file(path("b.skpm.history.json")));
  ASSERT_EQ(run(train_args("n.skpm", "--control null")), 0) << err();

  auto eval = [&](const std::string& ckpt, const std::string& tag) {
    return run("eval --checkpoint " + path(ckpt) + " --data " + path("valid.skds") + " --props " +
               path("props.jsonl") + " --reps " + path("reps.skve") + " --prop-emb " + path("props.skve") +
               " --dialogues " + path("valid.json") + " --filter turn5 --out " + path(tag + ".json") +
               " --predictions-out " + path(tag + ".csv"));
  };
  ASSERT_EQ(eval("a.skpm", "ea"), 0) << err();
  ASSERT_EQ(eval("n.skpm", "en"), 0) << err();
  const auto report = nlohmann::json::parse(read_file(path("ea.json")));
  EXPECT_EQ(report["task"], "tfxps");
  EXPECT_EQ(report["turn_filter"], 5);
  EXPECT_FALSE(report["consistency"].is_null());
  EXPECT_EQ(read_file(path("ea.csv")).substr(0, 19), "rep,prop,gold,pred\n");

  ASSERT_EQ(run("perm-test --a " + path("ea.csv") + " --b " + path("ea.csv") + " --out " + path("same.json")), 0);
  EXPECT_EQ(nlohmann::json::parse(read_file(path("same.json")))["p_value"], 1.0);
  ASSERT_EQ(run("perm-test --a " + path("ea.csv") + " --b " + path("en.csv") + " --gold " + path("valid.skds") +
                " --task tfxps --out " + path("diff.json")),
            0)
      << err();
  const auto diff = nlohmann::json::parse(read_file(path("diff.json")));
  for (const char* k : {"datapoints", "accuracy_a", "accuracy_b", "observed_difference", "p_value", "shuffles", "seed"}) {
    EXPECT_TRUE(diff.contains(k)) << k;
  }
}

TEST_F(Cli, ExitCodes) {
  pipeline();
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run(train_args("q.skpm", "--role questioner --task tf")), 1);
  EXPECT_NE(err().find("questioner"), std::string::npos) << err();
  EXPECT_EQ(run(train_args("x.skpm", "--dropout 1.0")), 1);
  std::ofstream(path("bad.json")) << "{not json";
  EXPECT_EQ(run("gen-props --dialogues " + path("bad.json") + " --out " + path("p2.jsonl")), 2);
  std::ofstream(path("junk.skds")) << "nope";
  EXPECT_EQ(run("stats --data " + path("junk.skds") + " --props " + path("props.jsonl")), 2);
  ASSERT_EQ(run(train_args("a.skpm")), 0) << err();
  EXPECT_EQ(run("eval --checkpoint " + path("a.skpm") + " --data " + path("valid.skds") + " --props " +
                path("props.jsonl") + " --reps " + path("reps.skve") + " --prop-emb " + path("props.skve") +
                " --task ps --out " + path("e.json")),
            1);
  std::ofstream(path("p.csv")) << "rep,prop,gold,pred\nd1/A/t0,3,1,1\n";
  EXPECT_EQ(run("perm-test --a " + path("p.csv") + " --b " + path("p.csv") + " --shuffles 0"), 1);
  // Duplicate proposition ids from separately generated files are refused.
  ASSERT_EQ(run("gen-props --dialogues " + path("valid.json") + " --out " + path("v.jsonl")), 0);
  std::ofstream(path("both.jsonl")) << read_file(path("props.jsonl")) << read_file(path("v.jsonl"));
  EXPECT_EQ(run("build-dataset --dialogues " + path("valid.json") + " --props " + path("both.jsonl") + " --split valid --out " +
                path("z.skds")),
            2);
}

TEST_F(Cli, ConfigFileSuppliesOptions) {
  ASSERT_EQ(run("synth-corpus --count 3 --seed 4 --out " + path("c1.json")), 0);
  std::ofstream(path("cfg.toml")) << "[synth-corpus]\ncount = 3\nseed = 4\n";
  ASSERT_EQ(run("--config " + path("cfg.toml") + " synth-corpus --out " + path("c2.json")), 0) << err();
  EXPECT_EQ(read_file(path("c1.json")), read_file(path("c2.json")));
}
