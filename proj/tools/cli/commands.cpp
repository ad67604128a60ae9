#include "commands.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scorekeeping/corpus_io.hpp"
#include "scorekeeping/dataset.hpp"
#include "scorekeeping/embed.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/eval.hpp"
#include "scorekeeping/probe.hpp"
#include "scorekeeping/propgen.hpp"
#include "scorekeeping/rules.hpp"
#include "scorekeeping/tokenize.hpp"
#include "scorekeeping/train.hpp"
#include "support.hpp"

namespace skcli {

namespace sk = scorekeeping;

namespace {

constexpr std::uint64_t kDefaultSeed = 54321;

std::vector<sk::Dialogue> load_many(const std::vector<std::string>& paths, sk::Split split) {
  std::vector<sk::Dialogue> out;
  for (const auto& p : paths) {
    auto part = sk::load_dialogues(p, split);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

// Ids index the proposition file; two files generated separately both start
// at 0 and cannot simply be concatenated.
std::vector<sk::Proposition> load_props(const std::string& path) {
  auto props = sk::read_propositions(path);
  std::unordered_set<std::int64_t> seen;
  for (const auto& p : props) {
    if (!seen.insert(p.id).second) {
      throw sk::ConsistencyError(path + ": proposition id " + std::to_string(p.id) +
                                 " appears twice; generate all splits in one gen-props run");
    }
  }
  return props;
}

std::size_t parse_cap(const std::string& s) {
  if (s == "inf" || s == "none" || s == "∞") return std::numeric_limits<std::size_t>::max();
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s.front() == '-') throw sk::ConfigError("--cap must be a count or 'inf': " + s);
  return static_cast<std::size_t>(v);
}

sk::ControlMode parse_cli_control(const std::string& s) {
  if (s == "null") return sk::ControlMode::NullR;
  if (s == "random") return sk::ControlMode::RandomR;
  return sk::parse_control(s);
}

std::optional<int> parse_turn_filter(const std::string& filter, int turn) {
  if (!filter.empty() && turn >= 0) throw sk::ConfigError("--filter and --turn are exclusive");
  if (turn >= 0) return turn;
  if (filter.empty() || filter == "all") return std::nullopt;
  if (filter.rfind("turn", 0) == 0 && filter.size() > 4) {
    try {
      std::size_t pos = 0;
      const int t = std::stoi(filter.substr(4), &pos);
      if (pos == filter.size() - 4 && t >= 0) return t;
    } catch (const std::exception&) {
    }
  }
  throw sk::ConfigError("--filter expects 'all' or 'turnN': " + filter);
}

std::string path_with_suffix(const std::string& path, const std::string& suffix) { return path + suffix; }

// ---- predictions CSV -------------------------------------------------------
// rep,prop,gold,pred with integer task labels.

struct PredictionRow {
  std::string rep;
  std::int64_t prop = 0;
  int gold = 0;
  int pred = 0;
};

std::string predictions_csv(std::span<const sk::Datapoint> points, std::span<const int> gold,
                            std::span<const int> pred) {
  std::ostringstream out;
  out << "rep,prop,gold,pred\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << sk::rep_key(points[i].rep) << ',' << points[i].prop_id << ',' << gold[i] << ',' << pred[i] << '\n';
  }
  return out.str();
}

std::vector<PredictionRow> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sk::FormatError("cannot open " + path);
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "rep,prop,gold,pred") throw sk::FormatError(path + ": expected header rep,prop,gold,pred");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) throw sk::FormatError(path + ":" + std::to_string(line_no) + ": expected 4 fields");
    try {
      (void)sk::parse_rep_key(f[0]);
      rows.push_back({f[0], std::stoll(f[1]), std::stoi(f[2]), std::stoi(f[3])});
    } catch (const std::logic_error&) {
      throw sk::FormatError(path + ":" + std::to_string(line_no) + ": malformed row");
    }
  }
  if (line_no == 0) throw sk::FormatError(path + ": empty predictions file");
  return rows;
}

// ---- embedding stores --------------------------------------------------------

struct StoreOptions {
  std::string reps;
  std::string prop_emb;
  std::string synth;  // empty, "cumulative" or "noise"
  std::vector<std::string> dialogues;
  std::uint64_t embed_seed = kDefaultSeed;
  std::size_t rep_dim = sk::kRepDim;
  std::size_t prop_dim = sk::kPropDim;
};

void add_store_options(Run& run, StoreOptions& o) {
  auto* app = run.app();
  run.input("--reps", o.reps, "Dialogue representation store (SKVE)");
  run.input("--prop-emb", o.prop_emb, "Proposition embedding store (SKVE)");
  app->add_option("--synth", o.synth, "Generate synthetic stores on the fly instead: cumulative or noise")
      ->check(CLI::IsMember({"cumulative", "noise"}));
  run.input("--synth-dialogues", o.dialogues, "Dialogue JSON files for --synth representations");
  app->add_option("--embed-seed", o.embed_seed, "Seed of the synthetic embeddings")->capture_default_str();
  app->add_option("--rep-dim", o.rep_dim, "Synthetic representation dimension")->capture_default_str();
  app->add_option("--prop-dim", o.prop_dim, "Synthetic proposition dimension")->capture_default_str();
}

std::pair<sk::VectorStore, sk::VectorStore> load_stores(Run& run, const StoreOptions& o,
                                                        std::span<const sk::Proposition> props, sk::Role role) {
  if (o.synth.empty()) {
    if (o.reps.empty() || o.prop_emb.empty()) throw sk::ConfigError("--reps and --prop-emb are required without --synth");
    return {sk::read_store(o.reps), sk::read_store(o.prop_emb)};
  }
  if (!o.reps.empty() || !o.prop_emb.empty()) throw sk::ConfigError("--synth excludes --reps and --prop-emb");
  if (o.dialogues.empty()) throw sk::ConfigError("--synth needs --synth-dialogues");
  run.seed("embed", o.embed_seed);
  const auto dialogues = load_many(o.dialogues, sk::Split::Train);
  const std::array roles{role};
  log("synthetic " + o.synth + " stores, seed " + std::to_string(o.embed_seed));
  return {sk::synth_rep_store(dialogues, roles, o.rep_dim, o.embed_seed, sk::parse_synth_mode(o.synth)),
          sk::synth_prop_store(props, o.prop_dim, o.embed_seed)};
}

// ---- gen-props -------------------------------------------------------------

std::string generation_log_json(const sk::GenerationLog& g) {
  Json j;
  j["dialogues_in"] = g.dialogues_in;
  j["dialogues_blocked"] = g.dialogues_blocked;
  j["dialogues_without_props"] = g.dialogues_without_props;
  j["dialogues_out"] = g.dialogues_out;
  j["caption_pairs"] = g.caption_pairs;
  j["turn_pairs"] = g.turn_pairs;
  j["props_filtered"] = g.props_filtered;
  j["props_out"] = g.props_out;
  j["pronouns_replaced"] = g.pronouns_replaced;
  j["captions_without_chunks"] = g.captions_without_chunks;
  j["rule_hits"] = Json::object();
  for (const auto& [rule, n] : g.rule_hits) j["rule_hits"][rule] = n;
  return j.dump(2) + "\n";
}

void add_gen_props(CLI::App& app) {
  struct Opts {
    std::vector<std::string> dialogues;
    std::string rules, coref, pos, blocklist, split = "train", out, log_out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("gen-props", "Generate propositions from dialogues");
  auto run = std::make_shared<Run>(sub);
  run->input("--dialogues", o->dialogues, "Dialogue JSON file(s)")->required();
  run->input("--rules", o->rules, "Rule table (default: bundled canonical rules)");
  run->input("--coref", o->coref, "Coreference sidecar (JSON lines)");
  run->input("--pos", o->pos, "POS sidecar (JSON lines)");
  run->input("--blocklist", o->blocklist, "Word list; dialogues containing any word are dropped");
  sub->add_option("--split", o->split, "Split for dialogues that do not name one")->capture_default_str();
  run->output("--out", o->out, "Propositions (JSON lines)")->required();
  run->output("--log", o->log_out, "Generation log JSON (default: <out>.log.json)");

  sub->callback([o, run] {
    const auto dialogues = load_many(o->dialogues, sk::parse_split(o->split));
    const auto rules = o->rules.empty() ? sk::canonical_rules() : sk::load_rules(o->rules);
    std::map<std::int64_t, sk::CorefSidecar> coref;
    std::map<std::int64_t, sk::PosSidecar> pos;
    sk::WordSet blocklist;
    if (!o->coref.empty()) coref = sk::load_coref(o->coref);
    if (!o->pos.empty()) pos = sk::load_pos(o->pos);
    if (!o->blocklist.empty()) blocklist = sk::load_word_list(o->blocklist);

    sk::GenerationInputs in;
    in.dialogues = dialogues;
    in.rules = rules;
    in.coref = o->coref.empty() ? nullptr : &coref;
    in.pos = o->pos.empty() ? nullptr : &pos;
    in.blocklist = o->blocklist.empty() ? nullptr : &blocklist;
    const auto result = sk::generate(in);

    sk::write_propositions(std::filesystem::path(o->out), result.ordered);
    const std::string log_path = o->log_out.empty() ? path_with_suffix(o->out, ".log.json") : o->log_out;
    write_text(log_path, generation_log_json(result.log));
    log(std::to_string(result.log.props_out) + " propositions from " + std::to_string(result.log.dialogues_out) +
        " of " + std::to_string(result.log.dialogues_in) + " dialogues");
    run->write_meta({o->out, log_path});
  });
}

// ---- build-dataset ---------------------------------------------------------

void add_build_dataset(CLI::App& app) {
  struct Opts {
    std::vector<std::string> dialogues;
    std::string props, role = "answerer", split = "train", cap = "1000", balance = "auto", out, stats_out;
    double rate = sk::kDefaultCaptionRate;
    std::uint64_t downsample_seed = kDefaultSeed;
    std::uint64_t balance_seed = kDefaultSeed;
    int turn = -1;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("build-dataset", "Expand propositions into (representation, proposition, class) datapoints");
  auto run = std::make_shared<Run>(sub);
  run->input("--dialogues", o->dialogues, "Dialogue JSON file(s)")->required();
  run->input("--props", o->props, "Propositions (JSON lines)")->required();
  sub->add_option("--role", o->role, "answerer or questioner")->capture_default_str();
  sub->add_option("--split", o->split, "Keep dialogues of this split")->capture_default_str();
  sub->add_option("--rate", o->rate, "Fraction of caption pairs kept")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  sub->add_option("--cap", o->cap, "Per-surface cap on each truth value, or inf")->capture_default_str();
  sub->add_option("--balance", o->balance, "Truth balancing: auto (train only), on, off")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "on", "off"}));
  sub->add_option("--downsample-seed", o->downsample_seed, "Seed of caption downsampling")->capture_default_str();
  sub->add_option("--balance-seed", o->balance_seed, "Seed of truth balancing")->capture_default_str();
  sub->add_option("--stats-turn", o->turn, "Restrict class proportions in the stats to one turn");
  run->output("--out", o->out, "Dataset (SKDS)")->required();
  run->output("--stats-out", o->stats_out, "Dataset statistics JSON (default: <out>.stats.json)");

  sub->callback([o, run] {
    const auto split = sk::parse_split(o->split);
    const auto role = sk::parse_role(o->role);
    const std::size_t cap = parse_cap(o->cap);
    auto dialogues = load_many(o->dialogues, split);
    std::erase_if(dialogues, [&](const sk::Dialogue& d) { return d.split != split; });
    std::unordered_set<std::int64_t> kept;
    for (const auto& d : dialogues) kept.insert(d.id);

    auto props = load_props(o->props);
    std::erase_if(props, [&](const sk::Proposition& p) { return !kept.contains(p.dialogue_id); });
    props = sk::downsample_captions(props, o->rate, o->downsample_seed);
    run->seed("downsample", o->downsample_seed);
    const bool balance = o->balance == "on" || (o->balance == "auto" && split == sk::Split::Train);
    if (balance) {
      props = sk::balance_truth(props, cap, o->balance_seed);
      run->seed("balance", o->balance_seed);
    }
    const auto points = sk::build_datapoints(dialogues, props, role);
    sk::write_dataset(o->out, points);

    std::optional<int> turn;
    if (o->turn >= 0) turn = o->turn;
    const auto stats = sk::compute_stats(props, points, turn);
    const std::string stats_path = o->stats_out.empty() ? path_with_suffix(o->out, ".stats.json") : o->stats_out;
    write_text(stats_path, sk::stats_to_json(stats) + "\n");
    log(std::to_string(points.size()) + " datapoints, " + std::to_string(props.size()) + " propositions" +
        (balance ? ", truth balanced" : ""));
    run->write_meta({o->out, stats_path});
  });
}

// ---- stats -----------------------------------------------------------------

void add_stats(CLI::App& app) {
  struct Opts {
    std::string data, props, format = "table", out;
    int turn = -1;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("stats", "Summarise a dataset");
  auto run = std::make_shared<Run>(sub);
  run->input("--data", o->data, "Dataset (SKDS)")->required();
  run->input("--props", o->props, "Propositions (JSON lines)")->required();
  sub->add_option("--turn", o->turn, "Restrict class proportions to one turn");
  sub->add_option("--format", o->format, "table or json")->capture_default_str()->check(CLI::IsMember({"table", "json"}));
  run->output("--out", o->out, "Output file (default: stdout)");

  sub->callback([o, run] {
    const auto points = sk::read_dataset(o->data);
    std::unordered_set<std::int64_t> used;
    for (const auto& dp : points) used.insert(dp.prop_id);
    auto props = load_props(o->props);
    std::erase_if(props, [&](const sk::Proposition& p) { return !used.contains(p.id); });
    std::optional<int> turn;
    if (o->turn >= 0) turn = o->turn;
    const auto stats = sk::compute_stats(props, points, turn);
    const std::string text = o->format == "json" ? sk::stats_to_json(stats) + "\n" : sk::render_stats_table(stats);
    if (o->out.empty()) {
      std::cout << text;
    } else {
      write_text(o->out, text);
      run->write_meta({o->out});
    }
  });
}

// ---- synth-corpus ----------------------------------------------------------

void add_synth_corpus(CLI::App& app) {
  struct Opts {
    std::size_t count = 100;
    std::uint64_t seed = kDefaultSeed;
    std::string split = "train", out;
    std::int64_t first_id = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("synth-corpus", "Write a synthetic dialogue corpus");
  auto run = std::make_shared<Run>(sub);
  sub->add_option("--count", o->count, "Number of dialogues")->capture_default_str();
  sub->add_option("--seed", o->seed, "Generator seed")->capture_default_str();
  sub->add_option("--split", o->split, "Split recorded on every dialogue")->capture_default_str();
  sub->add_option("--first-id", o->first_id, "Id of the first dialogue")->capture_default_str();
  run->output("--out", o->out, "Dialogue JSON")->required();

  sub->callback([o, run] {
    run->seed("corpus", o->seed);
    const auto dialogues = sk::synth_corpus(o->count, o->seed, sk::parse_split(o->split), o->first_id);
    sk::write_dialogues(o->out, dialogues);
    log(std::to_string(dialogues.size()) + " synthetic dialogues");
    run->write_meta({o->out});
  });
}

// ---- synth-embed -----------------------------------------------------------

void add_synth_embed(CLI::App& app) {
  struct Opts {
    std::vector<std::string> dialogues;
    std::string props, mode = "cumulative", reps_out, prop_out;
    std::vector<std::string> roles{"answerer", "questioner"};
    std::uint64_t seed = kDefaultSeed;
    std::size_t rep_dim = sk::kRepDim;
    std::size_t prop_dim = sk::kPropDim;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("synth-embed", "Write synthetic representation and proposition stores");
  auto run = std::make_shared<Run>(sub);
  run->input("--dialogues", o->dialogues, "Dialogue JSON file(s)");
  run->input("--props", o->props, "Propositions (JSON lines)");
  sub->add_option("--mode", o->mode, "cumulative or noise")->capture_default_str()->check(CLI::IsMember({"cumulative", "noise"}));
  sub->add_option("--roles", o->roles, "Roles to emit representations for")->capture_default_str();
  sub->add_option("--seed", o->seed, "Embedding seed")->capture_default_str();
  sub->add_option("--rep-dim", o->rep_dim, "Representation dimension")->capture_default_str();
  sub->add_option("--prop-dim", o->prop_dim, "Proposition dimension")->capture_default_str();
  run->output("--reps", o->reps_out, "Representation store to write (SKVE)");
  run->output("--prop-emb", o->prop_out, "Proposition store to write (SKVE)");

  sub->callback([o, run] {
    if (o->reps_out.empty() && o->prop_out.empty()) throw sk::ConfigError("nothing to write: give --reps and/or --prop-emb");
    if (!o->reps_out.empty() && o->dialogues.empty()) throw sk::ConfigError("--reps needs --dialogues");
    if (!o->prop_out.empty() && o->props.empty()) throw sk::ConfigError("--prop-emb needs --props");
    run->seed("embed", o->seed);
    std::vector<std::filesystem::path> written;
    if (!o->reps_out.empty()) {
      std::vector<sk::Role> roles;
      for (const auto& r : o->roles) roles.push_back(sk::parse_role(r));
      const auto dialogues = load_many(o->dialogues, sk::Split::Train);
      const auto store = sk::synth_rep_store(dialogues, roles, o->rep_dim, o->seed, sk::parse_synth_mode(o->mode));
      sk::write_store(store, o->reps_out);
      log(std::to_string(store.size()) + " representations");
      written.emplace_back(o->reps_out);
    }
    if (!o->prop_out.empty()) {
      const auto store = sk::synth_prop_store(load_props(o->props), o->prop_dim, o->seed);
      sk::write_store(store, o->prop_out);
      log(std::to_string(store.size()) + " proposition embeddings");
      written.emplace_back(o->prop_out);
    }
    run->write_meta(written);
  });
}

// ---- train -----------------------------------------------------------------

void add_train(CLI::App& app) {
  struct Opts {
    std::string train_data, valid_data, props, task = "tfxps", role = "answerer", control = "none", out, history_out;
    StoreOptions stores;
    sk::TrainConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("train", "Train a probe");
  auto run = std::make_shared<Run>(sub);
  run->input("--train-data", o->train_data, "Training dataset (SKDS)")->required();
  run->input("--valid-data", o->valid_data, "Validation dataset (SKDS)")->required();
  run->input("--props", o->props, "Propositions (JSON lines)")->required();
  add_store_options(*run, o->stores);
  sub->add_option("--task", o->task, "tfxps, tf, ps or pxtsfs")->capture_default_str();
  sub->add_option("--role", o->role, "answerer or questioner")->capture_default_str();
  sub->add_option("--control", o->control, "none, null (zero r) or random (uniform r)")->capture_default_str();
  sub->add_flag("--control-at-eval", o->cfg.control_at_eval, "Also substitute r when scoring validation data");
  sub->add_option("--hidden", o->cfg.hidden, "Hidden units")->capture_default_str();
  sub->add_option("--dropout", o->cfg.dropout, "Dropout probability")->capture_default_str();
  sub->add_option("--lr", o->cfg.lr, "Adam learning rate")->capture_default_str();
  sub->add_option("--batch-size", o->cfg.batch_size, "Batch size")->capture_default_str();
  sub->add_option("--epochs", o->cfg.epochs, "Epochs")->capture_default_str();
  sub->add_option("--seed", o->cfg.seed, "Initialisation, shuffling and dropout seed")->capture_default_str();
  sub->add_option("--clip-norm", o->cfg.clip_norm, "Global gradient norm limit")->capture_default_str();
  run->output("--out", o->out, "Checkpoint (SKPM)")->required();
  run->output("--history-out", o->history_out, "Training history JSON (default: <out>.history.json)");

  sub->callback([o, run] {
    auto cfg = o->cfg;
    cfg.task = sk::parse_task(o->task);
    cfg.role = sk::parse_role(o->role);
    cfg.control = parse_cli_control(o->control);
    cfg.validate();
    run->seed("train", cfg.seed);

    const auto train_points = sk::read_dataset(o->train_data);
    const auto valid_points = sk::read_dataset(o->valid_data);
    const auto props = load_props(o->props);
    const auto [reps, prop_vectors] = load_stores(*run, o->stores, props, cfg.role);

    sk::ProbeShape shape{reps.dim(), prop_vectors.dim(), cfg.hidden,
                         static_cast<std::size_t>(sk::num_labels(cfg.task))};
    log("task " + std::string(sk::to_string(cfg.task)) + ", role " + std::string(sk::to_string(cfg.role)) + ", " +
        std::to_string(shape.n_labels) + " labels, " + std::to_string(shape.num_parameters()) + " parameters");
    switch (cfg.control) {
      case sk::ControlMode::None: break;
      case sk::ControlMode::NullR: log("control: r replaced by the null vector"); break;
      case sk::ControlMode::RandomR: log("control: r replaced by uniform random vectors"); break;
    }

    const auto train_data = sk::assemble(train_points, props, reps, prop_vectors, cfg.task, cfg.role);
    const auto valid_data = sk::assemble(valid_points, props, reps, prop_vectors, cfg.task, cfg.role);
    log(std::to_string(train_data.size()) + " training and " + std::to_string(valid_data.size()) +
        " validation datapoints");
    const auto result = sk::train(train_data, valid_data, cfg);
    for (const auto& e : result.history) {
      std::ostringstream line;
      line << "epoch " << e.epoch << " loss " << e.train_loss << " valid " << e.valid_accuracy;
      log(line.str());
    }
    log("best epoch " + std::to_string(result.best_epoch));

    sk::write_checkpoint({result.model, cfg.task, cfg.role}, o->out);
    const std::string history_path =
        o->history_out.empty() ? path_with_suffix(o->out, ".history.json") : o->history_out;
    write_text(history_path, sk::history_to_json(result, cfg) + "\n");
    run->write_meta({o->out, history_path});
  });
}

// ---- eval ------------------------------------------------------------------

void add_eval(CLI::App& app) {
  struct Opts {
    std::string checkpoint, data, props, train_data, task, filter, control = "none", out, predictions_out,
        scoreboards;
    std::vector<std::string> dialogues;
    StoreOptions stores;
    int turn = -1;
    std::uint64_t control_seed = kDefaultSeed;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("eval", "Score a probe on a dataset");
  auto run = std::make_shared<Run>(sub);
  run->input("--checkpoint", o->checkpoint, "Checkpoint (SKPM)")->required();
  run->input("--data", o->data, "Dataset to score (SKDS)")->required();
  run->input("--props", o->props, "Propositions (JSON lines)")->required();
  add_store_options(*run, o->stores);
  run->input("--dialogues", o->dialogues, "Dialogue JSON file(s); enables consistency metrics and scoreboards");
  run->input("--train-data", o->train_data, "Training dataset (SKDS); enables the seen/unseen split");
  sub->add_option("--task", o->task, "Expected task; must match the checkpoint");
  sub->add_option("--filter", o->filter, "all or turnN, e.g. turn5");
  sub->add_option("--turn", o->turn, "Same as --filter turnN");
  sub->add_option("--control", o->control, "Substitute r at scoring time: none, null or random")->capture_default_str();
  sub->add_option("--control-seed", o->control_seed, "Seed of the random control")->capture_default_str();
  run->output("--out", o->out, "Report JSON")->required();
  run->output("--predictions-out", o->predictions_out, "Per-datapoint predictions CSV");
  run->output("--scoreboards", o->scoreboards, "Directory for per-dialogue predicted scoreboard CSVs");

  sub->callback([o, run] {
    const auto turn = parse_turn_filter(o->filter, o->turn);
    const auto control = parse_cli_control(o->control);
    const auto ckpt = sk::read_checkpoint(o->checkpoint);
    if (!o->task.empty() && sk::parse_task(o->task) != ckpt.task) {
      throw sk::ConfigError("task mismatch: checkpoint was trained for " + std::string(sk::to_string(ckpt.task)) +
                            ", --task says " + o->task);
    }
    if (!o->scoreboards.empty() && o->dialogues.empty()) throw sk::ConfigError("--scoreboards needs --dialogues");

    const auto points = sk::read_dataset(o->data);
    const auto props = load_props(o->props);
    const auto [reps, prop_vectors] = load_stores(*run, o->stores, props, ckpt.role);
    const auto data = sk::assemble(points, props, reps, prop_vectors, ckpt.task, ckpt.role);
    if (static_cast<std::size_t>(data.reps.rows()) != ckpt.model.shape().rep_dim ||
        static_cast<std::size_t>(data.props.rows()) != ckpt.model.shape().prop_dim) {
      throw sk::ShapeError("store dimensions do not match the checkpoint");
    }
    if (control != sk::ControlMode::None) {
      run->seed("control", o->control_seed);
      log("control at scoring time: " + std::string(sk::to_string(control)));
    }
    const auto pred = sk::predict(ckpt.model, data, control, o->control_seed);
    const auto records = sk::make_records(points, props, data.labels, pred);

    std::set<std::string> train_surfaces;
    if (!o->train_data.empty()) {
      std::unordered_map<std::int64_t, const sk::Proposition*> by_id;
      for (const auto& p : props) by_id.emplace(p.id, &p);
      for (const auto& dp : sk::read_dataset(o->train_data)) {
        auto it = by_id.find(dp.prop_id);
        if (it == by_id.end()) throw sk::ConsistencyError("training datapoint names unknown proposition " +
                                                          std::to_string(dp.prop_id));
        train_surfaces.insert(sk::join_tokens(it->second->surface));
      }
    }
    std::vector<sk::Dialogue> dialogues;
    if (!o->dialogues.empty()) {
      dialogues = load_many(o->dialogues, sk::Split::Test);
      std::unordered_set<std::int64_t> scored;
      for (const auto& r : records) scored.insert(r.dialogue_id);
      std::erase_if(dialogues, [&](const sk::Dialogue& d) { return !scored.contains(d.id); });
    }

    const auto report = sk::build_report(records, ckpt.task, ckpt.role, train_surfaces, turn, dialogues);
    write_text(o->out, sk::report_to_json(report) + "\n");
    {
      std::ostringstream line;
      line << "accuracy " << report.accuracy << " over " << report.datapoints << " datapoints";
      if (report.filtered_accuracy) line << ", turn " << *turn << ": " << *report.filtered_accuracy;
      log(line.str());
    }
    std::vector<std::filesystem::path> written{o->out};
    if (!o->predictions_out.empty()) {
      write_text(o->predictions_out, predictions_csv(points, data.labels, pred));
      written.emplace_back(o->predictions_out);
    }
    if (!o->scoreboards.empty()) {
      std::filesystem::create_directories(o->scoreboards);
      for (const auto& board : sk::boards_from_records(records, dialogues, ckpt.task, true)) {
        write_text(std::filesystem::path(o->scoreboards) / ("d" + std::to_string(board.dialogue_id) + ".csv"),
                   sk::board_to_csv(board, props));
      }
      written.emplace_back(o->scoreboards);
    }
    run->write_meta(written);
  });
}

// ---- scoreboard ------------------------------------------------------------

void add_scoreboard(CLI::App& app) {
  struct Opts {
    std::vector<std::string> dialogues;
    std::string props, predictions, role = "answerer", task = "tfxps", out;
    std::int64_t dialogue_id = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("scoreboard", "Print the gold or predicted scoreboard of one dialogue as CSV");
  auto run = std::make_shared<Run>(sub);
  run->input("--dialogues", o->dialogues, "Dialogue JSON file(s)")->required();
  run->input("--props", o->props, "Propositions (JSON lines)")->required();
  run->input("--predictions", o->predictions, "Predictions CSV from eval; omit for the gold board");
  sub->add_option("--dialogue-id", o->dialogue_id, "Dialogue to print")->required();
  sub->add_option("--role", o->role, "answerer or questioner")->capture_default_str();
  sub->add_option("--task", o->task, "Label set of the cells")->capture_default_str();
  run->output("--out", o->out, "Output CSV (default: stdout)");

  sub->callback([o, run] {
    const auto role = sk::parse_role(o->role);
    const auto task = sk::parse_task(o->task);
    sk::check_task_allowed(task, role);
    const auto dialogues = load_many(o->dialogues, sk::Split::Train);
    const sk::Dialogue* dialogue = nullptr;
    for (const auto& d : dialogues) {
      if (d.id == o->dialogue_id) dialogue = &d;
    }
    if (dialogue == nullptr) throw sk::MissingKeyError("dialogue " + std::to_string(o->dialogue_id));
    const auto props = load_props(o->props);

    std::string csv;
    if (o->predictions.empty()) {
      std::vector<sk::Proposition> own;
      for (const auto& p : props) {
        if (p.dialogue_id == dialogue->id) own.push_back(p);
      }
      csv = sk::board_to_csv(sk::project_board(sk::build_scoreboard(*dialogue, own, role), task), props);
    } else {
      std::vector<sk::Datapoint> points;
      std::vector<int> gold;
      std::vector<int> pred;
      for (const auto& row : read_predictions(o->predictions)) {
        const auto key = sk::parse_rep_key(row.rep);
        if (key.dialogue_id != dialogue->id) continue;
        if (key.role != role) throw sk::ConsistencyError("predictions are for another role: " + row.rep);
        points.push_back({key, row.prop, {}});
        gold.push_back(row.gold);
        pred.push_back(row.pred);
      }
      if (points.empty()) throw sk::EmptySubsetError("no predictions for dialogue " + std::to_string(dialogue->id));
      const auto records = sk::make_records(points, props, gold, pred);
      const std::array one{*dialogue};
      csv = sk::board_to_csv(sk::boards_from_records(records, one, task, true).front(), props);
    }
    if (o->out.empty()) {
      std::cout << csv;
    } else {
      write_text(o->out, csv);
      run->write_meta({o->out});
    }
  });
}

// ---- perm-test -------------------------------------------------------------

void add_perm_test(CLI::App& app) {
  struct Opts {
    std::string a, b, gold, task, out;
    std::size_t shuffles = 1000;
    std::uint64_t seed = kDefaultSeed;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("perm-test", "Paired permutation test between two prediction files");
  auto run = std::make_shared<Run>(sub);
  run->input("--a", o->a, "Predictions CSV of system A")->required();
  run->input("--b", o->b, "Predictions CSV of system B")->required();
  run->input("--gold", o->gold, "Dataset (SKDS) the predictions must align with");
  sub->add_option("--task", o->task, "Task of the predictions; required with --gold");
  sub->add_option("--shuffles", o->shuffles, "Number of shuffles")->capture_default_str();
  sub->add_option("--seed", o->seed, "Shuffle seed")->capture_default_str();
  run->output("--out", o->out, "Result JSON (default: stdout)");

  sub->callback([o, run] {
    if (o->shuffles == 0) throw sk::ConfigError("--shuffles must be positive");
    if (!o->gold.empty() && o->task.empty()) throw sk::ConfigError("--gold needs --task");
    run->seed("shuffle", o->seed);
    const auto a = read_predictions(o->a);
    const auto b = read_predictions(o->b);
    const auto mismatch = [](std::size_t i, const std::string& x, const std::string& y) {
      return sk::ConsistencyError("misaligned at datapoint " + std::to_string(i) + ": " + x + " vs " + y);
    };
    const auto key = [](const PredictionRow& r) { return r.rep + "," + std::to_string(r.prop); };
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a[i].rep != b[i].rep || a[i].prop != b[i].prop) throw mismatch(i, key(a[i]), key(b[i]));
      if (a[i].gold != b[i].gold) throw mismatch(i, key(a[i]) + " gold " + std::to_string(a[i].gold),
                                                 "gold " + std::to_string(b[i].gold));
    }
    if (a.size() != b.size()) {
      const std::size_t i = std::min(a.size(), b.size());
      throw mismatch(i, i < a.size() ? key(a[i]) : "<end>", i < b.size() ? key(b[i]) : "<end>");
    }
    if (!o->gold.empty()) {
      const auto task = sk::parse_task(o->task);
      const auto points = sk::read_dataset(o->gold);
      for (std::size_t i = 0; i < std::max(points.size(), a.size()); ++i) {
        const std::string want =
            i < points.size() ? sk::rep_key(points[i].rep) + "," + std::to_string(points[i].prop_id) : "<end>";
        if (i >= a.size() || i >= points.size() || key(a[i]) != want) {
          throw mismatch(i, i < a.size() ? key(a[i]) : "<end>", want);
        }
        if (a[i].gold != sk::project_class(points[i].gold, task)) {
          throw mismatch(i, key(a[i]) + " gold " + std::to_string(a[i].gold),
                         "dataset gold " + std::to_string(sk::project_class(points[i].gold, task)));
        }
      }
    }

    std::vector<std::uint8_t> ca(a.size());
    std::vector<std::uint8_t> cb(b.size());
    std::size_t hits_a = 0;
    std::size_t hits_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ca[i] = a[i].pred == a[i].gold ? 1 : 0;
      cb[i] = b[i].pred == b[i].gold ? 1 : 0;
      hits_a += ca[i];
      hits_b += cb[i];
    }
    const auto result = sk::permutation_test(ca, cb, o->shuffles, o->seed);
    Json j;
    j["datapoints"] = a.size();
    j["accuracy_a"] = static_cast<double>(hits_a) / static_cast<double>(a.size());
    j["accuracy_b"] = static_cast<double>(hits_b) / static_cast<double>(b.size());
    j["observed_difference"] = result.observed;
    j["p_value"] = result.p_value;
    j["shuffles"] = result.shuffles;
    j["seed"] = o->seed;
    const std::string text = j.dump(2) + "\n";
    if (o->out.empty()) {
      std::cout << text;
    } else {
      write_text(o->out, text);
      run->write_meta({o->out});
    }
  });
}

}  // namespace

void add_commands(CLI::App& app) {
  add_gen_props(app);
  add_build_dataset(app);
  add_stats(app);
  add_synth_corpus(app);
  add_synth_embed(app);
  add_train(app);
  add_eval(app);
  add_scoreboard(app);
  add_perm_test(app);
}

}  // namespace skcli
