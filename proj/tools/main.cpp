#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pawnprint/data/position_index.hpp"
#include "pawnprint/data/sampler.hpp"
#include "pawnprint/data/shard.hpp"
#include "pawnprint/data/split.hpp"
#include "pawnprint/eval/report.hpp"
#include "pawnprint/pgn/anonymize.hpp"
#include "pawnprint/pgn/reader.hpp"
#include "pawnprint/pgn/stats.hpp"
#include "pawnprint/pgn/writer.hpp"
#include "pawnprint/stylo/identify.hpp"
#include "pawnprint/stylo/naive_bayes.hpp"
#include "pawnprint/train/trainer.hpp"
#include "pawnprint/uci/engine.hpp"
#include "pawnprint/util/io.hpp"
#include "pawnprint/util/toml.hpp"

namespace fs = std::filesystem;
using namespace pawnprint;

namespace {

std::vector<pgn::GameRecord> read_pgn_file(const std::string& path,
                                           bool quiet = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  auto diag = [&, path](const std::string& message) {
    if (!quiet) std::cerr << path << ": " << message << "\n";
  };
  return pgn::read_all_games(in, {}, diag);
}

nlohmann::json stats_to_json(const pgn::PlayerStats& s) {
  return {{"player", s.player},
          {"games_total", s.games_total},
          {"games_blitz", s.games_blitz},
          {"games_as_white", s.games_as_white},
          {"rated_games", s.rated_games},
          {"rating_mean", s.rating_mean},
          {"rating_m2", s.rating_m2},
          {"rating_variance", s.rating_variance()},
          {"wins", s.wins},
          {"draws", s.draws},
          {"losses", s.losses},
          {"win_rate", s.win_rate()},
          {"white_fraction", s.white_fraction()},
          {"first_game",
           s.first_game_date.valid() ? s.first_game_date.iso() : ""},
          {"last_game", s.last_game_date.valid() ? s.last_game_date.iso() : ""},
          {"titled", s.titled}};
}

pgn::PlayerStats stats_from_json(const nlohmann::json& j) {
  pgn::PlayerStats s;
  s.player = j.at("player").get<std::string>();
  s.games_total = j.at("games_total").get<std::int64_t>();
  s.games_blitz = j.at("games_blitz").get<std::int64_t>();
  s.games_as_white = j.at("games_as_white").get<std::int64_t>();
  s.rated_games = j.at("rated_games").get<std::int64_t>();
  s.rating_mean = j.at("rating_mean").get<double>();
  s.rating_m2 = j.at("rating_m2").get<double>();
  s.wins = j.at("wins").get<std::int64_t>();
  s.draws = j.at("draws").get<std::int64_t>();
  s.losses = j.at("losses").get<std::int64_t>();
  s.first_game_date = pgn::Date::parse(j.at("first_game").get<std::string>());
  s.last_game_date = pgn::Date::parse(j.at("last_game").get<std::string>());
  s.titled = j.at("titled").get<bool>();
  return s;
}

nn::NetConfig net_config_from_toml(const toml::Document& doc) {
  nn::NetConfig net;
  if (auto v = doc.get_int("net.blocks")) net.blocks = static_cast<int>(*v);
  if (auto v = doc.get_int("net.filters")) net.filters = static_cast<int>(*v);
  if (auto v = doc.get_int("net.se_ratio")) net.se_ratio = static_cast<int>(*v);
  if (auto v = doc.get_int("net.policy_hidden")) {
    net.policy_hidden = static_cast<int>(*v);
  }
  if (auto v = doc.get_int("net.value_hidden")) {
    net.value_hidden = static_cast<int>(*v);
  }
  return net;
}

nn::LrSchedule schedule_from_toml(const toml::Document& doc) {
  nn::LrSchedule s;
  if (auto v = doc.get_double("schedule.base_lr")) s.base_lr = *v;
  if (auto v = doc.get_int_array("schedule.drop_steps")) {
    s.drop_steps.assign(v->begin(), v->end());
  }
  if (auto v = doc.get_double("schedule.drop_factor")) s.drop_factor = *v;
  if (auto v = doc.get_int("schedule.total_steps")) s.total_steps = *v;
  s.validate();
  return s;
}

train::FinetuneConfig finetune_config_from_toml(const toml::Document& doc) {
  train::FinetuneConfig cfg;
  cfg.schedule = schedule_from_toml(doc);
  if (auto v = doc.get_int("train.batch_size")) {
    cfg.batch_size = static_cast<int>(*v);
  }
  if (auto v = doc.get_double("train.momentum")) cfg.momentum = *v;
  if (auto v = doc.get_int("train.seed")) {
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = doc.get_int("train.validation_interval")) {
    cfg.validation_interval = *v;
  }
  if (auto v = doc.get_int("train.validation_subsample")) {
    cfg.validation_subsample = static_cast<std::size_t>(*v);
  }
  if (auto v = doc.get_int("train.stop_depth")) {
    cfg.stop_depth = static_cast<int>(*v);
  }
  if (auto v = doc.get_double("sampler.alpha")) cfg.sampler.alpha = *v;
  if (auto v = doc.get_double("sampler.beta")) cfg.sampler.beta = *v;
  if (auto v = doc.get_double("sampler.ply_scale")) cfg.sampler.ply_scale = *v;
  if (auto v = doc.get_int("sampler.ply_floor")) {
    cfg.sampler.ply_floor = static_cast<int>(*v);
  }
  return cfg;
}

std::vector<data::PackedExample> read_shards(
    const std::vector<std::string>& paths) {
  std::vector<data::PackedExample> out;
  for (const auto& path : paths) {
    auto shard = data::read_shard_file(path);
    out.insert(out.end(), shard.begin(), shard.end());
  }
  return out;
}

chess::Color side_for_game(const pgn::GameRecord& game,
                           const std::string& spec) {
  if (spec == "white") return chess::Color::White;
  if (spec == "black") return chess::Color::Black;
  if (spec.rfind("player:", 0) == 0) {
    return game.color_of(spec.substr(7));
  }
  throw std::runtime_error("bad --side value '" + spec +
                           "' (white, black or player:<name>)");
}

int run(int argc, char** argv) {
  CLI::App app{
      "pawnprint: per-player chess move-prediction models and stylometry"};
  app.require_subcommand(1);

  // ---- ingest ----
  auto* ingest = app.add_subcommand(
      "ingest", "Stream a PGN corpus into per-player statistics");
  std::string ingest_pgn, ingest_out;
  bool ingest_all = false;
  ingest->add_option("--pgn", ingest_pgn, "PGN corpus path")->required();
  ingest->add_option("--out", ingest_out, "output stats JSON")->required();
  ingest->add_flag("--include-nonblitz", ingest_all,
                   "accumulate every time class, not just blitz");
  ingest->callback([&]() {
    std::ifstream in(ingest_pgn, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + ingest_pgn);
    pgn::PgnReader reader(in, {}, [&](const std::string& m) {
      std::cerr << ingest_pgn << ": " << m << "\n";
    });
    pgn::StatsAccumulator acc;
    std::size_t games = 0;
    while (auto game = reader.next()) {
      if (!ingest_all && game->time_class != pgn::TimeClass::Blitz) continue;
      acc.add(*game);
      ++games;
    }
    nlohmann::json doc;
    doc["games"] = games;
    doc["players"] = nlohmann::json::array();
    for (const auto& [name, s] : acc.stats()) {
      doc["players"].push_back(stats_to_json(s));
    }
    write_text_file(ingest_out, doc.dump(2) + "\n");
    std::cout << "ingested " << games << " games, " << acc.stats().size()
              << " players -> " << ingest_out << "\n";
  });

  // ---- select ----
  auto* select =
      app.add_subcommand("select", "Filter players by the selection criteria");
  std::string select_stats, select_criteria, select_out;
  std::uint64_t select_assign_seed = 0;
  bool select_assign = false;
  select->add_option("--stats", select_stats, "stats JSON from ingest")
      ->required();
  select->add_option("--criteria", select_criteria,
                     "criteria TOML (defaults when omitted)");
  select->add_option("--out", select_out, "output players JSON")->required();
  select->add_flag("--assign-sets", select_assign,
                   "also partition into exploration/evaluation/holdout");
  select->add_option("--seed", select_assign_seed, "partition seed");
  select->callback([&]() {
    const auto doc = nlohmann::json::parse(read_text_file(select_stats));
    std::map<std::string, pgn::PlayerStats> stats;
    for (const auto& j : doc.at("players")) {
      auto s = stats_from_json(j);
      stats[s.player] = s;
    }
    pgn::SelectionCriteria criteria;
    if (!select_criteria.empty()) {
      criteria =
          pgn::SelectionCriteria::from_toml(toml::parse_file(select_criteria));
    }
    const auto players = pgn::select_players(stats, criteria);
    nlohmann::json out;
    out["players"] = players;
    if (select_assign) {
      const auto part =
          pgn::assign_player_sets(players, stats, {}, select_assign_seed);
      out["sets"] = {{"exploration", part.exploration},
                     {"evaluation", part.evaluation},
                     {"holdout", part.holdout}};
    }
    write_text_file(select_out, out.dump(2) + "\n");
    std::cout << "selected " << players.size() << " of " << stats.size()
              << " players -> " << select_out << "\n";
  });

  // ---- split ----
  auto* split = app.add_subcommand(
      "split", "Split one player's games into train/validation/test/future");
  std::string split_pgn, split_player, split_dir;
  std::uint64_t split_seed = 0;
  split->add_option("--pgn", split_pgn, "player's games (PGN)")->required();
  split->add_option("--player", split_player, "player name")->required();
  split->add_option("--out-dir", split_dir, "output directory")->required();
  split->add_option("--seed", split_seed, "shuffle seed");
  split->callback([&]() {
    auto games = read_pgn_file(split_pgn);
    std::erase_if(games, [&](const pgn::GameRecord& g) {
      return !g.has_player(split_player);
    });
    data::SplitSpec spec;
    spec.seed = split_seed;
    const auto result = data::split_games(std::move(games), spec);
    fs::create_directories(split_dir);
    const auto write_set = [&](const char* name,
                               const std::vector<pgn::GameRecord>& set) {
      std::ofstream out(fs::path(split_dir) / (std::string(name) + ".pgn"),
                        std::ios::binary);
      pgn::write_games(out, set);
    };
    write_set("train", result.train);
    write_set("validation", result.validation);
    write_set("test", result.test);
    write_set("future", result.future);
    write_text_file(fs::path(split_dir) / "manifest.json",
                    data::split_manifest(result, spec));
    std::cout << "split " << split_player << ": " << result.train.size() << "/"
              << result.validation.size() << "/" << result.test.size() << " + "
              << result.future.size() << " future -> " << split_dir << "\n";
  });

  // ---- sample ----
  auto* sample = app.add_subcommand(
      "sample", "Sample weighted training examples into a shard");
  std::string sample_pgn, sample_player, sample_out;
  std::uint64_t sample_seed = 0;
  std::size_t sample_count = 0;
  data::SamplerConfig sampler_cfg;
  sample->add_option("--pgn", sample_pgn, "games (PGN)")->required();
  sample->add_option("--player", sample_player, "player name")->required();
  sample->add_option("--count", sample_count, "examples to draw")->required();
  sample->add_option("--seed", sample_seed, "sampler seed");
  sample->add_option("--out", sample_out, "output shard path")->required();
  sample->add_option("--alpha", sampler_cfg.alpha, "beta distribution alpha");
  sample->add_option("--beta", sampler_cfg.beta, "beta distribution beta");
  sample->add_option("--ply-scale", sampler_cfg.ply_scale, "ply scale");
  sample->add_option("--ply-floor", sampler_cfg.ply_floor, "minimum ply");
  sample->callback([&]() {
    const auto games = read_pgn_file(sample_pgn);
    const auto examples = data::sample_examples(
        games, sample_player, sampler_cfg, sample_count, sample_seed);
    data::write_shard_file(sample_out, examples);
    std::cout << "wrote " << examples.size() << " examples -> " << sample_out
              << "\n";
  });

  // ---- index ----
  auto* index = app.add_subcommand(
      "index", "Build the seen-position index from training games");
  std::string index_pgn, index_player, index_out;
  index->add_option("--pgn", index_pgn, "training games (PGN)")->required();
  index->add_option("--player", index_player, "player name")->required();
  index->add_option("--out", index_out, "output index path")->required();
  index->callback([&]() {
    const auto games = read_pgn_file(index_pgn);
    const auto idx = data::build_position_index(games, index_player);
    idx.save(index_out);
    std::cout << "indexed " << idx.size() << " positions -> " << index_out
              << "\n";
  });

  // ---- train-base ----
  auto* train_base = app.add_subcommand(
      "train-base", "Train a population model from pooled shards");
  std::vector<std::string> tb_shards;
  std::string tb_val, tb_out, tb_log, tb_config;
  train_base->add_option("--shard", tb_shards, "training shard(s)")->required();
  train_base->add_option("--val", tb_val, "validation shard");
  train_base->add_option("--out", tb_out, "output checkpoint")->required();
  train_base->add_option("--log", tb_log, "run log CSV");
  train_base->add_option("--config", tb_config, "training TOML");
  train_base->callback([&]() {
    train::TrainBaseConfig cfg;
    if (!tb_config.empty()) {
      const auto doc = toml::parse_file(tb_config);
      cfg.net = net_config_from_toml(doc);
      cfg.schedule = schedule_from_toml(doc);
      if (auto v = doc.get_int("train.batch_size")) {
        cfg.batch_size = static_cast<int>(*v);
      }
      if (auto v = doc.get_double("train.momentum")) cfg.momentum = *v;
      if (auto v = doc.get_int("train.seed")) {
        cfg.seed = static_cast<std::uint64_t>(*v);
      }
      if (auto v = doc.get_int("train.validation_interval")) {
        cfg.validation_interval = *v;
      }
    }
    const auto examples = read_shards(tb_shards);
    std::vector<data::PackedExample> val;
    if (!tb_val.empty()) val = data::read_shard_file(tb_val);
    train::RunLog log;
    const auto ckpt = train::train_base(cfg, examples, val, &log);
    ckpt.save(tb_out);
    if (!tb_log.empty()) write_text_file(tb_log, log.to_csv());
    std::cout << "base model " << ckpt.id() << " -> " << tb_out << "\n";
  });

  // ---- finetune ----
  auto* finetune = app.add_subcommand(
      "finetune", "Fine-tune a per-player model from a base checkpoint");
  std::string ft_player, ft_base, ft_shard, ft_val, ft_out, ft_log, ft_config;
  finetune->add_option("--player", ft_player, "player id")->required();
  finetune->add_option("--base", ft_base, "base checkpoint")->required();
  finetune->add_option("--shard", ft_shard, "player shard")->required();
  finetune->add_option("--val", ft_val, "validation shard");
  finetune->add_option("--out", ft_out, "output checkpoint")->required();
  finetune->add_option("--log", ft_log, "run log CSV");
  finetune->add_option("--config", ft_config, "finetune TOML");
  finetune->callback([&]() {
    train::FinetuneConfig cfg;
    if (!ft_config.empty()) {
      cfg = finetune_config_from_toml(toml::parse_file(ft_config));
    }
    const auto base = nn::ModelCheckpoint::load(ft_base);
    const auto examples = data::read_shard_file(ft_shard);
    std::vector<data::PackedExample> val;
    if (!ft_val.empty()) val = data::read_shard_file(ft_val);
    auto [ckpt, log] = train::finetune(cfg, base, examples, val, ft_player);
    ckpt.save(ft_out);
    if (!ft_log.empty()) write_text_file(ft_log, log.to_csv());
    std::cout << "fine-tuned " << ft_player << " -> " << ft_out << " ("
              << log.final_checkpoint_id << ")\n";
  });

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand(
      "eval", "Evaluate a checkpoint's move matching on games");
  std::string ev_model, ev_games, ev_player, ev_cutoff = "10+", ev_index,
              ev_report, ev_csv, ev_split_name = "test";
  eval_cmd->add_option("--model", ev_model, "checkpoint path")->required();
  eval_cmd->add_option("--games", ev_games, "games (PGN)")->required();
  eval_cmd->add_option("--player", ev_player, "player name")->required();
  eval_cmd->add_option("--cutoff", ev_cutoff, "ply cutoff: all, 10+ or 30+");
  eval_cmd->add_option("--index", ev_index, "seen-position index");
  eval_cmd->add_option("--report", ev_report, "output JSON")->required();
  eval_cmd->add_option("--csv", ev_csv, "also emit CSV here");
  eval_cmd->add_option("--split-name", ev_split_name, "label for the report");
  eval_cmd->callback([&]() {
    const auto ckpt = nn::ModelCheckpoint::load(ev_model);
    nn::PolicyValueNet net(ckpt.config);
    nn::load_into_net(net, ckpt);
    const auto games = read_pgn_file(ev_games);
    std::optional<data::PositionIndex> idx;
    if (!ev_index.empty()) idx = data::PositionIndex::load(ev_index);
    const auto report = eval::evaluate_player(
        net, games, ev_player, idx ? &*idx : nullptr,
        eval::parse_cutoff(ev_cutoff), ckpt.id(), ev_split_name);
    write_text_file(ev_report, eval::report_to_json(report));
    if (!ev_csv.empty()) write_text_file(ev_csv, eval::report_to_csv(report));
    std::cout << "accuracy " << report.accuracy << " over "
              << report.predictions << " predictions -> " << ev_report << "\n";
  });

  // ---- stylometry ----
  auto* stylo_cmd = app.add_subcommand(
      "stylometry", "Identify the player behind a game sample");
  std::string st_pool, st_games, st_side = "white", st_cutoff = "10+",
              st_report, st_matrix;
  double st_threshold = -1.0;
  stylo_cmd->add_option("--pool", st_pool, "directory of candidate checkpoints")
      ->required();
  stylo_cmd->add_option("--games", st_games, "sample games (PGN)")->required();
  stylo_cmd->add_option("--side", st_side,
                        "side the unknown player held: white, black or "
                        "player:<name>");
  stylo_cmd->add_option("--cutoff", st_cutoff, "ply cutoff: all, 10+ or 30+");
  stylo_cmd->add_option("--threshold", st_threshold,
                        "open-set accuracy threshold (omit for closed set)");
  stylo_cmd->add_option("--report", st_report, "output JSON")->required();
  stylo_cmd->add_option("--matrix", st_matrix, "per-candidate accuracy CSV");
  stylo_cmd->callback([&]() {
    stylo::ModelPool pool;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(st_pool)) {
      if (entry.path().extension() == ".mpck") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto ckpt = nn::ModelCheckpoint::load(file);
      std::string name =
          ckpt.player_id.empty() ? file.stem().string() : ckpt.player_id;
      pool.entries.push_back({std::move(name), std::move(ckpt)});
    }
    const auto games = read_pgn_file(st_games);
    std::vector<stylo::SampleGame> sample;
    for (const auto& g : games) {
      sample.push_back({g, side_for_game(g, st_side)});
    }
    const auto result = stylo::identify(
        pool, sample, eval::parse_cutoff(st_cutoff), st_threshold);
    nlohmann::json doc;
    doc["decision"] = result.decision;
    doc["games_used"] = result.games_used;
    doc["cutoff"] = result.cutoff;
    doc["ranking"] = nlohmann::json::array();
    for (const auto& c : result.ranking) {
      doc["ranking"].push_back(
          {{"player", c.player},
           {"accuracy", c.accuracy},
           {"mean_log_likelihood", c.mean_log_likelihood},
           {"predictions", c.predictions}});
    }
    write_text_file(st_report, doc.dump(2) + "\n");
    if (!st_matrix.empty()) {
      std::vector<std::pair<std::string, std::vector<stylo::SampleGame>>>
          samples{{"sample", sample}};
      write_text_file(st_matrix,
                      stylo::accuracy_matrix_csv(pool, samples,
                                                 eval::parse_cutoff(st_cutoff)));
    }
    std::cout << "decision: " << result.decision << " (top accuracy "
              << result.ranking.front().accuracy << ") -> " << st_report
              << "\n";
  });

  // ---- uci ----
  auto* uci_cmd = app.add_subcommand(
      "uci", "Serve a checkpoint as a UCI engine on stdin/stdout");
  std::string uci_model, uci_mode = "sample";
  double uci_temperature = 1.0;
  std::uint64_t uci_seed = 0;
  uci_cmd->add_option("--model", uci_model, "checkpoint path")->required();
  uci_cmd->add_option("--play-mode", uci_mode, "sample or argmax");
  uci_cmd->add_option("--temperature", uci_temperature,
                      "sampling temperature");
  uci_cmd->add_option("--seed", uci_seed, "sampling seed");
  uci_cmd->callback([&]() {
    uci::EngineOptions options;
    if (uci_mode == "argmax") {
      options.mode = uci::EngineOptions::PlayMode::Argmax;
    } else if (uci_mode == "sample") {
      options.mode = uci::EngineOptions::PlayMode::Sample;
    } else {
      throw std::runtime_error("bad --play-mode '" + uci_mode + "'");
    }
    options.temperature = uci_temperature;
    options.seed = uci_seed;
    uci::EngineSession session(nn::ModelCheckpoint::load(uci_model), options);
    session.run(std::cin, std::cout);
  });

  // ---- report ----
  auto* report_cmd = app.add_subcommand(
      "report", "Convert an evaluation report between formats");
  std::string rp_in, rp_out, rp_format = "csv";
  report_cmd->add_option("--in", rp_in, "report JSON")->required();
  report_cmd->add_option("--format", rp_format, "csv or json");
  report_cmd->add_option("--out", rp_out, "output path")->required();
  report_cmd->callback([&]() {
    const auto report = eval::report_from_json(read_text_file(rp_in));
    if (rp_format == "csv") {
      write_text_file(rp_out, eval::report_to_csv(report));
    } else if (rp_format == "json") {
      write_text_file(rp_out, eval::report_to_json(report));
    } else {
      throw std::runtime_error("bad --format '" + rp_format + "'");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
