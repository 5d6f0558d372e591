#include "pawnprint/eval/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace pawnprint::eval {

EvalReport evaluate_player(nn::PolicyValueNet& net,
                           const std::vector<pgn::GameRecord>& games,
                           const std::string& player,
                           const data::PositionIndex* seen_index,
                           PlyCutoff cutoff, const std::string& model_id,
                           const std::string& split_name) {
  EvalReport report;
  report.player_id = player;
  report.model_id = model_id;
  report.split_name = split_name;
  report.cutoff = cutoff_name(cutoff);

  const MatchMetrics match = move_match(net, games, player, cutoff);
  report.accuracy = match.accuracy;
  report.accuracy_std = match.accuracy_std;
  report.top_k = match.top_k;
  report.predictions = match.predictions;
  report.games_used = match.games_used;
  report.games_skipped = match.games_skipped;

  if (seen_index != nullptr) {
    report.per_ply = per_ply_curve(net, games, player, *seen_index);
  }
  report.calibration = calibration(net, games, player, 10, cutoff);

  bool any_evals = false;
  for (const auto& g : games) {
    if (g.has_evals()) {
      any_evals = true;
      break;
    }
  }
  if (any_evals) {
    static const double kEdges[] = {-1.0, -0.5, -0.2, -0.1, -0.05, -0.02, 0.0};
    const QualityTable table =
        quality_bins(net, games, player, kEdges, cutoff);
    report.quality = table.bins;
    report.games_without_evals = table.games_without_evals;
  } else {
    report.games_without_evals = games.size();
  }
  return report;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json doc;
  doc["player_id"] = r.player_id;
  doc["model_id"] = r.model_id;
  doc["split"] = r.split_name;
  doc["cutoff"] = r.cutoff;
  doc["accuracy"] = r.accuracy;
  doc["accuracy_std"] = r.accuracy_std;
  nlohmann::json topk = nlohmann::json::object();
  for (const auto& [k, v] : r.top_k) topk[std::to_string(k)] = v;
  doc["top_k"] = topk;
  doc["predictions"] = r.predictions;
  doc["games_used"] = r.games_used;
  doc["games_skipped"] = r.games_skipped;
  doc["games_without_evals"] = r.games_without_evals;

  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : r.per_ply) {
    curve.push_back({{"ply", p.ply},
                     {"total", p.total},
                     {"correct", p.correct},
                     {"seen_total", p.seen_total},
                     {"seen_correct", p.seen_correct}});
  }
  doc["per_ply"] = curve;

  nlohmann::json cal = nlohmann::json::array();
  for (const auto& b : r.calibration) {
    cal.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count},
                   {"correct", b.correct}});
  }
  doc["calibration"] = cal;

  nlohmann::json quality = nlohmann::json::array();
  for (const auto& b : r.quality) {
    quality.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count},
                       {"correct", b.correct}});
  }
  doc["quality"] = quality;
  return doc.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  EvalReport r;
  r.player_id = doc.at("player_id").get<std::string>();
  r.model_id = doc.at("model_id").get<std::string>();
  r.split_name = doc.at("split").get<std::string>();
  r.cutoff = doc.at("cutoff").get<std::string>();
  r.accuracy = doc.at("accuracy").get<double>();
  r.accuracy_std = doc.at("accuracy_std").get<double>();
  for (const auto& [k, v] : doc.at("top_k").items()) {
    r.top_k[std::stoi(k)] = v.get<double>();
  }
  r.predictions = doc.at("predictions").get<std::size_t>();
  r.games_used = doc.at("games_used").get<std::size_t>();
  r.games_skipped = doc.at("games_skipped").get<std::size_t>();
  r.games_without_evals = doc.at("games_without_evals").get<std::size_t>();
  for (const auto& p : doc.at("per_ply")) {
    PlyCurvePoint point;
    point.ply = p.at("ply").get<int>();
    point.total = p.at("total").get<std::size_t>();
    point.correct = p.at("correct").get<std::size_t>();
    point.seen_total = p.at("seen_total").get<std::size_t>();
    point.seen_correct = p.at("seen_correct").get<std::size_t>();
    r.per_ply.push_back(point);
  }
  for (const auto& b : doc.at("calibration")) {
    r.calibration.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(),
                             b.at("count").get<std::size_t>(),
                             b.at("correct").get<std::size_t>()});
  }
  for (const auto& b : doc.at("quality")) {
    r.quality.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(),
                         b.at("count").get<std::size_t>(),
                         b.at("correct").get<std::size_t>()});
  }
  return r;
}

std::string report_to_csv(const EvalReport& r) {
  std::string out =
      "slice,bin,predictions,correct,accuracy,seen_predictions,seen_correct,"
      "extra\n";
  char buf[256];
  auto add_summary = [&](const char* name, double value) {
    std::snprintf(buf, sizeof(buf), "summary,%s,%zu,,%.8g,,,\n", name,
                  r.predictions, value);
    out += buf;
  };
  add_summary("accuracy", r.accuracy);
  add_summary("accuracy_std", r.accuracy_std);
  for (const auto& [k, v] : r.top_k) {
    std::snprintf(buf, sizeof(buf), "summary,top%d,%zu,,%.8g,,,\n", k,
                  r.predictions, v);
    out += buf;
  }
  for (const auto& p : r.per_ply) {
    std::snprintf(buf, sizeof(buf), "per_ply,%d,%zu,%zu,%.8g,%zu,%zu,%.8g\n",
                  p.ply, p.total, p.correct, p.accuracy(), p.seen_total,
                  p.seen_correct, p.seen_fraction());
    out += buf;
  }
  for (const auto& b : r.calibration) {
    std::snprintf(buf, sizeof(buf),
                  "calibration,[%.2f;%.2f),%zu,%zu,%.8g,,,\n", b.lo, b.hi,
                  b.count, b.correct,
                  b.count ? static_cast<double>(b.correct) /
                                static_cast<double>(b.count)
                          : 0.0);
    out += buf;
  }
  for (const auto& b : r.quality) {
    std::snprintf(buf, sizeof(buf), "quality,[%.3f;%.3f],%zu,%zu,%.8g,,,\n",
                  b.lo, b.hi, b.count, b.correct,
                  b.count ? static_cast<double>(b.correct) /
                                static_cast<double>(b.count)
                          : 0.0);
    out += buf;
  }
  return out;
}

}  // namespace pawnprint::eval
