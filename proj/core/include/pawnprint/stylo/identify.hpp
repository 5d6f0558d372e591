#pragma once

#include <string>
#include <vector>

#include "pawnprint/eval/metrics.hpp"
#include "pawnprint/nn/checkpoint.hpp"
#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::stylo {

// Candidate models for identification. All checkpoints must share one
// topology (and therefore one input layout and policy vocabulary).
struct ModelPool {
  struct Entry {
    std::string player;
    nn::ModelCheckpoint checkpoint;
  };
  std::vector<Entry> entries;

  void validate() const;  // throws on an empty or mixed-topology pool
};

// A game sample from the unknown player, with the side they played.
struct SampleGame {
  pgn::GameRecord game;
  chess::Color side;
};

struct CandidateScore {
  std::string player;
  double accuracy = 0.0;            // drives the decision
  double mean_log_likelihood = 0.0; // kept for analysis
  std::size_t predictions = 0;
};

struct StylometryResult {
  std::vector<CandidateScore> ranking;  // accuracy descending, ties by id
  std::string decision;                 // player id, or "unknown" (open set)
  std::size_t games_used = 0;
  std::string cutoff;
};

// Scores every candidate model by its move-matching accuracy on the sample
// and picks the best. threshold < 0 runs closed-set identification; with a
// threshold in [0,1] the decision becomes "unknown" whenever the top score
// falls below it.
StylometryResult identify(const ModelPool& pool,
                          const std::vector<SampleGame>& sample,
                          eval::PlyCutoff cutoff, double threshold = -1.0);

// Accuracy of every pool model on every player's sample, as CSV rows
// (row = true player, column = model), for external heatmap plotting.
std::string accuracy_matrix_csv(
    const ModelPool& pool,
    const std::vector<std::pair<std::string, std::vector<SampleGame>>>&
        samples,
    eval::PlyCutoff cutoff);

}  // namespace pawnprint::stylo
