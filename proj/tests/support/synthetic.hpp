#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pawnprint/nn/checkpoint.hpp"
#include "pawnprint/pgn/game_record.hpp"

// Synthetic population for the scaled-down personalization experiments.
//
// A fixed small "population net" defines the shared move distribution. Each
// synthetic player samples from that distribution reshaped by a
// deterministic quirk: a signed preference vector over eight move features
// (moving piece class, captures, central and kingside destinations). The
// sign patterns are weight-4 codewords of the extended Hamming(8,4) code,
// so any two players disagree on at least four features.
//
// Every game opens with a fixed six-ply book (so early positions repeat
// across the corpus), carries blitz time-control/rating/date tags and
// material-balance eval annotations, and ends by ply cap or mate with a
// material-adjudicated result. A slice of each player's games is dated
// December 2020 to populate the future split.
namespace test_support {

struct SyntheticSpec {
  int players = 10;
  int games_per_player = 2000;
  int min_plies = 26;
  int max_plies = 40;
  double sharpen = 2.5;  // logit scale of the player distribution
  double bias = 1.6;     // per-feature quirk strength
  std::uint64_t seed = 1;
  pawnprint::nn::NetConfig net_config;

  SyntheticSpec() {
    net_config.blocks = 2;
    net_config.filters = 16;
    net_config.se_ratio = 4;
    net_config.policy_hidden = 8;
    net_config.value_hidden = 32;
  }
};

struct SyntheticCorpus {
  pawnprint::nn::ModelCheckpoint population;  // the fine-tuning base
  std::vector<std::string> player_names;
  std::map<std::string, std::vector<pawnprint::pgn::GameRecord>> games;
};

SyntheticCorpus build_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace test_support
