#pragma once

namespace pawnprint::eval {

// Logistic map from a centipawn evaluation to a win probability for the
// side the evaluation favors. The slope default makes +100cp worth about
// 59% and +400cp about 81%.
constexpr double kDefaultWinprobSlope = 0.00368;

double cp_to_winprob(double centipawns, double slope = kDefaultWinprobSlope);

}  // namespace pawnprint::eval
