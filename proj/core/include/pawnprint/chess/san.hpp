#pragma once

#include <string>

#include "pawnprint/chess/board.hpp"

namespace pawnprint::chess {

// Standard algebraic notation against a concrete position.
//
// parse_san resolves a SAN token to the unique matching legal move.
// Decorations are ignored for matching: check/mate suffixes (+, #),
// annotation glyphs (!, ?, combinations) and a trailing "e.p." marker.
// Throws std::invalid_argument when no legal move matches or when the token
// is ambiguous.
Move parse_san(const Board& board, const std::string& san);

// Canonical SAN for a legal move: minimal disambiguation, 'x' for captures,
// '=Q' style promotions, '+'/'#' suffix from the resulting position.
std::string san_of(const Board& board, const Move& move);

}  // namespace pawnprint::chess
