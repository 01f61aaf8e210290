#pragma once

#include <array>
#include <vector>

#include "mage/common/rng.hpp"
#include "mage/env/tictactoe.hpp"

namespace mage::opp {

/// Fixed move-priority orderings for the preferred-pattern opponent.
/// Ordering 0: center, corners, edges. Ordering 1: row-major.
inline const std::vector<env::TttMove>& pattern_ordering(int ordering_id) {
    static const std::vector<env::TttMove> center_first = {
        {2, 2}, {1, 1}, {1, 3}, {3, 1}, {3, 3}, {1, 2}, {2, 1}, {2, 3}, {3, 2}};
    static const std::vector<env::TttMove> row_major = {
        {1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}};
    switch (ordering_id) {
        case 0: return center_first;
        case 1: return row_major;
        default: throw ConfigError("pattern: unknown ordering " + std::to_string(ordering_id));
    }
}

inline env::TttMove preferred_pattern_act(int ordering_id, const env::TicTacToeBoard& board) {
    MAGE_REQUIRE(!env::ttt::is_terminal(board), "pattern: board is terminal");
    for (const auto& m : pattern_ordering(ordering_id))
        if (board.at(m.row, m.col) == env::Mark::Empty) return m;
    throw ContractError("pattern: no empty cell");
}

inline env::TttMove random_ttt_act(const env::TicTacToeBoard& board, Rng& rng) {
    const auto moves = env::ttt::legal_moves(board);
    MAGE_REQUIRE(!moves.empty(), "random: board is terminal");
    return moves[rng.next_index(static_cast<int>(moves.size()))];
}

}  // namespace mage::opp
