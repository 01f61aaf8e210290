#pragma once

#include <optional>
#include <vector>

#include "mage/env/tictactoe.hpp"

namespace mage::opp {

struct MinimaxResult {
    int value = 0;                       // +1 X wins, 0 draw, -1 O wins (optimal play)
    std::optional<env::TttMove> best;    // best move for the player to move, row-major tie-break
};

namespace detail {

/// Negamax value from the mover's perspective, full depth with alpha-beta.
inline int negamax(const env::TicTacToeBoard& b, int alpha, int beta) {
    if (const auto w = env::ttt::winner(b)) return *w == b.to_move ? 1 : -1;
    if (env::ttt::is_full(b)) return 0;
    int best = -2;
    for (const auto& m : env::ttt::legal_moves(b)) {
        env::TicTacToeBoard child = b;
        env::ttt::apply(child, m);
        const int v = -negamax(child, -beta, -alpha);
        if (v > best) best = v;
        if (best > alpha) alpha = best;
        if (alpha >= beta) break;
    }
    return best;
}

}  // namespace detail

/// Exact game value of `board` (from X's perspective) plus an optimal move
/// for the player to move. Ties break in row-major move order.
inline MinimaxResult minimax_value(const env::TicTacToeBoard& board) {
    MinimaxResult out;
    if (env::ttt::is_terminal(board)) {
        const auto w = env::ttt::winner(board);
        out.value = !w ? 0 : (*w == env::Mark::X ? 1 : -1);
        return out;
    }
    int best = -2;
    for (const auto& m : env::ttt::legal_moves(board)) {
        env::TicTacToeBoard child = board;
        env::ttt::apply(child, m);
        const int v = -detail::negamax(child, -1, 1);
        if (v > best) {
            best = v;
            out.best = m;
        }
    }
    out.value = board.to_move == env::Mark::X ? best : -best;
    return out;
}

/// Exact value of playing `move` at `board`, from the mover's perspective.
inline int minimax_move_value(const env::TicTacToeBoard& board, const env::TttMove& move) {
    MAGE_REQUIRE(env::ttt::is_legal(board, move), "minimax: illegal move");
    env::TicTacToeBoard child = board;
    env::ttt::apply(child, move);
    return -detail::negamax(child, -1, 1);
}

}  // namespace mage::opp
