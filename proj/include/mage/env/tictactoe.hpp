#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mage/env/types.hpp"

namespace mage::env::ttt {

/// The 8 winning lines, as row-major cell indices.
inline constexpr std::array<std::array<int, 3>, 8> kLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},   // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},   // columns
    {0, 4, 8}, {2, 4, 6},              // diagonals
}};

inline std::optional<Mark> winner(const TicTacToeBoard& b) {
    for (const auto& line : kLines) {
        const Mark m = b.cells[line[0]];
        if (m != Mark::Empty && b.cells[line[1]] == m && b.cells[line[2]] == m) return m;
    }
    return std::nullopt;
}

inline bool is_full(const TicTacToeBoard& b) {
    for (Mark m : b.cells)
        if (m == Mark::Empty) return false;
    return true;
}

inline bool is_terminal(const TicTacToeBoard& b) { return winner(b).has_value() || is_full(b); }

/// Empty cells in row-major order.
inline std::vector<TttMove> legal_moves(const TicTacToeBoard& b) {
    std::vector<TttMove> out;
    for (int r = 1; r <= 3; ++r)
        for (int c = 1; c <= 3; ++c)
            if (b.at(r, c) == Mark::Empty) out.push_back({r, c});
    return out;
}

inline bool move_in_range(const TttMove& m) {
    return m.row >= 1 && m.row <= 3 && m.col >= 1 && m.col <= 3;
}

inline bool is_legal(const TicTacToeBoard& b, const TttMove& m) {
    return move_in_range(m) && b.at(m.row, m.col) == Mark::Empty;
}

inline void apply(TicTacToeBoard& b, const TttMove& m) {
    b.set(m.row, m.col, b.to_move);
    b.to_move = other_mark(b.to_move);
}

/// Renders the 3-line dot/X/O grid, cells separated by single spaces.
inline std::string render(const TicTacToeBoard& b) {
    std::string out;
    for (int r = 1; r <= 3; ++r) {
        for (int c = 1; c <= 3; ++c) {
            if (c > 1) out += ' ';
            out += mark_char(b.at(r, c));
        }
        if (r < 3) out += '\n';
    }
    return out;
}

/// Parses the render() format back. `to_move` is inferred from mark counts
/// assuming X opened, unless overridden by the caller afterwards.
inline TicTacToeBoard parse(const std::string& text) {
    TicTacToeBoard b;
    int idx = 0;
    for (char ch : text) {
        if (ch == '.' || ch == 'X' || ch == 'O') {
            if (idx >= 9) throw ConfigError("tictactoe parse: too many cells");
            b.cells[idx++] = ch == '.' ? Mark::Empty : (ch == 'X' ? Mark::X : Mark::O);
        } else if (ch != ' ' && ch != '\n') {
            throw ConfigError(std::string("tictactoe parse: unexpected character '") + ch + "'");
        }
    }
    if (idx != 9) throw ConfigError("tictactoe parse: expected 9 cells");
    int nx = 0, no = 0;
    for (Mark m : b.cells) {
        nx += m == Mark::X;
        no += m == Mark::O;
    }
    b.to_move = nx <= no ? Mark::X : Mark::O;
    return b;
}

/// Board encode for memoization: 9 base-3 digits plus the mover bit.
inline int encode(const TicTacToeBoard& b) {
    int code = 0;
    for (int i = 0; i < 9; ++i) code = code * 3 + static_cast<int>(b.cells[i]);
    return code * 2 + (b.to_move == Mark::X ? 0 : 1);
}

/// Cells that would complete a three-in-a-row for `m` if filled now.
inline std::vector<int> completing_cells(const TicTacToeBoard& b, Mark m) {
    std::vector<int> out;
    for (const auto& line : kLines) {
        int own = 0, empty_idx = -1, empties = 0;
        for (int cell : line) {
            if (b.cells[cell] == m) ++own;
            else if (b.cells[cell] == Mark::Empty) { ++empties; empty_idx = cell; }
        }
        if (own == 2 && empties == 1) out.push_back(empty_idx);
    }
    return out;
}

}  // namespace mage::env::ttt
