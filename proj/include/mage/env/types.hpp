#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mage/common/errors.hpp"

namespace mage::env {

enum class EnvKind { TicTacToe, KuhnPoker, Sokoban };

inline const char* to_string(EnvKind k) {
    switch (k) {
        case EnvKind::TicTacToe: return "tictactoe";
        case EnvKind::KuhnPoker: return "kuhn";
        case EnvKind::Sokoban: return "sokoban";
    }
    return "?";
}

inline EnvKind env_kind_from_string(const std::string& s) {
    if (s == "tictactoe" || s == "ttt") return EnvKind::TicTacToe;
    if (s == "kuhn" || s == "kuhn_poker") return EnvKind::KuhnPoker;
    if (s == "sokoban") return EnvKind::Sokoban;
    throw ConfigError("unknown environment: " + s);
}

enum class GameResult { Ongoing, Win, Loss, Draw, Timeout };

inline const char* to_string(GameResult r) {
    switch (r) {
        case GameResult::Ongoing: return "ongoing";
        case GameResult::Win: return "win";
        case GameResult::Loss: return "loss";
        case GameResult::Draw: return "draw";
        case GameResult::Timeout: return "timeout";
    }
    return "?";
}

// ---------------------------------------------------------------- Tic-Tac-Toe

enum class Mark : std::uint8_t { Empty = 0, X = 1, O = 2 };

inline char mark_char(Mark m) { return m == Mark::Empty ? '.' : (m == Mark::X ? 'X' : 'O'); }
inline Mark other_mark(Mark m) { return m == Mark::X ? Mark::O : Mark::X; }

/// Move coordinates are 1-indexed, matching the prompt convention.
struct TttMove {
    int row = 0;
    int col = 0;
    bool operator==(const TttMove&) const = default;
};

struct TicTacToeBoard {
    std::array<Mark, 9> cells{};  // row-major
    Mark to_move = Mark::X;

    Mark at(int row, int col) const { return cells[(row - 1) * 3 + (col - 1)]; }
    void set(int row, int col, Mark m) { cells[(row - 1) * 3 + (col - 1)] = m; }
    bool operator==(const TicTacToeBoard&) const = default;
};

// ----------------------------------------------------------------- Kuhn poker

enum class KuhnCard : std::uint8_t { J = 0, Q = 1, K = 2 };
enum class KuhnAction : std::uint8_t { Pass = 0, Bet = 1 };

inline char card_char(KuhnCard c) { return c == KuhnCard::J ? 'J' : (c == KuhnCard::Q ? 'Q' : 'K'); }
inline const char* to_string(KuhnAction a) { return a == KuhnAction::Pass ? "PASS" : "BET"; }

/// Full Kuhn hand state (both private cards). History uses 'p'/'b' tokens in
/// play order starting from player 0.
struct KuhnState {
    std::array<KuhnCard, 2> cards{KuhnCard::J, KuhnCard::Q};
    std::string history;
    bool operator==(const KuhnState&) const = default;
};

/// One player's information set view of a hand: own card plus the public
/// betting history. The opponent card is revealed only at a terminal showdown.
struct KuhnView {
    int seat = 0;
    KuhnCard card = KuhnCard::J;
    std::string history;
    std::optional<KuhnCard> revealed_opponent_card;
    bool operator==(const KuhnView&) const = default;
};

// -------------------------------------------------------------------- Sokoban

enum class SokobanCell : std::uint8_t {
    Wall = 0,
    Floor,
    Target,
    Box,
    Player,
    BoxOnTarget,
    PlayerOnTarget,
};

enum class Dir : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline const char* to_string(Dir d) {
    switch (d) {
        case Dir::Up: return "up";
        case Dir::Down: return "down";
        case Dir::Left: return "left";
        case Dir::Right: return "right";
    }
    return "?";
}

struct SokobanRoom {
    int size = 0;
    std::vector<SokobanCell> grid;  // row-major, size*size
    int num_boxes = 0;
    int steps_taken = 0;

    SokobanCell at(int r, int c) const { return grid[r * size + c]; }
    void set(int r, int c, SokobanCell v) { grid[r * size + c] = v; }
    bool in_bounds(int r, int c) const { return r >= 0 && r < size && c >= 0 && c < size; }
    bool operator==(const SokobanRoom&) const = default;
};

/// A Sokoban action carries between 1 and `actions_per_turn` moves.
struct SokobanMove {
    std::vector<Dir> moves;
    bool operator==(const SokobanMove&) const = default;
};

// ------------------------------------------------------------- unified action

struct Action {
    std::variant<TttMove, KuhnAction, SokobanMove> value;

    bool operator==(const Action&) const = default;

    static Action ttt(int row, int col) { return Action{TttMove{row, col}}; }
    static Action kuhn(KuhnAction a) { return Action{a}; }
    static Action sokoban(std::vector<Dir> moves) { return Action{SokobanMove{std::move(moves)}}; }

    const TttMove& as_ttt() const { return std::get<TttMove>(value); }
    KuhnAction as_kuhn() const { return std::get<KuhnAction>(value); }
    const SokobanMove& as_sokoban() const { return std::get<SokobanMove>(value); }
};

inline std::string to_string(const Action& a) {
    if (const auto* m = std::get_if<TttMove>(&a.value)) {
        return "(" + std::to_string(m->row) + "," + std::to_string(m->col) + ")";
    }
    if (const auto* k = std::get_if<KuhnAction>(&a.value)) return to_string(*k);
    const auto& s = std::get<SokobanMove>(a.value);
    std::string out;
    for (std::size_t i = 0; i < s.moves.size(); ++i) {
        if (i) out += ",";
        out += to_string(s.moves[i]);
    }
    return out;
}

// --------------------------------------------------------- observation & step

using StructuredState = std::variant<TicTacToeBoard, KuhnView, SokobanRoom>;

struct Observation {
    std::string text;
    StructuredState structured;
    int turn_index = 1;
    std::vector<Action> admissible;

    bool operator==(const Observation&) const = default;
};

struct StepOutcome {
    Observation next_obs;
    bool terminal = false;
    GameResult result = GameResult::Ongoing;
    bool invalid = false;        // true iff the action was rejected / was a full no-op
    int invalid_moves = 0;       // invalid-counter increments caused by this step
};

}  // namespace mage::env
