#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mage/common/rng.hpp"
#include "mage/env/kuhn.hpp"
#include "mage/env/sokoban.hpp"
#include "mage/env/tictactoe.hpp"
#include "mage/env/types.hpp"

namespace mage::env {

enum class KuhnSeatMode { UniformPerEpisode, Fixed0, Fixed1 };

struct EnvConfig {
    EnvKind kind = EnvKind::TicTacToe;
    int max_turns = -1;  // -1: per-env default (TTT 8, Kuhn 6, Sokoban 7)

    // Tic-Tac-Toe
    Mark agent_mark = Mark::X;
    bool agent_moves_first = true;

    // Kuhn poker
    KuhnSeatMode seat_mode = KuhnSeatMode::UniformPerEpisode;

    // Sokoban
    int sokoban_size = 6;
    int sokoban_boxes = 2;
    int sokoban_search_depth = 100;
    int sokoban_max_solution_steps = 21;
    int actions_per_turn = 3;

    int turns() const {
        if (max_turns > 0) return max_turns;
        switch (kind) {
            case EnvKind::TicTacToe: return 8;
            case EnvKind::KuhnPoker: return 6;
            case EnvKind::Sokoban: return 7;
        }
        return 8;
    }

    void validate() const {
        if (max_turns == 0 || max_turns < -1) throw ConfigError("env: max_turns must be positive");
        if (kind == EnvKind::Sokoban) {
            if (sokoban_size < 4) throw ConfigError("sokoban: size must be >= 4");
            const int interior = (sokoban_size - 2) * (sokoban_size - 2);
            if (sokoban_boxes < 1 || sokoban_boxes > interior / 4)
                throw ConfigError("sokoban: num_boxes must be in [1, floor_area/4]");
            if (sokoban_search_depth < 1) throw ConfigError("sokoban: search_depth must be >= 1");
            if (sokoban_max_solution_steps < sokoban_boxes)
                throw ConfigError("sokoban: max_solution_steps must be >= num_boxes");
            if (actions_per_turn < 1) throw ConfigError("sokoban: actions_per_turn must be >= 1");
        }
        if (kind == EnvKind::TicTacToe && agent_mark == Mark::Empty)
            throw ConfigError("tictactoe: agent mark must be X or O");
    }
};

/// Opponents see the environment through a StructuredState: the full board in
/// Tic-Tac-Toe, their own information set in Kuhn poker.
using OpponentFn = std::function<Action(const StructuredState&, Rng&)>;

/// One playable episode behind the shared contract: reset/step/admissible/
/// render, per-env turn caps, invalid-action bookkeeping. States are plain
/// values; all randomness flows through the seeded stream created at reset.
class Environment {
public:
    explicit Environment(EnvConfig config, OpponentFn opponent = nullptr)
        : config_(std::move(config)), opponent_(std::move(opponent)) {
        config_.validate();
    }

    const EnvConfig& config() const { return config_; }

    Observation reset(std::uint64_t seed) {
        rng_ = Rng(derive_seed(seed, 0x456e76u));
        terminal_ = false;
        result_ = GameResult::Ongoing;
        invalid_count_ = 0;
        turns_used_ = 0;
        moves_attempted_ = 0;
        switch (config_.kind) {
            case EnvKind::TicTacToe: {
                board_ = TicTacToeBoard{};
                board_.to_move = config_.agent_moves_first ? config_.agent_mark
                                                           : other_mark(config_.agent_mark);
                if (!config_.agent_moves_first) opponent_move_ttt();
                break;
            }
            case EnvKind::KuhnPoker: {
                int deck[3] = {0, 1, 2};
                for (int i = 2; i > 0; --i) std::swap(deck[i], deck[rng_.next_index(i + 1)]);
                kuhn_ = KuhnState{};
                kuhn_.cards = {static_cast<KuhnCard>(deck[0]), static_cast<KuhnCard>(deck[1])};
                kuhn_.history.clear();
                switch (config_.seat_mode) {
                    case KuhnSeatMode::UniformPerEpisode: agent_seat_ = rng_.next_index(2); break;
                    case KuhnSeatMode::Fixed0: agent_seat_ = 0; break;
                    case KuhnSeatMode::Fixed1: agent_seat_ = 1; break;
                }
                if (kuhn::player_to_act(kuhn_.history) != agent_seat_) opponent_move_kuhn();
                break;
            }
            case EnvKind::Sokoban: {
                room_ = sokoban::generate_room(config_.sokoban_size, config_.sokoban_boxes,
                                               config_.sokoban_search_depth,
                                               config_.sokoban_max_solution_steps, seed);
                break;
            }
        }
        return observation();
    }

    bool terminal() const { return terminal_; }
    GameResult result() const { return result_; }
    int invalid_count() const { return invalid_count_; }
    int turns_used() const { return turns_used_; }
    int agent_seat() const { return agent_seat_; }

    std::vector<Action> admissible() const {
        if (terminal_) return {};
        switch (config_.kind) {
            case EnvKind::TicTacToe: {
                std::vector<Action> out;
                for (const auto& m : ttt::legal_moves(board_)) out.push_back(Action{m});
                return out;
            }
            case EnvKind::KuhnPoker:
                return {Action::kuhn(KuhnAction::Pass), Action::kuhn(KuhnAction::Bet)};
            case EnvKind::Sokoban:
                return {Action::sokoban({Dir::Up}), Action::sokoban({Dir::Down}),
                        Action::sokoban({Dir::Left}), Action::sokoban({Dir::Right})};
        }
        return {};
    }

    std::string render() const {
        switch (config_.kind) {
            case EnvKind::TicTacToe: return ttt::render(board_);
            case EnvKind::KuhnPoker: return kuhn::render_view(agent_view());
            case EnvKind::Sokoban: return sokoban::render(room_);
        }
        return {};
    }

    StructuredState structured() const {
        switch (config_.kind) {
            case EnvKind::TicTacToe: return board_;
            case EnvKind::KuhnPoker: return agent_view();
            case EnvKind::Sokoban: return room_;
        }
        return board_;
    }

    Observation observation() const {
        Observation obs;
        obs.text = render();
        obs.structured = structured();
        obs.turn_index = turn_index();
        obs.admissible = admissible();
        return obs;
    }

    StepOutcome step(const Action& action) {
        if (terminal_) throw ContractError("env: step on a terminal episode");
        switch (config_.kind) {
            case EnvKind::TicTacToe: return step_ttt(action);
            case EnvKind::KuhnPoker: return step_kuhn(action);
            case EnvKind::Sokoban: return step_sokoban(action);
        }
        throw ContractError("env: unknown kind");
    }

private:
    int turn_index() const {
        if (config_.kind == EnvKind::Sokoban)
            return moves_attempted_ / config_.actions_per_turn + 1;
        return turns_used_ + 1;
    }

    KuhnView agent_view() const {
        KuhnView v;
        v.seat = agent_seat_;
        v.card = kuhn_.cards[agent_seat_];
        v.history = kuhn_.history;
        if (terminal_ && (kuhn_.history == "pp" || kuhn_.history == "bb" || kuhn_.history == "pbb"))
            v.revealed_opponent_card = kuhn_.cards[1 - agent_seat_];
        return v;
    }

    void opponent_move_ttt() {
        MAGE_REQUIRE(opponent_ != nullptr, "tictactoe: opponent required");
        const Action a = opponent_(StructuredState{board_}, rng_);
        MAGE_REQUIRE(ttt::is_legal(board_, a.as_ttt()), "tictactoe: opponent made illegal move");
        ttt::apply(board_, a.as_ttt());
    }

    void opponent_move_kuhn() {
        MAGE_REQUIRE(opponent_ != nullptr, "kuhn: opponent required");
        KuhnView v;
        v.seat = 1 - agent_seat_;
        v.card = kuhn_.cards[v.seat];
        v.history = kuhn_.history;
        const Action a = opponent_(StructuredState{v}, rng_);
        kuhn_.history += a.as_kuhn() == KuhnAction::Bet ? 'b' : 'p';
    }

    StepOutcome finish(bool invalid, int invalid_moves) {
        StepOutcome out;
        out.invalid = invalid;
        out.invalid_moves = invalid_moves;
        out.terminal = terminal_;
        out.result = terminal_ ? result_ : GameResult::Ongoing;
        out.next_obs = observation();
        return out;
    }

    void set_result(GameResult r) {
        terminal_ = true;
        result_ = r;
    }

    StepOutcome step_ttt(const Action& action) {
        const auto* move = std::get_if<TttMove>(&action.value);
        MAGE_REQUIRE(move != nullptr, "tictactoe: wrong action type");
        ++turns_used_;
        if (!ttt::is_legal(board_, *move)) {
            ++invalid_count_;
            if (turns_used_ >= config_.turns()) set_result(GameResult::Timeout);
            return finish(true, 1);
        }
        ttt::apply(board_, *move);
        resolve_ttt_terminal();
        if (!terminal_) {
            opponent_move_ttt();
            resolve_ttt_terminal();
        }
        if (!terminal_ && turns_used_ >= config_.turns()) set_result(GameResult::Timeout);
        return finish(false, 0);
    }

    void resolve_ttt_terminal() {
        if (const auto w = ttt::winner(board_)) {
            set_result(*w == config_.agent_mark ? GameResult::Win : GameResult::Loss);
        } else if (ttt::is_full(board_)) {
            set_result(GameResult::Draw);
        }
    }

    StepOutcome step_kuhn(const Action& action) {
        const auto* move = std::get_if<KuhnAction>(&action.value);
        MAGE_REQUIRE(move != nullptr, "kuhn: wrong action type");
        ++turns_used_;
        kuhn_.history += *move == KuhnAction::Bet ? 'b' : 'p';
        if (!kuhn::is_terminal_history(kuhn_.history) &&
            kuhn::player_to_act(kuhn_.history) != agent_seat_)
            opponent_move_kuhn();
        if (kuhn::is_terminal_history(kuhn_.history)) {
            const int p0 = kuhn::payoff_p0(kuhn_.cards, kuhn_.history);
            const int net = agent_seat_ == 0 ? p0 : -p0;
            set_result(net > 0 ? GameResult::Win : GameResult::Loss);
        } else if (turns_used_ >= config_.turns()) {
            set_result(GameResult::Timeout);
        }
        return finish(false, 0);
    }

    StepOutcome step_sokoban(const Action& action) {
        const auto* move = std::get_if<SokobanMove>(&action.value);
        MAGE_REQUIRE(move != nullptr, "sokoban: wrong action type");
        MAGE_REQUIRE(!move->moves.empty(), "sokoban: action must carry at least one move");
        MAGE_REQUIRE(static_cast<int>(move->moves.size()) <= config_.actions_per_turn,
                     "sokoban: action exceeds actions_per_turn");
        const int budget = config_.turns() * config_.actions_per_turn;
        int invalid_moves = 0;
        bool changed = false;
        for (Dir d : move->moves) {
            if (terminal_) break;
            ++moves_attempted_;
            if (sokoban::apply_move(room_, d)) {
                changed = true;
                if (sokoban::is_solved(room_)) set_result(GameResult::Win);
                else if (sokoban::is_deadlocked(room_)) set_result(GameResult::Loss);
            } else {
                ++invalid_count_;
                ++invalid_moves;
            }
            if (!terminal_ && moves_attempted_ >= budget) set_result(GameResult::Timeout);
        }
        return finish(!changed, invalid_moves);
    }

    EnvConfig config_;
    OpponentFn opponent_;
    Rng rng_;
    bool terminal_ = false;
    GameResult result_ = GameResult::Ongoing;
    int invalid_count_ = 0;
    int turns_used_ = 0;
    int moves_attempted_ = 0;
    int agent_seat_ = 0;

    TicTacToeBoard board_;
    KuhnState kuhn_;
    SokobanRoom room_;
};

}  // namespace mage::env
