#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mage/advantage/advantage.hpp"
#include "mage/env/kuhn.hpp"
#include "mage/env/tictactoe.hpp"
#include "mage/rollout/trajectory.hpp"

namespace mage::rollout {

// Kuhn decision situations, determined by the public history at the decision:
// 0 opener, 1 facing a pass, 2 facing a bet, 3 facing a bet after own pass.
inline int kuhn_situation(const std::string& history) {
    if (history.empty()) return 0;
    if (history == "p") return 1;
    if (history == "b") return 2;
    if (history == "pb") return 3;
    throw ContractError("kuhn situation: not a decision history: " + history);
}

/// Digest of Kuhn episodes: outcome-weighted action statistics per decision
/// point plus the opponent's observed betting tendencies.
struct KuhnDigest {
    // indexed by (situation*3 + card)*2 + action
    std::array<double, 24> outcome_sum{};
    std::array<int, 24> tried{};
    // coarse marginals per (situation, action)
    std::array<double, 8> coarse_outcome_sum{};
    std::array<int, 8> coarse_tried{};
    // opponent behavior counters
    int opp_actions = 0;
    int opp_bets = 0;
    int opp_faced_bet = 0;
    int opp_folds = 0;

    void accumulate(const KuhnDigest& other) {
        for (std::size_t i = 0; i < outcome_sum.size(); ++i) {
            outcome_sum[i] += other.outcome_sum[i];
            tried[i] += other.tried[i];
        }
        for (std::size_t i = 0; i < coarse_outcome_sum.size(); ++i) {
            coarse_outcome_sum[i] += other.coarse_outcome_sum[i];
            coarse_tried[i] += other.coarse_tried[i];
        }
        opp_actions += other.opp_actions;
        opp_bets += other.opp_bets;
        opp_faced_bet += other.opp_faced_bet;
        opp_folds += other.opp_folds;
    }
    bool operator==(const KuhnDigest&) const = default;
};

/// Digest of Tic-Tac-Toe episodes: per-cell and per-state action outcomes,
/// the opponent's move histogram, and the first missed block if any.
struct TttDigest {
    std::array<double, 9> cell_outcome_sum{};
    std::array<int, 9> cell_tried{};
    std::map<std::uint64_t, std::array<double, 9>> anchor_outcome_sum;
    std::map<std::uint64_t, std::array<int, 9>> anchor_tried;
    std::array<int, 9> opp_move_hist{};
    int opp_first_cell = -1;
    int missed_blocks = 0;
    std::optional<int> first_missed_block_cell;

    void accumulate(const TttDigest& other) {
        for (int i = 0; i < 9; ++i) {
            cell_outcome_sum[i] += other.cell_outcome_sum[i];
            cell_tried[i] += other.cell_tried[i];
            opp_move_hist[i] += other.opp_move_hist[i];
        }
        for (const auto& [anchor, sums] : other.anchor_outcome_sum) {
            auto& mine = anchor_outcome_sum[anchor];
            const auto& counts = other.anchor_tried.at(anchor);
            auto& mine_counts = anchor_tried[anchor];
            for (int i = 0; i < 9; ++i) {
                mine[i] += sums[i];
                mine_counts[i] += counts[i];
            }
        }
        missed_blocks += other.missed_blocks;
        if (opp_first_cell < 0) opp_first_cell = other.opp_first_cell;
        if (!first_missed_block_cell) first_missed_block_cell = other.first_missed_block_cell;
    }
    bool operator==(const TttDigest&) const = default;
};

/// Digest of Sokoban episodes: per-direction outcomes and block rates.
struct SokobanDigest {
    std::array<double, 4> dir_outcome_sum{};
    std::array<int, 4> dir_tried{};
    std::array<int, 4> dir_blocked{};
    int deadlocks = 0;
    int best_boxes_on_target = 0;

    void accumulate(const SokobanDigest& other) {
        for (int i = 0; i < 4; ++i) {
            dir_outcome_sum[i] += other.dir_outcome_sum[i];
            dir_tried[i] += other.dir_tried[i];
            dir_blocked[i] += other.dir_blocked[i];
        }
        deadlocks += other.deadlocks;
        best_boxes_on_target = std::max(best_boxes_on_target, other.best_boxes_on_target);
    }
    bool operator==(const SokobanDigest&) const = default;
};

using DigestStats = std::variant<std::monostate, KuhnDigest, TttDigest, SokobanDigest>;

/// Post-episode reflection: a structured digest (recomputable from the
/// trajectory alone) plus its text rendering. Episode 0's reflection is the
/// designated empty one.
struct Reflection {
    int episode_index = 0;
    std::string text;
    env::GameResult outcome = env::GameResult::Ongoing;
    int invalid_count = 0;
    DigestStats features;

    bool operator==(const Reflection&) const = default;
};

inline Reflection empty_reflection() { return Reflection{0, "", env::GameResult::Ongoing, 0, {}}; }

/// Ordered contextual memory [m_0, ..., m_{n-1}]. Always starts with the
/// empty reflection; its length equals the current episode index.
struct ContextMemory {
    std::vector<Reflection> items;

    static ContextMemory initial() { return ContextMemory{{empty_reflection()}}; }
    int size() const { return static_cast<int>(items.size()); }
    bool operator==(const ContextMemory&) const = default;
};

/// Returns `memory` extended by one reflection; the input is not modified.
inline ContextMemory append_memory(const ContextMemory& memory, const Reflection& reflection) {
    MAGE_REQUIRE(reflection.episode_index == memory.size(),
                 "append_memory: reflection index " + std::to_string(reflection.episode_index) +
                     " does not match memory length " + std::to_string(memory.size()));
    ContextMemory out = memory;
    out.items.push_back(reflection);
    return out;
}

// ----------------------------------------------------------- digest builders

namespace detail {

inline KuhnDigest kuhn_digest(const EpisodeTrajectory& traj) {
    KuhnDigest d;
    const int sign = outcome_sign(traj.outcome);
    int agent_seat = 0;
    for (const auto& step : traj.steps) {
        const auto& view = std::get<env::KuhnView>(step.obs.structured);
        agent_seat = view.seat;
        const int sit = kuhn_situation(view.history);
        const int card = static_cast<int>(view.card);
        const int action = step.action.as_kuhn() == env::KuhnAction::Bet ? 1 : 0;
        const int idx = (sit * 3 + card) * 2 + action;
        d.outcome_sum[idx] += sign;
        d.tried[idx] += 1;
        const int coarse = sit * 2 + action;
        d.coarse_outcome_sum[coarse] += sign;
        d.coarse_tried[coarse] += 1;
    }
    // opponent actions from the final public history
    const auto& final_view = std::get<env::KuhnView>(traj.final_obs.structured);
    const std::string& h = final_view.history;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const int actor = static_cast<int>(i) % 2;
        if (actor == agent_seat) continue;
        d.opp_actions += 1;
        d.opp_bets += h[i] == 'b';
        if (i >= 1 && h[i - 1] == 'b') {
            d.opp_faced_bet += 1;
            d.opp_folds += h[i] == 'p';
        }
    }
    return d;
}

inline int cell_index(const env::TttMove& m) { return (m.row - 1) * 3 + (m.col - 1); }

inline TttDigest ttt_digest(const EpisodeTrajectory& traj) {
    TttDigest d;
    const int sign = outcome_sign(traj.outcome);
    env::Mark agent_mark = env::Mark::X;
    for (const auto& step : traj.steps) {
        const auto& board = std::get<env::TicTacToeBoard>(step.obs.structured);
        agent_mark = board.to_move;
        if (step.invalid || !env::ttt::is_legal(board, step.action.as_ttt())) continue;
        const int cell = cell_index(step.action.as_ttt());
        d.cell_outcome_sum[cell] += sign;
        d.cell_tried[cell] += 1;
        const std::uint64_t anchor = adv::anchor_key(step.obs.structured);
        auto& sums = d.anchor_outcome_sum[anchor];
        auto& counts = d.anchor_tried[anchor];
        sums[cell] += sign;
        counts[cell] += 1;

        // a missed block: the opponent threatened a line and the agent neither
        // blocked it nor won outright
        const auto threats = env::ttt::completing_cells(board, env::other_mark(agent_mark));
        const auto wins = env::ttt::completing_cells(board, agent_mark);
        if (!threats.empty() && wins.empty()) {
            const bool blocked =
                std::find(threats.begin(), threats.end(), cell) != threats.end();
            if (!blocked) {
                d.missed_blocks += 1;
                if (!d.first_missed_block_cell) d.first_missed_block_cell = threats.front();
            }
        }
    }
    // opponent moves: diffs between consecutive observed boards
    std::vector<const env::TicTacToeBoard*> boards;
    for (const auto& step : traj.steps)
        boards.push_back(&std::get<env::TicTacToeBoard>(step.obs.structured));
    boards.push_back(&std::get<env::TicTacToeBoard>(traj.final_obs.structured));
    const env::Mark opp_mark = env::other_mark(agent_mark);
    for (std::size_t i = 0; i + 1 < boards.size(); ++i) {
        for (int cell = 0; cell < 9; ++cell) {
            if (boards[i]->cells[cell] == env::Mark::Empty &&
                boards[i + 1]->cells[cell] == opp_mark) {
                d.opp_move_hist[cell] += 1;
                if (d.opp_first_cell < 0) d.opp_first_cell = cell;
            }
        }
    }
    // an opponent opening before the agent's first decision
    if (!boards.empty()) {
        for (int cell = 0; cell < 9; ++cell) {
            if (boards.front()->cells[cell] == opp_mark) {
                d.opp_move_hist[cell] += 1;
                if (d.opp_first_cell < 0) d.opp_first_cell = cell;
            }
        }
    }
    return d;
}

inline SokobanDigest sokoban_digest(const EpisodeTrajectory& traj) {
    SokobanDigest d;
    const int sign = outcome_sign(traj.outcome);
    for (const auto& step : traj.steps) {
        for (env::Dir dir : step.action.as_sokoban().moves) {
            const int i = static_cast<int>(dir);
            d.dir_outcome_sum[i] += sign;
            d.dir_tried[i] += 1;
        }
        if (step.invalid) {
            for (env::Dir dir : step.action.as_sokoban().moves)
                d.dir_blocked[static_cast<int>(dir)] += 1;
        }
    }
    if (traj.outcome == env::GameResult::Loss) d.deadlocks += 1;
    const auto& room = std::get<env::SokobanRoom>(traj.final_obs.structured);
    d.best_boxes_on_target = env::sokoban::boxes_on_target(room);
    return d;
}

}  // namespace detail

inline DigestStats digest_trajectory(env::EnvKind kind, const EpisodeTrajectory& traj) {
    switch (kind) {
        case env::EnvKind::KuhnPoker: return detail::kuhn_digest(traj);
        case env::EnvKind::TicTacToe: return detail::ttt_digest(traj);
        case env::EnvKind::Sokoban: return detail::sokoban_digest(traj);
    }
    return {};
}

// ------------------------------------------------------------- text rendering

inline std::string render_reflection_text(env::EnvKind kind, const EpisodeTrajectory& traj,
                                          const DigestStats& stats) {
    std::ostringstream out;
    out << "Episode " << traj.episode_index << " ended in " << env::to_string(traj.outcome) << ".";
    if (traj.invalid_count > 0)
        out << " Invalid actions: " << traj.invalid_count << ".";
    switch (kind) {
        case env::EnvKind::TicTacToe: {
            const auto& d = std::get<TttDigest>(stats);
            if (d.first_missed_block_cell) {
                const int cell = *d.first_missed_block_cell;
                out << " Missed a block at (" << cell / 3 + 1 << "," << cell % 3 + 1
                    << "); take that cell when the opponent threatens a line.";
            }
            if (d.opp_first_cell >= 0)
                out << " Opponent opened at (" << d.opp_first_cell / 3 + 1 << ","
                    << d.opp_first_cell % 3 + 1 << ").";
            if (traj.outcome == env::GameResult::Win)
                out << " The winning line worked; keep the same plan.";
            break;
        }
        case env::EnvKind::KuhnPoker: {
            const auto& d = std::get<KuhnDigest>(stats);
            if (d.opp_actions > 0)
                out << " Opponent bet " << d.opp_bets << "/" << d.opp_actions << " decisions";
            if (d.opp_faced_bet > 0)
                out << ", folded to a bet " << d.opp_folds << "/" << d.opp_faced_bet << " times";
            if (d.opp_actions > 0) out << ".";
            break;
        }
        case env::EnvKind::Sokoban: {
            const auto& d = std::get<SokobanDigest>(stats);
            out << " Boxes on targets at the end: " << d.best_boxes_on_target << ".";
            if (d.deadlocks > 0) out << " A box got stuck; avoid pushing into corners.";
            break;
        }
    }
    return out.str();
}

enum class ReflectionGenerator { Structured, Remote };

/// Deterministic structured reflection: digest plus its text rendering.
/// The Remote generator is layered on top by the rollout engine, which owns
/// the endpoint; its features are still computed locally by this function.
inline Reflection generate_reflection(env::EnvKind kind, const EpisodeTrajectory& traj) {
    MAGE_REQUIRE(traj.outcome != env::GameResult::Ongoing,
                 "generate_reflection: trajectory incomplete");
    Reflection r;
    r.episode_index = traj.episode_index;
    r.outcome = traj.outcome;
    r.invalid_count = traj.invalid_count;
    r.features = digest_trajectory(kind, traj);
    r.text = render_reflection_text(kind, traj, r.features);
    return r;
}

// ----------------------------------------------------------- memory aggregate

/// Sums digest stats across every reflection in memory (m_0 contributes
/// nothing). The featurizer reads this aggregate.
template <typename Digest>
inline Digest aggregate_memory(const ContextMemory& memory) {
    Digest total;
    for (const auto& r : memory.items)
        if (const auto* d = std::get_if<Digest>(&r.features)) total.accumulate(*d);
    return total;
}

}  // namespace mage::rollout
