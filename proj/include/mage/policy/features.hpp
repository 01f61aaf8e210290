#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "mage/env/sokoban.hpp"
#include "mage/rollout/context.hpp"

namespace mage::policy {

struct FeatureVector {
    std::vector<double> values;
    bool operator==(const FeatureVector&) const = default;
};

/// Width of the per-action feature vector the softmax policy consumes.
inline int action_feature_dim(env::EnvKind kind) {
    switch (kind) {
        case env::EnvKind::TicTacToe: return 18;
        case env::EnvKind::KuhnPoker: return 35;
        case env::EnvKind::Sokoban: return 12;
    }
    return 0;
}

namespace detail {

inline double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

// ---- Kuhn: base one-hots on (info set x BET) plus digest-driven channels.
// Digest features are zero in episode 1 and carry the opponent statistics and
// action-outcome history from earlier episodes of the same meta-episode.
inline std::vector<double> kuhn_action_features(const rollout::PolicyContext& ctx,
                                                const env::Action& action) {
    const auto& view = std::get<env::KuhnView>(ctx.current().structured);
    const auto digest = rollout::aggregate_memory<rollout::KuhnDigest>(*ctx.memory);
    const int sit = rollout::kuhn_situation(view.history);
    const int card = static_cast<int>(view.card);
    const int a = action.as_kuhn() == env::KuhnAction::Bet ? 1 : 0;
    const double bet = a;

    std::vector<double> f(35, 0.0);
    f[0] = bet;
    f[1 + sit * 3 + card] = bet;           // 12 info-set x bet
    f[13 + card] = bet;                    // 3 card x bet
    f[16 + sit] = bet;                     // 4 situation x bet
    const int idx = (sit * 3 + card) * 2 + a;
    const int coarse = sit * 2 + a;
    f[20] = ratio(digest.outcome_sum[idx], digest.tried[idx]);
    f[21] = ratio(digest.coarse_outcome_sum[coarse], digest.coarse_tried[coarse]);
    f[22] = digest.tried[idx] > 0 ? 1.0 : 0.0;
    const double fold_rate = ratio(digest.opp_folds, digest.opp_faced_bet);
    const double aggr_rate = ratio(digest.opp_bets, digest.opp_actions);
    f[23] = fold_rate * bet;
    f[24] = aggr_rate * bet;
    f[25 + sit] = fold_rate * bet;
    f[29 + sit] = aggr_rate * bet;
    f[33] = digest.opp_folds > 0 ? bet : 0.0;
    f[34] = digest.opp_actions > 0 ? bet : 0.0;
    return f;
}

// ---- Tic-Tac-Toe: positional one-hot, immediate tactics, digest channels.
inline std::vector<double> ttt_action_features(const rollout::PolicyContext& ctx,
                                               const env::Action& action) {
    const auto& board = std::get<env::TicTacToeBoard>(ctx.current().structured);
    const auto digest = rollout::aggregate_memory<rollout::TttDigest>(*ctx.memory);
    const auto& move = action.as_ttt();
    const int cell = (move.row - 1) * 3 + (move.col - 1);
    const env::Mark me = board.to_move;

    std::vector<double> f(18, 0.0);
    f[cell] = 1.0;  // 9 cell one-hot
    const auto wins = env::ttt::completing_cells(board, me);
    const auto threats = env::ttt::completing_cells(board, env::other_mark(me));
    f[9] = std::find(wins.begin(), wins.end(), cell) != wins.end() ? 1.0 : 0.0;
    f[10] = std::find(threats.begin(), threats.end(), cell) != threats.end() ? 1.0 : 0.0;
    env::TicTacToeBoard after = board;
    env::ttt::apply(after, move);
    f[11] = std::min<std::size_t>(env::ttt::completing_cells(after, me).size(), 2) / 2.0;
    const std::uint64_t anchor = adv::anchor_key(ctx.current().structured);
    if (const auto it = digest.anchor_tried.find(anchor); it != digest.anchor_tried.end()) {
        f[12] = ratio(digest.anchor_outcome_sum.at(anchor)[cell], it->second[cell]);
        f[14] = it->second[cell] > 0 ? 1.0 : 0.0;
    }
    f[13] = ratio(digest.cell_outcome_sum[cell], digest.cell_tried[cell]);
    f[15] = digest.opp_move_hist[cell] > 0 ? 1.0 : 0.0;
    f[16] = digest.opp_first_cell == cell ? 1.0 : 0.0;
    f[17] = digest.first_missed_block_cell && *digest.first_missed_block_cell == cell ? 1.0 : 0.0;
    return f;
}

// ---- Sokoban: direction one-hot plus push/deadlock/distance lookahead.
inline std::vector<double> sokoban_action_features(const rollout::PolicyContext& ctx,
                                                   const env::Action& action) {
    const auto& room = std::get<env::SokobanRoom>(ctx.current().structured);
    const auto digest = rollout::aggregate_memory<rollout::SokobanDigest>(*ctx.memory);
    MAGE_REQUIRE(action.as_sokoban().moves.size() == 1,
                 "sokoban features: expected single-move actions");
    const env::Dir dir = action.as_sokoban().moves[0];
    const int d = static_cast<int>(dir);

    auto manhattan_cost = [](const env::SokobanRoom& r) {
        // sum over off-target boxes of the distance to the nearest free target,
        // plus the player's distance to the nearest off-target box
        int cost = 0, player_to_box = 0;
        const auto [pr, pc] = env::sokoban::player_pos(r);
        int nearest_box = -1;
        for (int i = 0; i < r.size * r.size; ++i) {
            if (r.grid[i] != env::SokobanCell::Box) continue;
            const int br = i / r.size, bc = i % r.size;
            int best = 1 << 20;
            for (int j = 0; j < r.size * r.size; ++j) {
                if (r.grid[j] == env::SokobanCell::Target ||
                    r.grid[j] == env::SokobanCell::PlayerOnTarget) {
                    const int tr = j / r.size, tc = j % r.size;
                    best = std::min(best, std::abs(br - tr) + std::abs(bc - tc));
                }
            }
            if (best < (1 << 20)) cost += best;
            const int pd = std::abs(br - pr) + std::abs(bc - pc);
            if (nearest_box < 0 || pd < nearest_box) nearest_box = pd;
        }
        if (nearest_box > 0) player_to_box = nearest_box - 1;  // adjacency is enough
        return cost * 4 + player_to_box;
    };

    std::vector<double> f(12, 0.0);
    f[d] = 1.0;
    env::SokobanRoom next = room;
    const bool moved = env::sokoban::apply_move(next, dir);
    f[4] = moved ? 0.0 : 1.0;
    if (moved) {
        bool pushed = false;  // a push happened iff some box cell changed
        for (int i = 0; i < room.size * room.size; ++i)
            if (env::sokoban::has_box(room.grid[i]) != env::sokoban::has_box(next.grid[i]))
                pushed = true;
        f[5] = pushed ? 1.0 : 0.0;
        f[6] = env::sokoban::boxes_on_target(next) > env::sokoban::boxes_on_target(room) ? 1.0 : 0.0;
        f[7] = env::sokoban::is_deadlocked(next) ? 1.0 : 0.0;
        const int before = manhattan_cost(room), after = manhattan_cost(next);
        f[8] = after < before ? 1.0 : (after > before ? -1.0 : 0.0);
    }
    f[9] = ratio(digest.dir_outcome_sum[d], digest.dir_tried[d]);
    f[10] = ratio(digest.dir_blocked[d], digest.dir_tried[d]);
    f[11] = digest.deadlocks > 0 ? 1.0 : 0.0;
    return f;
}

}  // namespace detail

/// Per-(context, action) feature vector: the inputs to the linear-softmax
/// policy's logits.
inline FeatureVector action_features(const rollout::PolicyContext& ctx, const env::Action& action) {
    switch (ctx.env_kind) {
        case env::EnvKind::KuhnPoker: return {detail::kuhn_action_features(ctx, action)};
        case env::EnvKind::TicTacToe: return {detail::ttt_action_features(ctx, action)};
        case env::EnvKind::Sokoban: return {detail::sokoban_action_features(ctx, action)};
    }
    throw ContractError("action_features: unknown env");
}

/// Context-level encoding: structured-state one-hot, admissible mask, and the
/// per-action digest summary. Deterministic in the context.
inline FeatureVector featurize(const rollout::PolicyContext& ctx) {
    std::vector<double> out;
    switch (ctx.env_kind) {
        case env::EnvKind::KuhnPoker: {
            const auto& view = std::get<env::KuhnView>(ctx.current().structured);
            const auto digest = rollout::aggregate_memory<rollout::KuhnDigest>(*ctx.memory);
            const int sit = rollout::kuhn_situation(view.history);
            const int card = static_cast<int>(view.card);
            std::vector<double> info(12, 0.0);
            info[sit * 3 + card] = 1.0;
            out = info;
            out.push_back(1.0);  // PASS admissible
            out.push_back(1.0);  // BET admissible
            for (int a = 0; a < 2; ++a) {
                const int idx = (sit * 3 + card) * 2 + a;
                out.push_back(detail::ratio(digest.outcome_sum[idx], digest.tried[idx]));
            }
            out.push_back(detail::ratio(digest.opp_folds, digest.opp_faced_bet));
            out.push_back(detail::ratio(digest.opp_bets, digest.opp_actions));
            break;
        }
        case env::EnvKind::TicTacToe: {
            const auto& board = std::get<env::TicTacToeBoard>(ctx.current().structured);
            const auto digest = rollout::aggregate_memory<rollout::TttDigest>(*ctx.memory);
            for (int cell = 0; cell < 9; ++cell)
                for (int m = 0; m < 3; ++m)
                    out.push_back(board.cells[cell] == static_cast<env::Mark>(m) ? 1.0 : 0.0);
            for (int cell = 0; cell < 9; ++cell) {
                const env::TttMove move{cell / 3 + 1, cell % 3 + 1};
                out.push_back(env::ttt::is_legal(board, move) ? 1.0 : 0.0);
            }
            for (int cell = 0; cell < 9; ++cell)
                out.push_back(detail::ratio(digest.cell_outcome_sum[cell], digest.cell_tried[cell]));
            for (int cell = 0; cell < 9; ++cell)
                out.push_back(static_cast<double>(digest.opp_move_hist[cell]));
            break;
        }
        case env::EnvKind::Sokoban: {
            const auto& room = std::get<env::SokobanRoom>(ctx.current().structured);
            const auto digest = rollout::aggregate_memory<rollout::SokobanDigest>(*ctx.memory);
            const auto [pr, pc] = env::sokoban::player_pos(room);
            // 3x3 window around the player: wall/box/target planes
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const int r = pr + dr, c = pc + dc;
                    const bool in = room.in_bounds(r, c);
                    const env::SokobanCell cell = in ? room.at(r, c) : env::SokobanCell::Wall;
                    out.push_back(cell == env::SokobanCell::Wall ? 1.0 : 0.0);
                    out.push_back(env::sokoban::has_box(cell) ? 1.0 : 0.0);
                    out.push_back(env::sokoban::is_target_cell(cell) ? 1.0 : 0.0);
                }
            }
            out.push_back(detail::ratio(env::sokoban::boxes_on_target(room), room.num_boxes));
            out.push_back(static_cast<double>(room.steps_taken));
            for (int d = 0; d < 4; ++d) out.push_back(1.0);  // all directions admissible
            for (int d = 0; d < 4; ++d)
                out.push_back(detail::ratio(digest.dir_outcome_sum[d], digest.dir_tried[d]));
            break;
        }
    }
    return {out};
}

}  // namespace mage::policy
