#pragma once

#include <map>

#include "mage/opponents/best_response.hpp"
#include "mage/opponents/pool.hpp"
#include "mage/train/config.hpp"

namespace mage::train {

struct CeilingResult {
    double success_rate = 0.0;
    bool exact = true;  // false for sampled estimates (MCTS opponents)
};

namespace detail {

/// Exact best-response success probability against a fixed Tic-Tac-Toe
/// opponent given as a move distribution. Expectiminimax over the agent's
/// win indicator with memoization.
class TttCeiling {
public:
    using MoveDist = std::function<std::vector<std::pair<env::TttMove, double>>(
        const env::TicTacToeBoard&)>;

    TttCeiling(MoveDist opponent, env::Mark agent_mark)
        : opponent_(std::move(opponent)), agent_(agent_mark) {}

    double value(const env::TicTacToeBoard& board) {
        if (const auto w = env::ttt::winner(board)) return *w == agent_ ? 1.0 : 0.0;
        if (env::ttt::is_full(board)) return 0.0;  // draws do not count as success
        const int key = env::ttt::encode(board);
        if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
        double v;
        if (board.to_move == agent_) {
            v = 0.0;
            for (const auto& m : env::ttt::legal_moves(board)) {
                env::TicTacToeBoard child = board;
                env::ttt::apply(child, m);
                v = std::max(v, value(child));
            }
        } else {
            v = 0.0;
            for (const auto& [move, p] : opponent_(board)) {
                env::TicTacToeBoard child = board;
                env::ttt::apply(child, move);
                v += p * value(child);
            }
        }
        memo_[key] = v;
        return v;
    }

private:
    MoveDist opponent_;
    env::Mark agent_;
    std::map<int, double> memo_;
};

/// Sampled move distribution of an MCTS opponent: `samples` seeded runs per
/// distinct board. Deterministic in the seed, flagged as an estimate.
inline TttCeiling::MoveDist mcts_move_dist(int num_simulations, int samples, std::uint64_t seed) {
    auto cache = std::make_shared<std::map<int, std::vector<std::pair<env::TttMove, double>>>>();
    return [num_simulations, samples, seed, cache](const env::TicTacToeBoard& board) {
        const int key = env::ttt::encode(board);
        if (const auto it = cache->find(key); it != cache->end()) return it->second;
        std::map<std::pair<int, int>, int> counts;
        for (int s = 0; s < samples; ++s) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(key), s));
            const auto move = opp::mcts_select(board, num_simulations, rng);
            ++counts[{move.row, move.col}];
        }
        std::vector<std::pair<env::TttMove, double>> dist;
        for (const auto& [rc, c] : counts)
            dist.push_back({env::TttMove{rc.first, rc.second},
                            static_cast<double>(c) / samples});
        (*cache)[key] = dist;
        return dist;
    };
}

}  // namespace detail

inline env::TicTacToeBoard initial_board(const RunConfig& cfg) {
    env::TicTacToeBoard b;
    b.to_move = cfg.env.agent_moves_first ? cfg.env.agent_mark
                                          : env::other_mark(cfg.env.agent_mark);
    return b;
}

/// Exact best-response success probability against a fully specified fixed
/// opponent; Monte Carlo estimate for tree-search opponents.
inline CeilingResult theoretical_ceiling(const RunConfig& cfg, const opp::OpponentSpec& spec) {
    switch (spec.archetype) {
        case opp::Archetype::KuhnConservative:
        case opp::Archetype::KuhnAggressive:
        case opp::Archetype::KuhnIntermediate:
        case opp::Archetype::RandomKuhn:
        case opp::Archetype::KuhnCFR: {
            const auto behavior = opp::kuhn_behavior_of(spec, cfg.archetype_params);
            switch (cfg.env.seat_mode) {
                case env::KuhnSeatMode::Fixed0:
                    return {opp::best_response(behavior, 0, opp::BrUtility::WinProb).value, true};
                case env::KuhnSeatMode::Fixed1:
                    return {opp::best_response(behavior, 1, opp::BrUtility::WinProb).value, true};
                default: return {opp::kuhn_win_prob_ceiling(behavior), true};
            }
        }
        case opp::Archetype::PreferredPattern: {
            detail::TttCeiling solver(
                [ordering = spec.param](const env::TicTacToeBoard& b) {
                    return std::vector<std::pair<env::TttMove, double>>{
                        {opp::preferred_pattern_act(ordering, b), 1.0}};
                },
                cfg.env.agent_mark);
            return {solver.value(initial_board(cfg)), true};
        }
        case opp::Archetype::RandomTTT: {
            detail::TttCeiling solver(
                [](const env::TicTacToeBoard& b) {
                    const auto moves = env::ttt::legal_moves(b);
                    std::vector<std::pair<env::TttMove, double>> dist;
                    for (const auto& m : moves)
                        dist.push_back({m, 1.0 / static_cast<double>(moves.size())});
                    return dist;
                },
                cfg.env.agent_mark);
            return {solver.value(initial_board(cfg)), true};
        }
        case opp::Archetype::MctsTTT: {
            detail::TttCeiling solver(
                detail::mcts_move_dist(spec.param > 0 ? spec.param : 100, 3, cfg.seed),
                cfg.env.agent_mark);
            return {solver.value(initial_board(cfg)), false};
        }
        case opp::Archetype::None:
            // generated rooms are certified solvable within the move budget
            return {1.0, true};
    }
    throw ConfigError("theoretical_ceiling: unknown archetype");
}

}  // namespace mage::train
