#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mage/common/rng.hpp"
#include "mage/env/tictactoe.hpp"

namespace mage::opp {

/// UCT over the Tic-Tac-Toe game tree. The tree is rebuilt on every call;
/// rollouts are uniform random; rewards are win=1 / draw=0.5 / loss=0. The
/// returned move is the root child with the highest visit count (row-major
/// tie-break, so the choice is deterministic given the rng stream).
inline env::TttMove mcts_select(const env::TicTacToeBoard& board, int num_simulations, Rng& rng,
                                double exploration = 1.4142135623730951) {
    MAGE_REQUIRE(!env::ttt::is_terminal(board), "mcts: board is terminal");
    MAGE_REQUIRE(num_simulations >= 1, "mcts: need at least one simulation");

    struct Node {
        env::TicTacToeBoard state;
        int parent = -1;
        env::TttMove move{};              // edge from parent
        std::vector<int> children;
        std::vector<env::TttMove> untried;
        int visits = 0;
        double value_sum = 0.0;           // from the perspective of the mover at `parent`
    };

    std::vector<Node> nodes;
    nodes.push_back({board, -1, {}, {}, env::ttt::legal_moves(board)});

    // value of a terminal board for `perspective`
    auto terminal_value = [](const env::TicTacToeBoard& b, env::Mark perspective) {
        if (const auto w = env::ttt::winner(b)) return *w == perspective ? 1.0 : 0.0;
        return 0.5;
    };

    for (int sim = 0; sim < num_simulations; ++sim) {
        // selection
        int at = 0;
        while (nodes[at].untried.empty() && !nodes[at].children.empty()) {
            const double log_n = std::log(static_cast<double>(nodes[at].visits));
            double best = -std::numeric_limits<double>::infinity();
            int pick = -1;
            for (int child : nodes[at].children) {
                const Node& c = nodes[child];
                const double uct = c.value_sum / c.visits +
                                   exploration * std::sqrt(log_n / c.visits);
                if (uct > best) {
                    best = uct;
                    pick = child;
                }
            }
            at = pick;
        }

        // expansion
        if (!nodes[at].untried.empty() && !env::ttt::is_terminal(nodes[at].state)) {
            const int idx = rng.next_index(static_cast<int>(nodes[at].untried.size()));
            const env::TttMove move = nodes[at].untried[idx];
            nodes[at].untried.erase(nodes[at].untried.begin() + idx);
            env::TicTacToeBoard child_state = nodes[at].state;
            env::ttt::apply(child_state, move);
            nodes.push_back({child_state, at, move, {},
                             env::ttt::is_terminal(child_state)
                                 ? std::vector<env::TttMove>{}
                                 : env::ttt::legal_moves(child_state)});
            nodes[at].children.push_back(static_cast<int>(nodes.size()) - 1);
            at = static_cast<int>(nodes.size()) - 1;
        }

        // rollout with uniform random play
        env::TicTacToeBoard playout = nodes[at].state;
        while (!env::ttt::is_terminal(playout)) {
            const auto moves = env::ttt::legal_moves(playout);
            env::ttt::apply(playout, moves[rng.next_index(static_cast<int>(moves.size()))]);
        }

        // backpropagation: each edge is scored for the player who chose it
        for (int node = at; node != -1; node = nodes[node].parent) {
            nodes[node].visits += 1;
            if (nodes[node].parent != -1) {
                const env::Mark chooser = nodes[nodes[node].parent].state.to_move;
                nodes[node].value_sum += terminal_value(playout, chooser);
            }
        }
    }

    int best_visits = -1;
    env::TttMove best_move = nodes[0].untried.empty() && !nodes[0].children.empty()
                                 ? nodes[nodes[0].children[0]].move
                                 : env::ttt::legal_moves(board)[0];
    for (int child : nodes[0].children) {
        if (nodes[child].visits > best_visits) {
            best_visits = nodes[child].visits;
            best_move = nodes[child].move;
        }
    }
    return best_move;
}

}  // namespace mage::opp
