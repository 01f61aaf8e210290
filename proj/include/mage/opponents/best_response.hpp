#pragma once

#include <array>
#include <string>
#include <vector>

#include "mage/opponents/cfr.hpp"
#include "mage/opponents/kuhn_archetypes.hpp"

namespace mage::opp {

enum class BrUtility { Chips, WinProb };

struct BestResponseResult {
    double value = 0.0;       // expected utility per hand for the best responder
    KuhnBehavior strategy;    // a pure best response (probabilities 0/1)
};

namespace detail {

inline double br_utility(int payoff_for_br, BrUtility util) {
    if (util == BrUtility::Chips) return static_cast<double>(payoff_for_br);
    return payoff_for_br > 0 ? 1.0 : 0.0;  // Kuhn hands have no ties
}

struct BrContext {
    const KuhnBehavior& opponent;
    int br_seat;
    BrUtility util;
    KuhnBehavior br;  // filled as decisions are made (later histories first)

    /// Expected utility for the best responder of continuing from (deal, h)
    /// with the opponent's behavior and the already-decided BR actions.
    double walk(const std::array<env::KuhnCard, 2>& cards, const std::string& h) const {
        if (env::kuhn::is_terminal_history(h)) {
            const int p0 = env::kuhn::payoff_p0(cards, h);
            return br_utility(br_seat == 0 ? p0 : -p0, util);
        }
        const int player = env::kuhn::player_to_act(h);
        const auto& behavior = player == br_seat ? br : opponent;
        const double p_bet = behavior.p_bet(env::kuhn::info_key(cards[player], h));
        return (1.0 - p_bet) * walk(cards, h + 'p') + p_bet * walk(cards, h + 'b');
    }

    /// Probability weight of reaching (deal, h): chance times the opponent's
    /// action probabilities along h. The BR player's own actions contribute
    /// no factor (counterfactual reach).
    double opp_reach(const std::array<env::KuhnCard, 2>& cards, const std::string& h) const {
        double reach = 1.0 / 6.0;
        std::string prefix;
        for (char token : h) {
            const int player = env::kuhn::player_to_act(prefix);
            if (player != br_seat) {
                const double p_bet = opponent.p_bet(env::kuhn::info_key(cards[player], prefix));
                reach *= token == 'b' ? p_bet : 1.0 - p_bet;
            }
            prefix += token;
        }
        return reach;
    }
};

}  // namespace detail

/// Exact expectimax best response for one seat against a fixed behavioral
/// strategy. Decisions are resolved per information set, deepest history
/// first, weighting deals by opponent-and-chance reach.
inline BestResponseResult best_response(const KuhnBehavior& opponent, int br_seat,
                                        BrUtility util = BrUtility::Chips) {
    detail::BrContext ctx{opponent, br_seat, util, {}};
    // initialize own decisions to PASS; overwritten below in order
    for (const auto& key : env::kuhn::all_info_keys()) ctx.br.bet_prob[key] = 0.0;

    // BR decision histories for each seat, deepest first so continuations are
    // already resolved when shallower decisions are evaluated
    const std::vector<std::string> histories =
        br_seat == 0 ? std::vector<std::string>{"pb", ""} : std::vector<std::string>{"p", "b"};
    for (const auto& h : histories) {
        for (int card = 0; card < 3; ++card) {
            const auto c = static_cast<env::KuhnCard>(card);
            const std::string key = env::kuhn::info_key(c, h);
            std::array<double, 2> action_value{0.0, 0.0};
            for (const auto& deal : env::kuhn::all_deals()) {
                if (deal[br_seat] != c) continue;
                const double w = ctx.opp_reach(deal, h);
                if (w == 0.0) continue;
                action_value[0] += w * ctx.walk(deal, h + 'p');
                action_value[1] += w * ctx.walk(deal, h + 'b');
            }
            ctx.br.bet_prob[key] = action_value[1] > action_value[0] ? 1.0 : 0.0;
        }
    }

    double value = 0.0;
    for (const auto& deal : env::kuhn::all_deals()) value += ctx.walk(deal, "") / 6.0;
    return {value, ctx.br};
}

/// Average of the two seats' best-response values in chips per hand.
/// Non-negative, and zero exactly at a Nash equilibrium.
inline double exploitability(const KuhnBehavior& profile) {
    const double br_as_p0 = best_response(profile, 0, BrUtility::Chips).value;
    const double br_as_p1 = best_response(profile, 1, BrUtility::Chips).value;
    return (br_as_p0 + br_as_p1) / 2.0;
}

inline double exploitability(const CfrStrategyProfile& profile) {
    return exploitability(profile.behavior);
}

/// Trains a vanilla CFR profile and stamps it with its exploitability.
inline CfrStrategyProfile cfr_train(int iterations) {
    CfrTrainer trainer;
    trainer.run(iterations);
    CfrStrategyProfile profile;
    profile.behavior = trainer.average();
    profile.iterations_trained = iterations;
    profile.exploitability_chips = exploitability(profile.behavior);
    return profile;
}

/// Exact best-response success probability against a fixed Kuhn opponent,
/// averaged over the two seats (seats are drawn uniformly per episode).
inline double kuhn_win_prob_ceiling(const KuhnBehavior& opponent) {
    const double as_p0 = best_response(opponent, 0, BrUtility::WinProb).value;
    const double as_p1 = best_response(opponent, 1, BrUtility::WinProb).value;
    return (as_p0 + as_p1) / 2.0;
}

}  // namespace mage::opp
