#pragma once

#include <map>
#include <string>

#include "mage/common/rng.hpp"
#include "mage/env/kuhn.hpp"

namespace mage::opp {

/// Mixed behavioral strategy over the 12 Kuhn information sets:
/// info key ("Q", "Qb", "Qp", "Qpb") -> probability of BET.
struct KuhnBehavior {
    std::map<std::string, double> bet_prob;

    double p_bet(const std::string& info_key) const {
        const auto it = bet_prob.find(info_key);
        MAGE_REQUIRE(it != bet_prob.end(), "kuhn behavior: unknown info set " + info_key);
        return it->second;
    }
};

enum class KuhnStyle { Conservative, Aggressive, Intermediate, Random };

/// Archetype parameters. The paper names the three styles without numbers;
/// these defaults span the tight/loose spectrum and are config-overridable.
struct KuhnArchetypeParams {
    // probability of betting (not facing a bet), per card J/Q/K
    std::array<double, 3> open_bet{0.25, 0.5, 1.0};
    // probability of calling a bet, per card J/Q/K
    std::array<double, 3> call_bet{0.0, 0.5, 1.0};
};

inline KuhnBehavior kuhn_style_behavior(KuhnStyle style,
                                        const KuhnArchetypeParams& intermediate = {}) {
    KuhnBehavior b;
    for (const auto& key : env::kuhn::all_info_keys()) {
        const int card = key[0] == 'J' ? 0 : (key[0] == 'Q' ? 1 : 2);
        const std::string hist = key.substr(1);
        const bool facing_bet = !hist.empty() && hist.back() == 'b';
        double p = 0.0;
        switch (style) {
            case KuhnStyle::Conservative: p = card == 2 ? 1.0 : 0.0; break;
            case KuhnStyle::Aggressive: p = 1.0; break;
            case KuhnStyle::Intermediate:
                p = facing_bet ? intermediate.call_bet[card] : intermediate.open_bet[card];
                break;
            case KuhnStyle::Random: p = 0.5; break;
        }
        b.bet_prob[key] = p;
    }
    return b;
}

/// Plays one decision of a behavioral strategy. Deterministic probabilities
/// (0 or 1) consume no rng draw; mixed ones consume exactly one.
inline env::KuhnAction act_behavior(const KuhnBehavior& behavior, const env::KuhnView& view,
                                    Rng& rng) {
    const double p = behavior.p_bet(env::kuhn::info_key(view.card, view.history));
    if (p <= 0.0) return env::KuhnAction::Pass;
    if (p >= 1.0) return env::KuhnAction::Bet;
    return rng.next_bernoulli(p) ? env::KuhnAction::Bet : env::KuhnAction::Pass;
}

}  // namespace mage::opp
