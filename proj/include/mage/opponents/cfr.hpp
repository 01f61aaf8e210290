#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mage/env/kuhn.hpp"
#include "mage/opponents/kuhn_archetypes.hpp"

namespace mage::opp {

struct CfrStrategyProfile {
    KuhnBehavior behavior;       // average strategy
    int iterations_trained = 0;
    double exploitability_chips = 0.0;  // filled by the trainer, >= 0
};

/// Vanilla counterfactual regret minimization over the Kuhn tree with regret
/// matching and alternating updates. The full tree (all 6 deals) is traversed
/// every iteration; no sampling.
class CfrTrainer {
public:
    void run(int iterations) {
        MAGE_REQUIRE(iterations >= 1, "cfr: iterations must be >= 1");
        const auto deals = env::kuhn::all_deals();
        for (int it = 0; it < iterations; ++it) {
            for (int update_player = 0; update_player < 2; ++update_player) {
                for (const auto& deal : deals)
                    traverse(deal, "", 1.0, 1.0, 1.0 / deals.size(), update_player);
            }
            ++iterations_done_;
        }
    }

    int iterations_done() const { return iterations_done_; }

    /// Reach-weighted average strategy; uniform where an info set was never
    /// visited with positive reach.
    KuhnBehavior average() const {
        KuhnBehavior b;
        for (const auto& key : env::kuhn::all_info_keys()) {
            const auto it = nodes_.find(key);
            if (it == nodes_.end()) {
                b.bet_prob[key] = 0.5;
                continue;
            }
            const double total = it->second.strategy_sum[0] + it->second.strategy_sum[1];
            b.bet_prob[key] = total > 0.0 ? it->second.strategy_sum[1] / total : 0.5;
        }
        return b;
    }

private:
    struct Node {
        std::array<double, 2> regret_sum{0.0, 0.0};    // [pass, bet]
        std::array<double, 2> strategy_sum{0.0, 0.0};
    };

    static std::array<double, 2> regret_matching(const Node& node) {
        const double rp = node.regret_sum[0] > 0.0 ? node.regret_sum[0] : 0.0;
        const double rb = node.regret_sum[1] > 0.0 ? node.regret_sum[1] : 0.0;
        const double total = rp + rb;
        if (total <= 0.0) return {0.5, 0.5};
        return {rp / total, rb / total};
    }

    /// Returns the expected utility for player 0 under the current strategies.
    double traverse(const std::array<env::KuhnCard, 2>& cards, const std::string& history,
                    double reach0, double reach1, double chance, int update_player) {
        if (env::kuhn::is_terminal_history(history))
            return env::kuhn::payoff_p0(cards, history);
        const int player = env::kuhn::player_to_act(history);
        Node& node = nodes_[env::kuhn::info_key(cards[player], history)];
        const auto strategy = regret_matching(node);

        std::array<double, 2> action_util{};  // utility for player 0
        double node_util = 0.0;
        for (int a = 0; a < 2; ++a) {
            const std::string next = history + (a == 0 ? 'p' : 'b');
            action_util[a] =
                traverse(cards, next, player == 0 ? reach0 * strategy[a] : reach0,
                         player == 1 ? reach1 * strategy[a] : reach1, chance, update_player);
            node_util += strategy[a] * action_util[a];
        }
        if (player == update_player) {
            const double sign = player == 0 ? 1.0 : -1.0;
            const double my_reach = player == 0 ? reach0 : reach1;
            const double opp_reach = (player == 0 ? reach1 : reach0) * chance;
            for (int a = 0; a < 2; ++a)
                node.regret_sum[a] += opp_reach * sign * (action_util[a] - node_util);
            for (int a = 0; a < 2; ++a)
                node.strategy_sum[a] += my_reach * strategy[a];
        }
        return node_util;
    }

    std::map<std::string, Node> nodes_;
    int iterations_done_ = 0;
};

/// Expected chips for player 0 when seat 0 plays `b0` and seat 1 plays `b1`,
/// averaged over all deals.
inline double kuhn_expected_value_p0(const KuhnBehavior& b0, const KuhnBehavior& b1) {
    const auto deals = env::kuhn::all_deals();
    struct Walker {
        const KuhnBehavior& b0;
        const KuhnBehavior& b1;
        double walk(const std::array<env::KuhnCard, 2>& cards, const std::string& h) const {
            if (env::kuhn::is_terminal_history(h)) return env::kuhn::payoff_p0(cards, h);
            const int player = env::kuhn::player_to_act(h);
            const double p_bet =
                (player == 0 ? b0 : b1).p_bet(env::kuhn::info_key(cards[player], h));
            return (1.0 - p_bet) * walk(cards, h + 'p') + p_bet * walk(cards, h + 'b');
        }
    } walker{b0, b1};
    double total = 0.0;
    for (const auto& deal : deals) total += walker.walk(deal, "");
    return total / static_cast<double>(deals.size());
}

// ---------------------------------------------------------- text serialization

/// One line per info set: `key p_pass p_bet`. Comment lines carry metadata.
inline std::string profile_to_text(const CfrStrategyProfile& profile) {
    std::ostringstream out;
    out.precision(17);
    out << "# kuhn strategy profile\n";
    out << "# iterations " << profile.iterations_trained << "\n";
    out << "# exploitability " << profile.exploitability_chips << "\n";
    for (const auto& key : env::kuhn::all_info_keys()) {
        const double pb = profile.behavior.p_bet(key);
        out << key << " " << 1.0 - pb << " " << pb << "\n";
    }
    return out.str();
}

inline CfrStrategyProfile profile_from_text(const std::string& text) {
    CfrStrategyProfile profile;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string field;
            meta >> field;
            if (field == "iterations") meta >> profile.iterations_trained;
            else if (field == "exploitability") meta >> profile.exploitability_chips;
            continue;
        }
        std::istringstream row(line);
        std::string key;
        double p_pass = 0.0, p_bet = 0.0;
        row >> key >> p_pass >> p_bet;
        if (key.empty() || row.fail()) throw ConfigError("profile parse: bad line: " + line);
        if (std::abs(p_pass + p_bet - 1.0) > 1e-9)
            throw ConfigError("profile parse: probabilities do not sum to 1: " + line);
        profile.behavior.bet_prob[key] = p_bet;
    }
    for (const auto& key : env::kuhn::all_info_keys())
        if (!profile.behavior.bet_prob.count(key))
            throw ConfigError("profile parse: missing info set " + key);
    return profile;
}

inline void profile_save(const CfrStrategyProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("profile save: cannot open " + path);
    out << profile_to_text(profile);
}

inline CfrStrategyProfile profile_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("profile load: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return profile_from_text(buf.str());
}

}  // namespace mage::opp
