#pragma once

#include <array>
#include <string>
#include <vector>

#include "mage/env/types.hpp"

namespace mage::env::kuhn {

/// Terminal betting lines: pp, bp, bb, pbp, pbb.
inline bool is_terminal_history(const std::string& h) {
    return h == "pp" || h == "bp" || h == "bb" || h == "pbp" || h == "pbb";
}

inline bool is_valid_history(const std::string& h) {
    static const std::vector<std::string> lines = {"pp", "pbp", "pbb", "bp", "bb"};
    for (const auto& line : lines)
        if (line.compare(0, h.size(), h) == 0) return true;
    return false;
}

inline int player_to_act(const std::string& h) { return static_cast<int>(h.size()) % 2; }

/// Chips each player has committed after `h` (1-chip ante plus bets/calls).
inline std::array<int, 2> contributions(const std::string& h) {
    std::array<int, 2> chips{1, 1};
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h[i] == 'b') chips[i % 2] = 2;
    return chips;
}

/// Net chips won by player 0 at a terminal history.
/// pp: 1-chip showdown; bp/pbp: the bettor takes the pot; bb/pbb: 2-chip showdown.
inline int payoff_p0(const std::array<KuhnCard, 2>& cards, const std::string& h) {
    MAGE_REQUIRE(is_terminal_history(h), "kuhn payoff: history not terminal: " + h);
    const int showdown = cards[0] > cards[1] ? 1 : -1;
    if (h == "pp") return showdown;
    if (h == "bp") return 1;    // player 0 bet, player 1 folded
    if (h == "pbp") return -1;  // player 1 bet, player 0 folded
    return 2 * showdown;        // bb or pbb
}

/// All 6 ordered deals of distinct cards from {J, Q, K}.
inline std::vector<std::array<KuhnCard, 2>> all_deals() {
    std::vector<std::array<KuhnCard, 2>> deals;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b)
                deals.push_back({static_cast<KuhnCard>(a), static_cast<KuhnCard>(b)});
    return deals;
}

inline const std::vector<std::string>& terminal_histories() {
    static const std::vector<std::string> t = {"pp", "bp", "bb", "pbp", "pbb"};
    return t;
}

/// Information-set key for the player to act: own card + public history,
/// e.g. "Q", "Qb", "Qp", "Qpb". Kuhn has exactly 12 such sets.
inline std::string info_key(KuhnCard card, const std::string& history) {
    return std::string(1, card_char(card)) + history;
}

inline const std::vector<std::string>& all_info_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (char c : {'J', 'Q', 'K'})
            for (const char* h : {"", "p", "b", "pb"}) out.push_back(std::string(1, c) + h);
        return out;
    }();
    return keys;
}

inline std::string render_history_upper(const std::string& h) {
    std::string out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) out += ", ";
        out += h[i] == 'p' ? "PASS" : "BET";
    }
    return out.empty() ? "(none)" : out;
}

/// Textual observation for one seat: own card and public history only.
inline std::string render_view(const KuhnView& v) {
    std::string out = "You are Player " + std::to_string(v.seat) + ". Your card: ";
    out += card_char(v.card);
    out += ". Betting history: " + render_history_upper(v.history) + ".";
    if (v.revealed_opponent_card)
        out += std::string(" Showdown: opponent card was ") + card_char(*v.revealed_opponent_card) + ".";
    return out;
}

}  // namespace mage::env::kuhn
