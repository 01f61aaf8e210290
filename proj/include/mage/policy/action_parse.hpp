#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "mage/env/types.hpp"

namespace mage::policy {

namespace detail {

inline std::string lowercase(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Content of the last <action>...</action> block, case-insensitive tags.
inline std::optional<std::string> last_action_tag(const std::string& text) {
    const std::string lower = lowercase(text);
    const std::string open = "<action>", close = "</action>";
    std::size_t best = std::string::npos;
    for (std::size_t at = lower.find(open); at != std::string::npos;
         at = lower.find(open, at + 1))
        best = at;
    if (best == std::string::npos) return std::nullopt;
    const std::size_t start = best + open.size();
    const std::size_t end = lower.find(close, start);
    if (end == std::string::npos) return std::nullopt;
    return text.substr(start, end - start);
}

/// Last "(r, c)" digit pair anywhere in the text.
inline std::optional<env::TttMove> last_coordinate_pair(const std::string& text) {
    std::optional<env::TttMove> found;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '(') continue;
        std::size_t j = i + 1;
        auto skip_ws = [&] { while (j < text.size() && text[j] == ' ') ++j; };
        skip_ws();
        if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j]))) continue;
        long row = 0;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
            row = std::min<long>(row * 10 + (text[j++] - '0'), 1000);
        skip_ws();
        if (j >= text.size() || text[j] != ',') continue;
        ++j;
        skip_ws();
        if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j]))) continue;
        long col = 0;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
            col = std::min<long>(col * 10 + (text[j++] - '0'), 1000);
        skip_ws();
        if (j < text.size() && text[j] == ')')
            found = env::TttMove{static_cast<int>(row), static_cast<int>(col)};
    }
    return found;
}

/// Last standalone PASS or BET keyword (case-insensitive).
inline std::optional<env::KuhnAction> last_kuhn_keyword(const std::string& text) {
    const std::string lower = lowercase(text);
    std::optional<env::KuhnAction> found;
    for (std::size_t i = 0; i + 3 <= lower.size(); ++i) {
        if (lower.compare(i, 4, "pass") == 0) found = env::KuhnAction::Pass;
        else if (lower.compare(i, 3, "bet") == 0) found = env::KuhnAction::Bet;
    }
    return found;
}

/// Direction words in order of appearance, up to `max_moves`.
inline std::vector<env::Dir> direction_words(const std::string& text, int max_moves) {
    const std::string lower = lowercase(text);
    std::vector<std::pair<std::size_t, env::Dir>> hits;
    const std::pair<const char*, env::Dir> words[] = {
        {"up", env::Dir::Up}, {"down", env::Dir::Down},
        {"left", env::Dir::Left}, {"right", env::Dir::Right}};
    for (const auto& [word, dir] : words) {
        const std::string w = word;
        for (std::size_t at = lower.find(w); at != std::string::npos; at = lower.find(w, at + 1)) {
            // reject hits inside larger words ("update" contains "up")
            const bool left_ok = at == 0 || !std::isalpha(static_cast<unsigned char>(lower[at - 1]));
            const std::size_t end = at + w.size();
            const bool right_ok =
                end >= lower.size() || !std::isalpha(static_cast<unsigned char>(lower[end]));
            if (left_ok && right_ok) hits.emplace_back(at, dir);
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<env::Dir> out;
    for (const auto& [pos, dir] : hits) {
        out.push_back(dir);
        if (static_cast<int>(out.size()) >= max_moves) break;
    }
    return out;
}

}  // namespace detail

/// Parses an action from raw model output. Strict pass: the content of the
/// last <action> tag. Lenient fallback: the last coordinate pair / keyword /
/// direction words anywhere in the text. Total: never throws on text content;
/// returns nullopt when nothing parseable remains.
inline std::optional<env::Action> parse_action(env::EnvKind kind, const std::string& text,
                                               int max_moves = 3) {
    const std::optional<std::string> tagged = detail::last_action_tag(text);
    switch (kind) {
        case env::EnvKind::TicTacToe: {
            if (tagged)
                if (const auto m = detail::last_coordinate_pair(*tagged)) return env::Action{*m};
            if (const auto m = detail::last_coordinate_pair(text)) return env::Action{*m};
            return std::nullopt;
        }
        case env::EnvKind::KuhnPoker: {
            if (tagged)
                if (const auto a = detail::last_kuhn_keyword(*tagged)) return env::Action::kuhn(*a);
            if (const auto a = detail::last_kuhn_keyword(text)) return env::Action::kuhn(*a);
            return std::nullopt;
        }
        case env::EnvKind::Sokoban: {
            if (tagged) {
                const auto dirs = detail::direction_words(*tagged, max_moves);
                if (!dirs.empty()) return env::Action::sokoban(dirs);
            }
            const auto dirs = detail::direction_words(text, max_moves);
            if (!dirs.empty()) return env::Action::sokoban(dirs);
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace mage::policy
