#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mage/env/types.hpp"

namespace mage::adv {

enum class NormMode { MeanNorm, ZNorm };

inline const char* to_string(NormMode m) {
    return m == NormMode::MeanNorm ? "mean_norm" : "z_norm";
}

inline NormMode norm_mode_from_string(const std::string& s) {
    if (s == "mean_norm") return NormMode::MeanNorm;
    if (s == "z_norm") return NormMode::ZNorm;
    throw ConfigError("unknown normalization mode: " + s);
}

enum class Grouping { Stationary, NonStationary };

inline const char* to_string(Grouping g) {
    return g == Grouping::Stationary ? "stationary" : "non_stationary";
}

inline Grouping grouping_from_string(const std::string& s) {
    if (s == "stationary") return Grouping::Stationary;
    if (s == "non_stationary") return Grouping::NonStationary;
    throw ConfigError("unknown grouping: " + s);
}

enum class GroupScope { EpisodeLevel, StepGlobalAnchor, StepPerEpisodeAnchor };

inline const char* to_string(GroupScope s) {
    switch (s) {
        case GroupScope::EpisodeLevel: return "episode_level";
        case GroupScope::StepGlobalAnchor: return "global_anchor";
        case GroupScope::StepPerEpisodeAnchor: return "per_episode_anchor";
    }
    return "?";
}

inline GroupScope scope_from_string(const std::string& s) {
    if (s == "global_anchor" || s == "global") return GroupScope::StepGlobalAnchor;
    if (s == "per_episode_anchor" || s == "per_episode" || s == "local")
        return GroupScope::StepPerEpisodeAnchor;
    throw ConfigError("unknown anchor scope: " + s);
}

// ------------------------------------------------------------------ anchoring

namespace detail {

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace detail

/// Canonical serialization of a structured state for anchor hashing.
inline std::string anchor_payload(const env::StructuredState& state) {
    std::string payload;
    if (const auto* b = std::get_if<env::TicTacToeBoard>(&state)) {
        payload = "ttt:";
        for (env::Mark m : b->cells) payload += env::mark_char(m);
        payload += ':';
        payload += env::mark_char(b->to_move);
    } else if (const auto* v = std::get_if<env::KuhnView>(&state)) {
        // the information set: seat, own card, public history
        payload = "kuhn:";
        payload += std::to_string(v->seat);
        payload += ':';
        payload += env::card_char(v->card);
        payload += ':';
        payload += v->history;
    } else {
        const auto& room = std::get<env::SokobanRoom>(state);
        payload = "soko:" + std::to_string(room.size) + ":";
        for (env::SokobanCell c : room.grid) payload += static_cast<char>('0' + static_cast<int>(c));
    }
    return payload;
}

/// Stable 64-bit key of a structured observation. Equal states always agree;
/// distinct states collide with negligible probability.
inline std::uint64_t anchor_key(const env::StructuredState& state) {
    return detail::fnv1a(anchor_payload(state));
}

// ------------------------------------------------------------------- grouping

struct GroupKey {
    std::string opponent_id;                 // empty when pooled (non-stationary)
    std::optional<std::uint64_t> anchor;     // absent at episode level
    GroupScope scope = GroupScope::EpisodeLevel;
    std::optional<int> episode_index;        // only for StepPerEpisodeAnchor

    bool operator==(const GroupKey&) const = default;
    bool operator<(const GroupKey& o) const {
        return std::tie(opponent_id, anchor, scope, episode_index) <
               std::tie(o.opponent_id, o.anchor, o.scope, o.episode_index);
    }
};

struct AdvantageRecord {
    int meta_episode_id = 0;
    int episode_index = 0;  // n, 1-based
    int step = 0;           // t, 1-based
    std::string opponent_id;
    std::uint64_t anchor = 0;
    double raw_return = 0.0;
    GroupKey group;
    double advantage = 0.0;
};

/// Partitions records for step-level normalization. Stationary grouping keys
/// on the opponent id first; the non-stationary ablation pools across ids.
inline std::map<GroupKey, std::vector<std::size_t>> group_records(
    std::vector<AdvantageRecord>& records, Grouping grouping, GroupScope scope) {
    MAGE_REQUIRE(scope != GroupScope::EpisodeLevel,
                 "group_records: episode-level grouping is keyed per meta-episode");
    std::map<GroupKey, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        GroupKey key;
        key.opponent_id = grouping == Grouping::Stationary ? records[i].opponent_id : "";
        key.anchor = records[i].anchor;
        key.scope = scope;
        if (scope == GroupScope::StepPerEpisodeAnchor)
            key.episode_index = records[i].episode_index;
        records[i].group = key;
        groups[key].push_back(i);
    }
    return groups;
}

// -------------------------------------------------------------- normalization

namespace detail {

/// Neumaier-compensated sum; keeps the mean-zero invariant inside 1e-12.
inline double stable_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace detail

/// MeanNorm subtracts the group mean; ZNorm additionally divides by the
/// population standard deviation (floored at 1e-6). Singletons map to zero.
inline std::vector<double> normalize(const std::vector<double>& group, NormMode mode) {
    MAGE_REQUIRE(!group.empty(), "normalize: empty group");
    if (group.size() == 1) return {0.0};
    const double mean = detail::stable_sum(group) / static_cast<double>(group.size());
    std::vector<double> out(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) out[i] = group[i] - mean;
    if (mode == NormMode::ZNorm) {
        double var = 0.0;
        for (double d : out) var += d * d;
        var /= static_cast<double>(group.size());
        const double denom = std::max(std::sqrt(var), 1e-6);
        for (double& d : out) d /= denom;
    }
    return out;
}

/// Combined GiGPO-style advantage: episode-level plus weighted step-level.
inline std::vector<double> combine_advantages(const std::vector<double>& episode_level,
                                              const std::vector<double>& step_level,
                                              double step_weight) {
    MAGE_REQUIRE(episode_level.size() == step_level.size(),
                 "combine_advantages: component shapes differ");
    std::vector<double> out(episode_level.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = episode_level[i] + step_weight * step_level[i];
    return out;
}

/// Applies normalize() group by group, writing advantages back into records.
inline void normalize_groups(std::vector<AdvantageRecord>& records,
                             const std::map<GroupKey, std::vector<std::size_t>>& groups,
                             NormMode mode) {
    for (const auto& [key, members] : groups) {
        std::vector<double> raw(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) raw[i] = records[members[i]].raw_return;
        const std::vector<double> adv = normalize(raw, mode);
        for (std::size_t i = 0; i < members.size(); ++i) records[members[i]].advantage = adv[i];
    }
}

/// CSV dump of advantage records (the data behind the ablation plots).
inline std::string records_to_csv(const std::vector<AdvantageRecord>& records) {
    std::ostringstream out;
    out.precision(17);
    out << "meta_episode_id,episode_index,step,opponent_id,anchor_key,raw_return,advantage\n";
    for (const auto& r : records)
        out << r.meta_episode_id << ',' << r.episode_index << ',' << r.step << ','
            << r.opponent_id << ',' << r.anchor << ',' << r.raw_return << ',' << r.advantage
            << '\n';
    return out.str();
}

}  // namespace mage::adv
