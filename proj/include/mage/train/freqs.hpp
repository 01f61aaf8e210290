#pragma once

#include <map>
#include <sstream>
#include <tuple>

#include "mage/rollout/serialize.hpp"

namespace mage::train {

/// Aggregates (episode index, anchor state, action) visit counts: the raw
/// data behind the state-action manifold plots. Rendering is out of scope.
inline std::string state_action_frequencies_csv(const std::vector<rollout::ReplayStep>& steps) {
    std::map<std::tuple<int, std::uint64_t, std::string>, int> counts;
    for (const auto& s : steps) ++counts[{s.episode_index, s.anchor, s.action}];
    std::ostringstream out;
    out << "episode_index,anchor_key,action,frequency\n";
    for (const auto& [key, count] : counts)
        out << std::get<0>(key) << ',' << std::get<1>(key) << ",\"" << std::get<2>(key) << "\","
            << count << '\n';
    return out.str();
}

inline std::vector<rollout::ReplayStep> replay_steps_of(
    const std::vector<rollout::MetaEpisode>& metas) {
    std::vector<rollout::ReplayStep> steps;
    for (const auto& meta : metas)
        for (const auto& ep : meta.episodes)
            for (const auto& s : ep.steps)
                steps.push_back({ep.episode_index, adv::anchor_key(s.obs.structured),
                                 env::to_string(s.action)});
    return steps;
}

}  // namespace mage::train
