#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mage/advantage/advantage.hpp"
#include "mage/reward/reward.hpp"
#include "mage/rollout/meta_rollout.hpp"

namespace mage::rollout {

using nlohmann::json;

namespace detail {

inline json digest_to_json(const DigestStats& stats) {
    json out;
    if (const auto* k = std::get_if<KuhnDigest>(&stats)) {
        out["kind"] = "kuhn";
        out["outcome_sum"] = k->outcome_sum;
        out["tried"] = k->tried;
        out["coarse_outcome_sum"] = k->coarse_outcome_sum;
        out["coarse_tried"] = k->coarse_tried;
        out["opp_actions"] = k->opp_actions;
        out["opp_bets"] = k->opp_bets;
        out["opp_faced_bet"] = k->opp_faced_bet;
        out["opp_folds"] = k->opp_folds;
    } else if (const auto* t = std::get_if<TttDigest>(&stats)) {
        out["kind"] = "ttt";
        out["cell_outcome_sum"] = t->cell_outcome_sum;
        out["cell_tried"] = t->cell_tried;
        out["opp_move_hist"] = t->opp_move_hist;
        out["opp_first_cell"] = t->opp_first_cell;
        out["missed_blocks"] = t->missed_blocks;
        if (t->first_missed_block_cell) out["first_missed_block_cell"] = *t->first_missed_block_cell;
        json anchors = json::array();
        for (const auto& [anchor, sums] : t->anchor_outcome_sum) {
            anchors.push_back({{"anchor", anchor},
                               {"outcome_sum", sums},
                               {"tried", t->anchor_tried.at(anchor)}});
        }
        out["anchors"] = anchors;
    } else if (const auto* s = std::get_if<SokobanDigest>(&stats)) {
        out["kind"] = "sokoban";
        out["dir_outcome_sum"] = s->dir_outcome_sum;
        out["dir_tried"] = s->dir_tried;
        out["dir_blocked"] = s->dir_blocked;
        out["deadlocks"] = s->deadlocks;
        out["best_boxes_on_target"] = s->best_boxes_on_target;
    } else {
        out["kind"] = "empty";
    }
    return out;
}

}  // namespace detail

/// One meta-episode per JSON object (one line in the JSONL file): opponent
/// id, per-episode steps with anchors and rewards, and the reflection memory.
inline json meta_episode_to_json(const MetaEpisode& meta,
                                 const reward::MetaRewardVector* rewards = nullptr) {
    json out;
    out["opponent_id"] = meta.opponent.id();
    out["opponent_param"] = meta.opponent.param;
    out["opponent_seed"] = meta.opponent.seed;
    out["seed"] = meta.seed;
    json episodes = json::array();
    for (const auto& ep : meta.episodes) {
        json e;
        e["episode_index"] = ep.episode_index;
        e["outcome"] = env::to_string(ep.outcome);
        e["invalid_count"] = ep.invalid_count;
        e["response_lengths"] = ep.response_lengths;
        json steps = json::array();
        for (const auto& s : ep.steps) {
            steps.push_back({{"obs", s.obs.text},
                             {"anchor", adv::anchor_key(s.obs.structured)},
                             {"turn", s.obs.turn_index},
                             {"action", env::to_string(s.action)},
                             {"reward", s.reward},
                             {"invalid", s.invalid},
                             {"log_prob", s.log_prob}});
        }
        e["steps"] = steps;
        e["final_obs"] = ep.final_obs.text;
        episodes.push_back(e);
    }
    out["episodes"] = episodes;
    json reflections = json::array();
    for (const auto& r : meta.memory.items) {
        reflections.push_back({{"episode_index", r.episode_index},
                               {"text", r.text},
                               {"outcome", env::to_string(r.outcome)},
                               {"invalid_count", r.invalid_count},
                               {"features", detail::digest_to_json(r.features)}});
    }
    out["reflections"] = reflections;
    if (rewards) {
        out["episode_returns"] = rewards->episode_returns;
        out["meta_rewards"] = rewards->meta_rewards;
        out["step_returns"] = rewards->step_returns;
    }
    return out;
}

inline void write_jsonl(std::ostream& out, const std::vector<MetaEpisode>& metas) {
    for (const auto& m : metas) out << meta_episode_to_json(m).dump() << "\n";
}

/// Minimal replay view used by the frequency exporter.
struct ReplayStep {
    int episode_index = 0;
    std::uint64_t anchor = 0;
    std::string action;
};

inline std::vector<ReplayStep> read_jsonl_steps(std::istream& in) {
    std::vector<ReplayStep> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        for (const auto& ep : j.at("episodes")) {
            const int n = ep.at("episode_index").get<int>();
            for (const auto& s : ep.at("steps")) {
                out.push_back({n, s.at("anchor").get<std::uint64_t>(),
                               s.at("action").get<std::string>()});
            }
        }
    }
    return out;
}

}  // namespace mage::rollout
