#pragma once

#include <vector>

#include "mage/train/trainer.hpp"

namespace mage::train {

struct EvaluationResult {
    std::vector<MetricsRow> rows;                      // one per opponent
    std::vector<rollout::MetaEpisode> meta_episodes;   // kept when requested
};

/// Pure rollout without updates: per-episode-index success, Pass@k, result
/// splits and a Wilson CI per opponent. OOD evaluation is the same call with
/// unseen opponent specs or shifted environment parameters.
inline EvaluationResult evaluate(rollout::Policy& policy,
                                 const std::vector<opp::OpponentSpec>& opponents,
                                 int num_meta_episodes, const RunConfig& cfg,
                                 std::uint64_t seed, bool keep_meta_episodes = false) {
    EvaluationResult result;
    const rollout::RolloutOptions opts = rollout_options(cfg);
    for (std::size_t o = 0; o < opponents.size(); ++o) {
        std::vector<opp::OpponentSpec> specs(static_cast<std::size_t>(num_meta_episodes),
                                             opponents[o]);
        auto metas = rollout_batch(policy, specs, cfg.env, opts,
                                   derive_seed(seed, 0xe7a1, o), 0, cfg.threads);
        std::vector<reward::MetaRewardVector> rewards;
        for (const auto& meta : metas) rewards.push_back(batch_rewards_for(meta, cfg));

        std::vector<const rollout::MetaEpisode*> meta_ptrs;
        std::vector<const reward::MetaRewardVector*> reward_ptrs;
        for (std::size_t i = 0; i < metas.size(); ++i) {
            meta_ptrs.push_back(&metas[i]);
            reward_ptrs.push_back(&rewards[i]);
        }
        result.rows.push_back(summarize(0, opponents[o].id(), meta_ptrs, reward_ptrs,
                                        cfg.num_episodes, 0.0));
        if (keep_meta_episodes)
            for (auto& m : metas) result.meta_episodes.push_back(std::move(m));
    }
    return result;
}

}  // namespace mage::train
