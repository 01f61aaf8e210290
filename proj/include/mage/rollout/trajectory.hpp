#pragma once

#include <string>
#include <vector>

#include "mage/env/types.hpp"

namespace mage::rollout {

/// One agent decision point: the observation the policy saw, the action it
/// took, and the sparse reward attached to that step. Opponent moves are
/// folded into the observations; only agent decisions appear here.
struct StepRecord {
    env::Observation obs;
    env::Action action;
    double reward = 0.0;          // 0 except possibly at the final step
    bool invalid = false;         // rejected by the env or substituted after a parse failure
    int response_length = 0;      // remote policies only
    double log_prob = 0.0;        // parametric policies only (diagnostic)

    bool operator==(const StepRecord&) const = default;
};

struct EpisodeTrajectory {
    int episode_index = 0;  // n, 1-based
    std::vector<StepRecord> steps;
    env::Observation final_obs;   // terminal observation (carries showdown reveals)
    env::GameResult outcome = env::GameResult::Ongoing;
    int invalid_count = 0;
    std::vector<int> response_lengths;  // empty for parametric policies

    bool operator==(const EpisodeTrajectory&) const = default;
};

inline int outcome_sign(env::GameResult r) {
    if (r == env::GameResult::Win) return 1;
    if (r == env::GameResult::Loss) return -1;
    return 0;
}

}  // namespace mage::rollout
