#pragma once

#include <string>
#include <vector>

#include "mage/rollout/reflection.hpp"

namespace mage::rollout {

/// Everything the policy conditions on: the task description, the contextual
/// memory of reflections, the current episode's state history up to now, and
/// the admissible actions. Never carries the opponent's identity.
struct PolicyContext {
    env::EnvKind env_kind = env::EnvKind::TicTacToe;
    std::string task;
    const ContextMemory* memory = nullptr;
    std::vector<env::Observation> history;  // s_{n,1:t}, current episode only
    std::vector<env::Action> past_actions;  // the agent's own actions this episode
    std::vector<env::Action> admissible;
    int episode_index = 1;  // n, 1-based

    const env::Observation& current() const {
        MAGE_REQUIRE(!history.empty(), "context: empty history");
        return history.back();
    }
};

inline PolicyContext build_context(env::EnvKind kind, const std::string& task,
                                   const ContextMemory& memory,
                                   std::vector<env::Observation> history,
                                   std::vector<env::Action> admissible, int episode_index) {
    MAGE_REQUIRE(memory.size() == episode_index,
                 "build_context: memory length " + std::to_string(memory.size()) +
                     " does not match episode index " + std::to_string(episode_index));
    MAGE_REQUIRE(!history.empty(), "build_context: history must contain the current observation");
    PolicyContext ctx;
    ctx.env_kind = kind;
    ctx.task = task;
    ctx.memory = &memory;
    ctx.history = std::move(history);
    ctx.admissible = std::move(admissible);
    ctx.episode_index = episode_index;
    return ctx;
}

inline std::string default_task_description(env::EnvKind kind) {
    switch (kind) {
        case env::EnvKind::TicTacToe: return "Win the Tic-Tac-Toe game.";
        case env::EnvKind::KuhnPoker: return "Win the Kuhn Poker hand.";
        case env::EnvKind::Sokoban: return "Push all boxes onto the targets.";
    }
    return {};
}

}  // namespace mage::rollout
