#pragma once

#include <iostream>
#include <memory>
#include <vector>

#include "mage/env/env.hpp"
#include "mage/opponents/pool.hpp"
#include "mage/policy/softmax_policy.hpp"
#include "mage/reward/reward.hpp"
#include "mage/rollout/context.hpp"
#include "mage/rollout/trajectory.hpp"

namespace mage::rollout {

/// The policy abstraction the rollout engine drives. act() must be read-only
/// with respect to policy state; parameter updates happen between batches.
class Policy {
public:
    virtual ~Policy() = default;
    virtual policy::ActionDecision act(const PolicyContext& ctx, Rng& rng) = 0;
    virtual bool is_remote() const { return false; }
};

class SoftmaxPolicy final : public Policy {
public:
    explicit SoftmaxPolicy(const policy::PolicyParams& params) : params_(&params) {}
    policy::ActionDecision act(const PolicyContext& ctx, Rng& rng) override {
        return policy::act(ctx, *params_, rng);
    }

private:
    const policy::PolicyParams* params_;
};

/// A meta-episode: N trajectories against one fixed opponent with the
/// reflection memory interleaved between them.
struct MetaEpisode {
    opp::OpponentSpec opponent;
    std::vector<EpisodeTrajectory> episodes;
    ContextMemory memory;  // [m_0, ..., m_{N-1}]
    std::uint64_t seed = 0;

    bool operator==(const MetaEpisode&) const = default;
};

struct RolloutOptions {
    int num_episodes = 3;  // N
    ReflectionGenerator reflection_generator = ReflectionGenerator::Structured;
    bool reflect_on_success = true;  // when false, successes leave a featureless stub
    bool memory_enabled = true;      // when false, every reflection is a stub (ablation)
    reward::RewardConfig reward;     // stamps the sparse terminal step reward
};

/// Hook used by the trainer/tests to synthesize remote reflections; kept as a
/// callback so this header stays free of the HTTP client.
using RemoteReflectFn =
    std::function<std::string(env::EnvKind, const EpisodeTrajectory&)>;

/// Runs one meta-episode: N episodes against the fixed opponent, generating a
/// reflection after each non-final episode. The opponent's identity is never
/// exposed to the policy context.
inline MetaEpisode run_meta_episode(Policy& policy, const opp::OpponentSpec& opponent,
                                    const env::EnvConfig& env_config, const RolloutOptions& opts,
                                    std::uint64_t seed,
                                    const RemoteReflectFn& remote_reflect = nullptr) {
    MAGE_REQUIRE(opts.num_episodes >= 1, "run_meta_episode: N must be >= 1");
    MetaEpisode meta;
    meta.opponent = opponent;
    meta.seed = seed;
    meta.memory = ContextMemory::initial();
    const std::string task = default_task_description(env_config.kind);

    env::Environment environment(env_config, opp::make_opponent(opponent));
    for (int n = 1; n <= opts.num_episodes; ++n) {
        Rng policy_rng(derive_seed(seed, static_cast<std::uint64_t>(n), 0x504f4cull));
        env::Observation obs = environment.reset(derive_seed(seed, static_cast<std::uint64_t>(n)));

        EpisodeTrajectory traj;
        traj.episode_index = n;
        std::vector<env::Observation> history{obs};
        std::vector<env::Action> past_actions;
        int parse_substitutions = 0;

        while (!environment.terminal()) {
            PolicyContext ctx = build_context(env_config.kind, task, meta.memory, history,
                                              obs.admissible, n);
            ctx.past_actions = past_actions;
            const policy::ActionDecision decision = policy.act(ctx, policy_rng);
            const env::StepOutcome outcome = environment.step(decision.action);

            StepRecord step;
            step.obs = obs;  // the observation the policy decided on
            step.action = decision.action;
            step.invalid = decision.invalid || outcome.invalid;
            step.response_length = decision.response_length;
            step.log_prob = decision.log_prob;
            traj.steps.push_back(std::move(step));
            if (decision.invalid) ++parse_substitutions;
            if (policy.is_remote()) traj.response_lengths.push_back(decision.response_length);

            obs = outcome.next_obs;
            history.push_back(obs);
            past_actions.push_back(decision.action);
        }

        traj.outcome = environment.result();
        traj.final_obs = history.back();
        traj.invalid_count = environment.invalid_count() + parse_substitutions;
        if (!traj.steps.empty())
            traj.steps.back().reward = reward::task_reward(traj.outcome, opts.reward);
        meta.episodes.push_back(std::move(traj));

        if (n < opts.num_episodes) {
            const EpisodeTrajectory& done = meta.episodes.back();
            Reflection r;
            const bool skip = !opts.memory_enabled ||
                              (!opts.reflect_on_success && done.outcome == env::GameResult::Win);
            if (skip) {
                r.episode_index = n;
                r.outcome = done.outcome;
            } else {
                r = generate_reflection(env_config.kind, done);
                if (opts.reflection_generator == ReflectionGenerator::Remote) {
                    try {
                        MAGE_REQUIRE(remote_reflect != nullptr,
                                     "run_meta_episode: remote reflection requested without a client");
                        r.text = remote_reflect(env_config.kind, done);
                    } catch (const TransportError& e) {
                        std::cerr << "warning: remote reflection failed (" << e.what()
                                  << "); using the structured digest\n";
                    }
                }
            }
            meta.memory = append_memory(meta.memory, r);
        }
    }
    return meta;
}

}  // namespace mage::rollout
