#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mage/env/types.hpp"

namespace mage::reward {

/// Episode reward composition: task reward, invalid-action penalty, and the
/// response-length penalty (text policies only).
struct RewardConfig {
    double task_win = 10.0;
    double task_loss = -10.0;
    double task_neutral = 0.0;
    /// Reward of a Timeout terminal. Games treat running out of turns as
    /// neutral; Sokoban counts it as a failure.
    double task_timeout = 0.0;
    double invalid_penalty = 0.5;
    double length_coeff = 2.0;       // 1.0 for Sokoban, 2.0 for the games
    int max_response_length = 3072;  // per-env response budget

    static RewardConfig defaults_for(env::EnvKind kind) {
        RewardConfig cfg;
        switch (kind) {
            case env::EnvKind::TicTacToe:
                cfg.length_coeff = 2.0;
                cfg.max_response_length = 3072;
                break;
            case env::EnvKind::KuhnPoker:
                cfg.length_coeff = 2.0;
                cfg.max_response_length = 4096;
                break;
            case env::EnvKind::Sokoban:
                cfg.length_coeff = 1.0;
                cfg.max_response_length = 4096;
                cfg.task_timeout = -10.0;
                break;
        }
        return cfg;
    }

    void validate() const {
        if (invalid_penalty < 0) throw ConfigError("reward: invalid_penalty must be >= 0");
        if (length_coeff < 0) throw ConfigError("reward: length_coeff must be >= 0");
        if (max_response_length <= 0) throw ConfigError("reward: max_response_length must be > 0");
    }
};

enum class ReturnVariant { Differential, Cumulative, SingleEpisode };

inline const char* to_string(ReturnVariant v) {
    switch (v) {
        case ReturnVariant::Differential: return "differential";
        case ReturnVariant::Cumulative: return "cumulative";
        case ReturnVariant::SingleEpisode: return "single_episode";
    }
    return "?";
}

inline ReturnVariant return_variant_from_string(const std::string& s) {
    if (s == "differential") return ReturnVariant::Differential;
    if (s == "cumulative") return ReturnVariant::Cumulative;
    if (s == "single_episode") return ReturnVariant::SingleEpisode;
    throw ConfigError("unknown return variant: " + s);
}

/// Discounts for the dual within-episode / cross-episode return.
struct ReturnConfig {
    double gamma_step = 0.95;
    double gamma_traj = 0.6;
    ReturnVariant variant = ReturnVariant::Differential;
    /// The cross-episode recursion needs a value for G_{m,0} while steps are
    /// indexed from 1. Default: G_{m,0} is the return at episode m's first
    /// decision. The alternative applies one extra step discount.
    bool g0_extra_step_discount = false;

    void validate() const {
        if (gamma_step <= 0.0 || gamma_step > 1.0)
            throw ConfigError("returns: gamma_step must be in (0,1]");
        if (gamma_traj < 0.0 || gamma_traj > 1.0)
            throw ConfigError("returns: gamma_traj must be in [0,1]");
    }
};

/// Piecewise length penalty: free below half the budget, then a linear ramp,
/// saturating at 1 from the budget upwards.
inline double length_penalty(double length, double max_length) {
    MAGE_REQUIRE(length >= 0 && max_length > 0, "length_penalty: bad arguments");
    const double half = max_length / 2.0;
    if (length < half) return 0.0;
    if (length >= max_length) return 1.0;
    return (length - half) / (max_length - half);
}

inline double task_reward(env::GameResult outcome, const RewardConfig& cfg) {
    switch (outcome) {
        case env::GameResult::Win: return cfg.task_win;
        case env::GameResult::Loss: return cfg.task_loss;
        case env::GameResult::Draw: return cfg.task_neutral;
        case env::GameResult::Timeout: return cfg.task_timeout;
        case env::GameResult::Ongoing:
            throw ContractError("task_reward: episode still ongoing");
    }
    return 0.0;
}

/// R(tau) = task reward - invalid penalty * count - c_len * sum of per-response
/// length penalties. Parametric policies have no responses, so no length term.
inline double compose_episode_reward(env::GameResult outcome, int invalid_count,
                                     const std::vector<int>& response_lengths,
                                     const RewardConfig& cfg) {
    MAGE_REQUIRE(invalid_count >= 0, "compose_episode_reward: negative invalid count");
    double r = task_reward(outcome, cfg);
    r -= cfg.invalid_penalty * invalid_count;
    double length_sum = 0.0;
    for (int len : response_lengths)
        length_sum += length_penalty(len, cfg.max_response_length);
    r -= cfg.length_coeff * length_sum;
    return r;
}

/// R_n = R(tau_n) - R(tau_{n-1}) with R(tau_0) = 0. Sums telescope to R(tau_N).
inline std::vector<double> differential_meta_reward(const std::vector<double>& episode_returns) {
    MAGE_REQUIRE(!episode_returns.empty(), "differential_meta_reward: empty input");
    std::vector<double> out(episode_returns.size());
    double prev = 0.0;
    for (std::size_t n = 0; n < episode_returns.size(); ++n) {
        out[n] = episode_returns[n] - prev;
        prev = episode_returns[n];
    }
    return out;
}

/// Sparse step rewards: zero everywhere except the final step.
inline std::vector<double> stepwise_rewards(double meta_reward, int num_steps) {
    MAGE_REQUIRE(num_steps >= 1, "stepwise_rewards: need at least one step");
    std::vector<double> out(num_steps, 0.0);
    out.back() = meta_reward;
    return out;
}

/// Per-episode returns plus the per-step return table of the meta-episode.
struct MetaRewardVector {
    std::vector<double> episode_returns;        // R(tau_n)
    std::vector<double> meta_rewards;           // R_n, per the active variant
    std::vector<std::vector<double>> step_returns;  // G_{n,t}, t = 1..T_n
};

/// Dual-discount step-wise returns. Within an episode the sparse terminal
/// signal discounts backwards by gamma_step; across episodes the first-step
/// returns of later episodes feed back discounted by gamma_traj. Variants:
/// Differential uses R_n = R(tau_n) - R(tau_{n-1}); Cumulative uses R(tau_n)
/// and keeps the cross-episode term; SingleEpisode uses R(tau_n) alone.
inline MetaRewardVector stepwise_returns(const std::vector<double>& episode_returns,
                                         const std::vector<int>& steps_per_episode,
                                         const ReturnConfig& cfg) {
    cfg.validate();
    MAGE_REQUIRE(!episode_returns.empty(), "stepwise_returns: empty input");
    MAGE_REQUIRE(episode_returns.size() == steps_per_episode.size(),
                 "stepwise_returns: length mismatch");
    const int num_episodes = static_cast<int>(episode_returns.size());
    for (int t : steps_per_episode)
        MAGE_REQUIRE(t >= 1, "stepwise_returns: every episode needs at least one step");

    MetaRewardVector out;
    out.episode_returns = episode_returns;
    out.meta_rewards = cfg.variant == ReturnVariant::Differential
                           ? differential_meta_reward(episode_returns)
                           : episode_returns;
    const bool cross = cfg.variant != ReturnVariant::SingleEpisode;

    // backward recursion over episodes: cross_n = sum_{m>n} gamma_traj^{m-n} G_{m,0}
    std::vector<double> cross_term(num_episodes, 0.0);
    double rolling = 0.0;  // cross term of the episode after the current one
    for (int n = num_episodes - 1; n >= 0; --n) {
        cross_term[n] = cross ? rolling : 0.0;
        const int T = steps_per_episode[n];
        const double g0_exp = cfg.g0_extra_step_discount ? T : T - 1;
        const double g0 = std::pow(cfg.gamma_step, g0_exp) * out.meta_rewards[n] + cross_term[n];
        rolling = cfg.gamma_traj * (g0 + rolling);
    }

    out.step_returns.resize(num_episodes);
    for (int n = 0; n < num_episodes; ++n) {
        const int T = steps_per_episode[n];
        out.step_returns[n].resize(T);
        for (int t = 1; t <= T; ++t)
            out.step_returns[n][t - 1] =
                std::pow(cfg.gamma_step, T - t) * out.meta_rewards[n] + cross_term[n];
    }
    return out;
}

}  // namespace mage::reward
