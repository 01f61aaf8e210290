#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "mage/rollout/meta_rollout.hpp"
#include "mage/rollout/serialize.hpp"
#include "mage/train/config.hpp"
#include "mage/train/metrics.hpp"

namespace mage::train {

/// Remote text policy behind the rollout interface: renders the Play prompt,
/// queries the endpoint, parses the tagged action.
class RemotePolicy final : public rollout::Policy {
public:
    RemotePolicy(policy::EndpointConfig endpoint, rollout::PromptOptions prompt_opts)
        : endpoint_(std::move(endpoint)), prompt_opts_(prompt_opts) {}

    policy::ActionDecision act(const rollout::PolicyContext& ctx, Rng& rng) override {
        rollout::PromptOptions opts = prompt_opts_;
        if (const auto* view = std::get_if<env::KuhnView>(&ctx.current().structured))
            opts.agent_seat = view->seat;
        if (const auto* board = std::get_if<env::TicTacToeBoard>(&ctx.current().structured))
            opts.agent_mark = board->to_move;
        return policy::remote_act(ctx, endpoint_, opts, rng);
    }
    bool is_remote() const override { return true; }

private:
    policy::EndpointConfig endpoint_;
    rollout::PromptOptions prompt_opts_;
};

// ------------------------------------------------------------ batch structures

struct Batch {
    std::vector<rollout::MetaEpisode> metas;
    std::vector<reward::MetaRewardVector> rewards;
    std::vector<double> episode_level_advantage;              // per meta
    std::vector<std::vector<std::vector<double>>> combined;   // [meta][episode][step]
    std::vector<adv::AdvantageRecord> step_records;
};

inline reward::MetaRewardVector batch_rewards_for(const rollout::MetaEpisode& meta,
                                                  const RunConfig& cfg) {
    std::vector<double> episode_returns;
    std::vector<int> steps;
    for (const auto& ep : meta.episodes) {
        episode_returns.push_back(reward::compose_episode_reward(
            ep.outcome, ep.invalid_count, ep.response_lengths, cfg.reward));
        steps.push_back(static_cast<int>(ep.steps.size()));
    }
    return reward::stepwise_returns(episode_returns, steps, cfg.returns);
}

/// Episode-level plus anchored step-level advantages for one batch. The
/// episode-level component normalizes each meta-episode's summed meta-reward
/// across the batch; under stationary grouping both components split by
/// opponent id first.
inline void compute_batch_advantages(Batch& batch, const RunConfig& cfg) {
    const std::size_t J = batch.metas.size();
    batch.episode_level_advantage.assign(J, 0.0);

    std::map<std::string, std::vector<std::size_t>> episode_groups;
    for (std::size_t j = 0; j < J; ++j) {
        const std::string key =
            cfg.grouping == adv::Grouping::Stationary ? batch.metas[j].opponent.id() : "";
        episode_groups[key].push_back(j);
    }
    for (const auto& [key, members] : episode_groups) {
        std::vector<double> values;
        for (std::size_t j : members) {
            double total = 0.0;
            for (double r : batch.rewards[j].meta_rewards) total += r;
            values.push_back(total);
        }
        const auto adv_values = adv::normalize(values, cfg.norm);
        for (std::size_t i = 0; i < members.size(); ++i)
            batch.episode_level_advantage[members[i]] = adv_values[i];
    }

    batch.step_records.clear();
    for (std::size_t j = 0; j < J; ++j) {
        const auto& meta = batch.metas[j];
        for (std::size_t n = 0; n < meta.episodes.size(); ++n) {
            const auto& ep = meta.episodes[n];
            for (std::size_t t = 0; t < ep.steps.size(); ++t) {
                adv::AdvantageRecord rec;
                rec.meta_episode_id = static_cast<int>(j);
                rec.episode_index = static_cast<int>(n) + 1;
                rec.step = static_cast<int>(t) + 1;
                rec.opponent_id = meta.opponent.id();
                rec.anchor = adv::anchor_key(ep.steps[t].obs.structured);
                rec.raw_return = batch.rewards[j].step_returns[n][t];
                batch.step_records.push_back(rec);
            }
        }
    }
    const auto groups = adv::group_records(batch.step_records, cfg.grouping, cfg.anchor_scope);
    adv::normalize_groups(batch.step_records, groups, cfg.norm);

    batch.combined.assign(J, {});
    std::size_t rec_at = 0;
    for (std::size_t j = 0; j < J; ++j) {
        const auto& meta = batch.metas[j];
        batch.combined[j].resize(meta.episodes.size());
        for (std::size_t n = 0; n < meta.episodes.size(); ++n) {
            auto& row = batch.combined[j][n];
            row.resize(meta.episodes[n].steps.size());
            for (std::size_t t = 0; t < row.size(); ++t, ++rec_at) {
                const double ep_part =
                    cfg.episode_advantage ? batch.episode_level_advantage[j] : 0.0;
                const double step_part =
                    cfg.step_advantage ? batch.step_records[rec_at].advantage : 0.0;
                row[t] = ep_part + cfg.step_advantage_weight * step_part;
            }
        }
    }
}

struct LossResult {
    double loss = 0.0;                 // -(1/M) sum A log pi
    std::vector<double> ascent_grad;   // (1/M) sum A grad log pi
    std::size_t num_steps = 0;
};

/// Advantage-weighted log-likelihood over the batch, recomputing each step's
/// policy context (observation history prefix plus the memory the policy saw).
inline LossResult compute_loss(const std::vector<rollout::MetaEpisode>& metas,
                               const std::vector<std::vector<std::vector<double>>>& advantages,
                               const policy::PolicyParams& params, env::EnvKind kind) {
    MAGE_REQUIRE(metas.size() == advantages.size(), "compute_loss: batch shape mismatch");
    LossResult out;
    out.ascent_grad.assign(params.theta.size(), 0.0);
    const std::string task = rollout::default_task_description(kind);
    for (std::size_t j = 0; j < metas.size(); ++j) {
        const auto& meta = metas[j];
        MAGE_REQUIRE(meta.episodes.size() == advantages[j].size(),
                     "compute_loss: episode shape mismatch");
        for (std::size_t n = 0; n < meta.episodes.size(); ++n) {
            const auto& ep = meta.episodes[n];
            MAGE_REQUIRE(ep.steps.size() == advantages[j][n].size(),
                         "compute_loss: step shape mismatch");
            rollout::ContextMemory memory_view;
            memory_view.items.assign(meta.memory.items.begin(),
                                     meta.memory.items.begin() + static_cast<long>(n) + 1);
            std::vector<env::Observation> history;
            for (std::size_t t = 0; t < ep.steps.size(); ++t) {
                history.push_back(ep.steps[t].obs);
                const double a = advantages[j][n][t];
                ++out.num_steps;
                if (a == 0.0) continue;  // zero advantage contributes nothing
                rollout::PolicyContext ctx =
                    rollout::build_context(kind, task, memory_view, history,
                                           ep.steps[t].obs.admissible, static_cast<int>(n) + 1);
                const double lp = policy::log_prob_of(ctx, ep.steps[t].action, params);
                const auto grad = policy::logprob_grad(ctx, ep.steps[t].action, params);
                out.loss -= a * lp;
                for (std::size_t k = 0; k < grad.size(); ++k)
                    out.ascent_grad[k] += a * grad[k];
            }
        }
    }
    if (out.num_steps > 0) {
        out.loss /= static_cast<double>(out.num_steps);
        for (double& g : out.ascent_grad) g /= static_cast<double>(out.num_steps);
    }
    return out;
}

// ----------------------------------------------------------------- rollout fan

/// Rolls out `count` meta-episodes in parallel worker threads. Slot-indexed
/// seeds keep results independent of scheduling; the returned vector is in
/// slot order.
inline std::vector<rollout::MetaEpisode> rollout_batch(
    rollout::Policy& policy, const std::vector<opp::OpponentSpec>& specs,
    const env::EnvConfig& env_cfg, const rollout::RolloutOptions& opts,
    std::uint64_t base_seed, std::uint64_t epoch, int threads) {
    const std::size_t count = specs.size();
    std::vector<rollout::MetaEpisode> out(count);
    std::vector<std::string> errors(count);
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, threads > 0
                                        ? threads
                                        : static_cast<int>(std::thread::hardware_concurrency()));
    auto work = [&] {
        for (std::size_t slot = next.fetch_add(1); slot < count; slot = next.fetch_add(1)) {
            try {
                out[slot] = rollout::run_meta_episode(
                    policy, specs[slot], env_cfg, opts,
                    derive_seed(base_seed, epoch, static_cast<std::uint64_t>(slot)));
            } catch (const std::exception& e) {
                errors[slot] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers && w < static_cast<int>(count); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
        if (!err.empty()) throw TransportError("rollout failed: " + err);
    return out;
}

// -------------------------------------------------------------------- training

struct TrainResult {
    policy::PolicyParams params;
    std::string metrics_path;
    std::string final_checkpoint_path;
};

inline rollout::RolloutOptions rollout_options(const RunConfig& cfg) {
    rollout::RolloutOptions opts;
    opts.num_episodes = cfg.num_episodes;
    opts.reflect_on_success = cfg.reflect_on_success;
    opts.reward = cfg.reward;
    opts.memory_enabled = cfg.memory_enabled;
    return opts;
}

inline MetricsRow summarize(int epoch, const std::string& opponent_id,
                            const std::vector<const rollout::MetaEpisode*>& metas,
                            const std::vector<const reward::MetaRewardVector*>& rewards,
                            int num_episodes, double loss) {
    MetricsRow row;
    row.epoch = epoch;
    row.opponent_id = opponent_id;
    row.num_meta_episodes = static_cast<int>(metas.size());
    row.loss = loss;
    row.episode_success.assign(num_episodes, 0.0);
    std::vector<std::vector<bool>> outcome_matrix;
    double return_sum = 0.0, final_return_sum = 0.0, invalid_sum = 0.0;
    int episodes_total = 0;
    for (std::size_t i = 0; i < metas.size(); ++i) {
        const auto& meta = *metas[i];
        std::vector<bool> successes;
        for (std::size_t n = 0; n < meta.episodes.size(); ++n) {
            const bool win = meta.episodes[n].outcome == env::GameResult::Win;
            successes.push_back(win);
            row.episode_success[n] += win;
            invalid_sum += meta.episodes[n].invalid_count;
            ++episodes_total;
        }
        outcome_matrix.push_back(successes);
        for (double r : rewards[i]->episode_returns) return_sum += r;
        final_return_sum += rewards[i]->episode_returns.back();
        switch (meta.episodes.back().outcome) {
            case env::GameResult::Win: ++row.final_wins; break;
            case env::GameResult::Draw: ++row.final_draws; break;
            case env::GameResult::Loss: ++row.final_losses; break;
            case env::GameResult::Timeout: ++row.final_timeouts; break;
            default: break;
        }
    }
    const int M = std::max<int>(1, static_cast<int>(metas.size()));
    for (double& s : row.episode_success) s /= M;
    for (int k = 1; k <= num_episodes; ++k) row.pass_at.push_back(pass_at_k(outcome_matrix, k));
    row.mean_return = episodes_total ? return_sum / episodes_total : 0.0;
    row.mean_final_return = final_return_sum / M;
    row.mean_invalid = episodes_total ? invalid_sum / episodes_total : 0.0;
    std::tie(row.final_ci_low, row.final_ci_high) = wilson_ci(row.final_wins, M);
    return row;
}

/// One training run: per epoch, sample the opponent(s), roll out the batch in
/// parallel, assemble rewards/returns/advantages, take one gradient-ascent
/// step, and append metrics. Fully reproducible from (config, seed).
inline TrainResult train(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir + "/checkpoints");

    policy::PolicyParams params = cfg.checkpoint_path.empty()
                                      ? policy::PolicyParams::zeros(cfg.env.kind)
                                      : policy::params_load(cfg.checkpoint_path);
    if (params.env_kind != cfg.env.kind)
        throw ConfigError("checkpoint env does not match the configured env");

    std::ofstream metrics(out_dir + "/metrics.csv");
    if (!metrics) throw ConfigError("cannot write metrics to " + out_dir);
    metrics << metrics_header(cfg.num_episodes) << "\n";

    std::ofstream trajectories;
    int trajectory_lines = 0;
    if (cfg.save_trajectories) trajectories.open(out_dir + "/trajectories.jsonl");

    const rollout::RolloutOptions opts = rollout_options(cfg);
    Rng sampler(derive_seed(cfg.seed, 0x534d50ull));

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<opp::OpponentSpec> specs(static_cast<std::size_t>(cfg.group_size));
        if (cfg.opponent_sampling == OpponentSampling::PerBatch) {
            const auto spec = opp::sample_opponent(cfg.population, sampler);
            std::fill(specs.begin(), specs.end(), spec);
        } else {
            for (auto& s : specs) s = opp::sample_opponent(cfg.population, sampler);
        }

        rollout::SoftmaxPolicy policy_adapter(params);
        Batch batch;
        batch.metas = rollout_batch(policy_adapter, specs, cfg.env, opts, cfg.seed,
                                    static_cast<std::uint64_t>(epoch), cfg.threads);
        for (const auto& meta : batch.metas)
            batch.rewards.push_back(batch_rewards_for(meta, cfg));
        compute_batch_advantages(batch, cfg);

        const LossResult loss = compute_loss(batch.metas, batch.combined, params, cfg.env.kind);
        bool finite = std::isfinite(loss.loss);
        for (double g : loss.ascent_grad) finite = finite && std::isfinite(g);
        if (!finite) {
            std::ofstream dump(out_dir + "/diagnostic_batch.jsonl");
            rollout::write_jsonl(dump, batch.metas);
            throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                               "; offending batch dumped to " + out_dir +
                               "/diagnostic_batch.jsonl");
        }
        params = policy::apply_update(params, loss.ascent_grad, cfg.learning_rate);

        // per-opponent metric rows, in deterministic id order
        std::map<std::string, std::pair<std::vector<const rollout::MetaEpisode*>,
                                        std::vector<const reward::MetaRewardVector*>>>
            by_opponent;
        for (std::size_t j = 0; j < batch.metas.size(); ++j) {
            auto& slot = by_opponent[batch.metas[j].opponent.id()];
            slot.first.push_back(&batch.metas[j]);
            slot.second.push_back(&batch.rewards[j]);
        }
        for (const auto& [id, group] : by_opponent)
            metrics << metrics_row_csv(summarize(epoch, id, group.first, group.second,
                                                 cfg.num_episodes, loss.loss))
                    << "\n";

        if (cfg.save_trajectories && trajectory_lines < cfg.max_trajectory_lines) {
            for (std::size_t j = 0;
                 j < batch.metas.size() && trajectory_lines < cfg.max_trajectory_lines; ++j) {
                trajectories << rollout::meta_episode_to_json(batch.metas[j], &batch.rewards[j])
                                    .dump()
                             << "\n";
                ++trajectory_lines;
            }
        }

        if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "/checkpoints/epoch_%04d.txt", epoch);
            policy::params_save(params, out_dir + name);
        }
    }

    const std::string final_path = out_dir + "/checkpoints/final.txt";
    policy::params_save(params, final_path);
    return {params, out_dir + "/metrics.csv", final_path};
}

}  // namespace mage::train
