#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mage/advantage/advantage.hpp"
#include "mage/env/env.hpp"
#include "mage/opponents/pool.hpp"
#include "mage/policy/remote.hpp"
#include "mage/reward/reward.hpp"

namespace mage::train {

using nlohmann::json;

enum class OpponentSampling { PerBatch, PerMetaEpisode };

inline const char* to_string(OpponentSampling s) {
    return s == OpponentSampling::PerBatch ? "per_batch" : "per_meta_episode";
}

inline OpponentSampling sampling_from_string(const std::string& s) {
    if (s == "per_batch") return OpponentSampling::PerBatch;
    if (s == "per_meta_episode") return OpponentSampling::PerMetaEpisode;
    throw ConfigError("unknown opponent_sampling: " + s);
}

enum class PolicyKind { Parametric, Remote };

struct RunConfig {
    env::EnvConfig env;
    opp::PopulationConfig population;
    opp::KuhnArchetypeParams archetype_params;

    int num_episodes = 3;  // N
    int group_size = 8;    // meta-episodes per batch (24 for non-meta baselines)

    reward::RewardConfig reward;
    reward::ReturnConfig returns;

    adv::Grouping grouping = adv::Grouping::Stationary;
    adv::GroupScope anchor_scope = adv::GroupScope::StepGlobalAnchor;
    adv::NormMode norm = adv::NormMode::MeanNorm;
    double step_advantage_weight = 1.0;
    bool episode_advantage = true;  // agent-specific normalization applies to both
    bool step_advantage = true;     // components; each can be switched off

    double learning_rate = 0.2;
    int epochs = 150;
    std::uint64_t seed = 0;
    OpponentSampling opponent_sampling = OpponentSampling::PerBatch;

    bool reflect_on_success = true;
    bool memory_enabled = true;  // false: reflections become featureless stubs

    int eval_meta_episodes = 256;
    int checkpoint_every = 10;
    bool save_trajectories = false;
    int max_trajectory_lines = 20000;
    int threads = 0;  // 0: hardware concurrency

    PolicyKind policy = PolicyKind::Parametric;
    std::string checkpoint_path;  // optional warm start / eval subject
    policy::EndpointConfig endpoint;

    static RunConfig defaults_for(env::EnvKind kind) {
        RunConfig cfg;
        cfg.env.kind = kind;
        cfg.reward = reward::RewardConfig::defaults_for(kind);
        switch (kind) {
            case env::EnvKind::KuhnPoker:
                cfg.population = opp::kuhn_archetype_population();
                break;
            case env::EnvKind::TicTacToe:
                cfg.population = opp::ttt_balanced_population();
                cfg.epochs = 150;
                break;
            case env::EnvKind::Sokoban:
                cfg.population.entries = {{opp::OpponentSpec{opp::Archetype::None, 0, 0}, 1.0}};
                cfg.epochs = 300;
                break;
        }
        return cfg;
    }

    void validate() const {
        env.validate();
        population.validate();
        reward.validate();
        returns.validate();
        if (num_episodes < 1) throw ConfigError("config: num_episodes must be >= 1");
        if (group_size < 1) throw ConfigError("config: group_size must be >= 1");
        if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
        if (learning_rate < 0) throw ConfigError("config: learning_rate must be >= 0");
        if (eval_meta_episodes < 1) throw ConfigError("config: eval_meta_episodes must be >= 1");
        for (const auto& [spec, w] : population.entries)
            if (spec.archetype != opp::Archetype::None && spec.env_kind() != env.kind)
                throw ConfigError("config: opponent " + spec.id() + " does not play this env");
    }
};

// ----------------------------------------------------------------- json (de)ser

inline json to_json(const RunConfig& cfg) {
    json j;
    j["env"]["kind"] = env::to_string(cfg.env.kind);
    j["env"]["max_turns"] = cfg.env.max_turns;
    j["env"]["agent_mark"] = std::string(1, env::mark_char(cfg.env.agent_mark));
    j["env"]["agent_moves_first"] = cfg.env.agent_moves_first;
    j["env"]["kuhn_seat_mode"] = cfg.env.seat_mode == env::KuhnSeatMode::UniformPerEpisode
                                     ? "uniform"
                                     : (cfg.env.seat_mode == env::KuhnSeatMode::Fixed0 ? "p0" : "p1");
    j["env"]["sokoban_size"] = cfg.env.sokoban_size;
    j["env"]["sokoban_boxes"] = cfg.env.sokoban_boxes;
    j["env"]["sokoban_search_depth"] = cfg.env.sokoban_search_depth;
    j["env"]["sokoban_max_solution_steps"] = cfg.env.sokoban_max_solution_steps;
    j["env"]["actions_per_turn"] = cfg.env.actions_per_turn;
    j["population"] = json::array();
    for (const auto& [spec, w] : cfg.population.entries) {
        j["population"].push_back({{"archetype", spec.id()},
                                   {"param", spec.param},
                                   {"seed", spec.seed},
                                   {"weight", w}});
    }
    j["archetype_params"]["open_bet"] = cfg.archetype_params.open_bet;
    j["archetype_params"]["call_bet"] = cfg.archetype_params.call_bet;
    j["num_episodes"] = cfg.num_episodes;
    j["group_size"] = cfg.group_size;
    j["reward"] = {{"task_win", cfg.reward.task_win},
                   {"task_loss", cfg.reward.task_loss},
                   {"task_neutral", cfg.reward.task_neutral},
                   {"task_timeout", cfg.reward.task_timeout},
                   {"invalid_penalty", cfg.reward.invalid_penalty},
                   {"length_coeff", cfg.reward.length_coeff},
                   {"max_response_length", cfg.reward.max_response_length}};
    j["returns"] = {{"gamma_step", cfg.returns.gamma_step},
                    {"gamma_traj", cfg.returns.gamma_traj},
                    {"variant", reward::to_string(cfg.returns.variant)},
                    {"g0_extra_step_discount", cfg.returns.g0_extra_step_discount}};
    j["grouping"] = adv::to_string(cfg.grouping);
    j["anchor_scope"] = adv::to_string(cfg.anchor_scope);
    j["norm"] = adv::to_string(cfg.norm);
    j["step_advantage_weight"] = cfg.step_advantage_weight;
    j["episode_advantage"] = cfg.episode_advantage;
    j["step_advantage"] = cfg.step_advantage;
    j["learning_rate"] = cfg.learning_rate;
    j["epochs"] = cfg.epochs;
    j["seed"] = cfg.seed;
    j["opponent_sampling"] = to_string(cfg.opponent_sampling);
    j["reflect_on_success"] = cfg.reflect_on_success;
    j["memory_enabled"] = cfg.memory_enabled;
    j["eval_meta_episodes"] = cfg.eval_meta_episodes;
    j["checkpoint_every"] = cfg.checkpoint_every;
    j["save_trajectories"] = cfg.save_trajectories;
    j["max_trajectory_lines"] = cfg.max_trajectory_lines;
    j["threads"] = cfg.threads;
    j["policy"] = cfg.policy == PolicyKind::Parametric ? "parametric" : "remote";
    j["checkpoint_path"] = cfg.checkpoint_path;
    j["endpoint"] = {{"base_url", cfg.endpoint.base_url},
                     {"path", cfg.endpoint.path},
                     {"model", cfg.endpoint.model},
                     {"temperature", cfg.endpoint.temperature},
                     {"top_p", cfg.endpoint.top_p},
                     {"top_k", cfg.endpoint.top_k},
                     {"max_tokens", cfg.endpoint.max_tokens},
                     {"timeout_seconds", cfg.endpoint.timeout_seconds},
                     {"max_retries", cfg.endpoint.max_retries},
                     {"auth_env_var", cfg.endpoint.auth_env_var}};
    return j;
}

inline opp::OpponentSpec opponent_spec_from_json(const json& j) {
    opp::OpponentSpec spec;
    std::string name = j.at("archetype").get<std::string>();
    int param = j.value("param", 0);
    // accept parameterized ids like ttt_mcts_100 / kuhn_cfr_100000
    for (const char* prefix : {"ttt_mcts_", "kuhn_cfr_", "ttt_pattern_"}) {
        if (name.rfind(prefix, 0) == 0) {
            param = std::stoi(name.substr(std::string(prefix).size()));
            name = name.substr(0, std::string(prefix).size() - 1);
        }
    }
    spec.archetype = opp::archetype_from_string(name);
    spec.param = param;
    spec.seed = j.value("seed", 0ull);
    return spec;
}

inline RunConfig config_from_json(const json& j) {
    const std::string kind_name = j.contains("env") && j["env"].contains("kind")
                                      ? j["env"]["kind"].get<std::string>()
                                      : "kuhn";
    RunConfig cfg = RunConfig::defaults_for(env::env_kind_from_string(kind_name));
    if (j.contains("env")) {
        const auto& e = j["env"];
        cfg.env.max_turns = e.value("max_turns", cfg.env.max_turns);
        if (e.contains("agent_mark"))
            cfg.env.agent_mark = e["agent_mark"].get<std::string>() == "O" ? env::Mark::O
                                                                           : env::Mark::X;
        cfg.env.agent_moves_first = e.value("agent_moves_first", cfg.env.agent_moves_first);
        if (e.contains("kuhn_seat_mode")) {
            const std::string m = e["kuhn_seat_mode"].get<std::string>();
            cfg.env.seat_mode = m == "p0"   ? env::KuhnSeatMode::Fixed0
                                : m == "p1" ? env::KuhnSeatMode::Fixed1
                                            : env::KuhnSeatMode::UniformPerEpisode;
        }
        cfg.env.sokoban_size = e.value("sokoban_size", cfg.env.sokoban_size);
        cfg.env.sokoban_boxes = e.value("sokoban_boxes", cfg.env.sokoban_boxes);
        cfg.env.sokoban_search_depth = e.value("sokoban_search_depth", cfg.env.sokoban_search_depth);
        cfg.env.sokoban_max_solution_steps =
            e.value("sokoban_max_solution_steps", cfg.env.sokoban_max_solution_steps);
        cfg.env.actions_per_turn = e.value("actions_per_turn", cfg.env.actions_per_turn);
    }
    if (j.contains("population")) {
        cfg.population.entries.clear();
        for (const auto& entry : j["population"])
            cfg.population.entries.emplace_back(opponent_spec_from_json(entry),
                                                entry.at("weight").get<double>());
    }
    if (j.contains("archetype_params")) {
        const auto& a = j["archetype_params"];
        if (a.contains("open_bet"))
            for (int i = 0; i < 3; ++i) cfg.archetype_params.open_bet[i] = a["open_bet"][i];
        if (a.contains("call_bet"))
            for (int i = 0; i < 3; ++i) cfg.archetype_params.call_bet[i] = a["call_bet"][i];
    }
    cfg.num_episodes = j.value("num_episodes", cfg.num_episodes);
    cfg.group_size = j.value("group_size", cfg.group_size);
    if (j.contains("reward")) {
        const auto& r = j["reward"];
        cfg.reward.task_win = r.value("task_win", cfg.reward.task_win);
        cfg.reward.task_loss = r.value("task_loss", cfg.reward.task_loss);
        cfg.reward.task_neutral = r.value("task_neutral", cfg.reward.task_neutral);
        cfg.reward.task_timeout = r.value("task_timeout", cfg.reward.task_timeout);
        cfg.reward.invalid_penalty = r.value("invalid_penalty", cfg.reward.invalid_penalty);
        cfg.reward.length_coeff = r.value("length_coeff", cfg.reward.length_coeff);
        cfg.reward.max_response_length =
            r.value("max_response_length", cfg.reward.max_response_length);
    }
    if (j.contains("returns")) {
        const auto& r = j["returns"];
        cfg.returns.gamma_step = r.value("gamma_step", cfg.returns.gamma_step);
        cfg.returns.gamma_traj = r.value("gamma_traj", cfg.returns.gamma_traj);
        if (r.contains("variant"))
            cfg.returns.variant = reward::return_variant_from_string(r["variant"].get<std::string>());
        cfg.returns.g0_extra_step_discount =
            r.value("g0_extra_step_discount", cfg.returns.g0_extra_step_discount);
    }
    if (j.contains("grouping")) cfg.grouping = adv::grouping_from_string(j["grouping"]);
    if (j.contains("anchor_scope")) cfg.anchor_scope = adv::scope_from_string(j["anchor_scope"]);
    if (j.contains("norm")) cfg.norm = adv::norm_mode_from_string(j["norm"]);
    cfg.step_advantage_weight = j.value("step_advantage_weight", cfg.step_advantage_weight);
    cfg.episode_advantage = j.value("episode_advantage", cfg.episode_advantage);
    cfg.step_advantage = j.value("step_advantage", cfg.step_advantage);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("opponent_sampling"))
        cfg.opponent_sampling = sampling_from_string(j["opponent_sampling"]);
    cfg.reflect_on_success = j.value("reflect_on_success", cfg.reflect_on_success);
    cfg.memory_enabled = j.value("memory_enabled", cfg.memory_enabled);
    cfg.eval_meta_episodes = j.value("eval_meta_episodes", cfg.eval_meta_episodes);
    cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
    cfg.save_trajectories = j.value("save_trajectories", cfg.save_trajectories);
    cfg.max_trajectory_lines = j.value("max_trajectory_lines", cfg.max_trajectory_lines);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("policy"))
        cfg.policy = j["policy"].get<std::string>() == "remote" ? PolicyKind::Remote
                                                                : PolicyKind::Parametric;
    cfg.checkpoint_path = j.value("checkpoint_path", cfg.checkpoint_path);
    if (j.contains("endpoint")) {
        const auto& e = j["endpoint"];
        cfg.endpoint.base_url = e.value("base_url", cfg.endpoint.base_url);
        cfg.endpoint.path = e.value("path", cfg.endpoint.path);
        cfg.endpoint.model = e.value("model", cfg.endpoint.model);
        cfg.endpoint.temperature = e.value("temperature", cfg.endpoint.temperature);
        cfg.endpoint.top_p = e.value("top_p", cfg.endpoint.top_p);
        cfg.endpoint.top_k = e.value("top_k", cfg.endpoint.top_k);
        cfg.endpoint.max_tokens = e.value("max_tokens", cfg.endpoint.max_tokens);
        cfg.endpoint.timeout_seconds = e.value("timeout_seconds", cfg.endpoint.timeout_seconds);
        cfg.endpoint.max_retries = e.value("max_retries", cfg.endpoint.max_retries);
        cfg.endpoint.auth_env_var = e.value("auth_env_var", cfg.endpoint.auth_env_var);
    }
    cfg.validate();
    return cfg;
}

/// Applies one `--set key=value` override onto the raw config JSON. Nested
/// keys use dots; values parse as JSON when possible, else as strings.
inline void apply_override(json& j, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // plain string
    }
    json* at = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("override has an empty key segment: " + assignment);
        if (dot == std::string::npos) {
            (*at)[key] = value;
            break;
        }
        at = &(*at)[key];
        start = dot + 1;
    }
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json j;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
    } else {
        j = json::object();
    }
    for (const auto& o : overrides) apply_override(j, o);
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

}  // namespace mage::train
