#pragma once

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

#include "mage/env/env.hpp"
#include "mage/rollout/context.hpp"

#ifndef MAGE_ASSET_DIR
#define MAGE_ASSET_DIR "assets"
#endif

namespace mage::rollout {

inline std::string& prompt_asset_dir() {
    static std::string dir = std::string(MAGE_ASSET_DIR) + "/prompts";
    return dir;
}

inline std::string load_template(const std::string& name) {
    static std::mutex mu;
    static std::map<std::string, std::string> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    const std::string path = prompt_asset_dir() + "/" + name;
    std::ifstream in(path);
    if (!in) throw ConfigError("prompt template not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return cache[name] = buf.str();
}

/// Replaces each {key} with its value. Unknown placeholders are left as-is.
inline std::string substitute(std::string text, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        const std::string needle = "{" + key + "}";
        std::size_t at = 0;
        while ((at = text.find(needle, at)) != std::string::npos) {
            text.replace(at, needle.size(), value);
            at += value.size();
        }
    }
    return text;
}

struct PromptOptions {
    int max_prompt_length = 4096;
    int actions_per_turn = 3;    // Sokoban only
    int agent_seat = 0;          // Kuhn only
    env::Mark agent_mark = env::Mark::X;  // Tic-Tac-Toe only
};

namespace detail {

inline std::string play_template_name(env::EnvKind kind) {
    switch (kind) {
        case env::EnvKind::TicTacToe: return "tictactoe_play.txt";
        case env::EnvKind::KuhnPoker: return "kuhn_play.txt";
        case env::EnvKind::Sokoban: return "sokoban_play.txt";
    }
    throw ContractError("play template: unknown env");
}

inline std::string reflections_block(const ContextMemory& memory, std::size_t skip_oldest) {
    std::ostringstream out;
    bool any = false;
    for (std::size_t i = 0; i < memory.items.size(); ++i) {
        const auto& r = memory.items[i];
        if (r.episode_index == 0 || r.text.empty()) continue;  // m_0 is empty
        if (static_cast<std::size_t>(r.episode_index) <= skip_oldest) continue;
        if (!any) out << "\n\n# Reflections on previous episodes\n";
        any = true;
        out << "Episode " << r.episode_index << ": " << r.text << "\n";
    }
    return out.str();
}

inline std::string trajectory_block(const PolicyContext& ctx) {
    if (ctx.history.size() <= 1) return "";
    std::ostringstream out;
    out << "\n\n# Current episode so far\n";
    for (std::size_t i = 0; i + 1 < ctx.history.size(); ++i) {
        if (i < ctx.past_actions.size())
            out << "Your action " << i + 1 << ": " << env::to_string(ctx.past_actions[i]) << "\n";
        out << "Observation:\n" << ctx.history[i + 1].text << "\n";
    }
    return out.str();
}

inline std::string admissible_block(const PolicyContext& ctx) {
    std::ostringstream out;
    for (std::size_t i = 0; i < ctx.admissible.size(); ++i) {
        if (i) out << ", ";
        out << env::to_string(ctx.admissible[i]);
    }
    return out.str();
}

}  // namespace detail

/// Renders the per-env Play prompt. When the filled prompt exceeds the length
/// budget, the oldest reflections are dropped first (and a note is logged by
/// the caller via the return flag).
struct RenderedPrompt {
    std::string text;
    int reflections_dropped = 0;
};

inline RenderedPrompt render_play_prompt(const PolicyContext& ctx, const PromptOptions& opts) {
    const std::string tpl = load_template(detail::play_template_name(ctx.env_kind));
    std::map<std::string, std::string> values;
    values["board_size"] = "3";
    values["player_symbol"] = std::string(1, env::mark_char(opts.agent_mark));
    values["opponent_symbol"] = std::string(1, env::mark_char(env::other_mark(opts.agent_mark)));
    values["agent_player_id"] = std::to_string(opts.agent_seat);
    values["opponent_player_id"] = std::to_string(1 - opts.agent_seat);
    values["num_actions_per_turn"] = std::to_string(opts.actions_per_turn);
    values["init_observation"] = ctx.history.empty() ? "" : ctx.history.front().text;
    values["current_trajectory"] = detail::trajectory_block(ctx);
    values["admissible_actions"] = detail::admissible_block(ctx);

    RenderedPrompt out;
    for (int drop = 0; drop <= ctx.memory->size(); ++drop) {
        values["past_trajectories_reflections"] = detail::reflections_block(*ctx.memory, drop);
        out.text = substitute(tpl, values);
        out.reflections_dropped = drop;
        if (static_cast<int>(out.text.size()) <= opts.max_prompt_length) break;
    }
    return out;
}

/// Renders the Reflect prompt over a finished episode's transcript.
inline std::string render_reflect_prompt(env::EnvKind kind, const EpisodeTrajectory& traj,
                                         const PromptOptions& opts) {
    const std::string tpl = load_template("reflect.txt");
    std::map<std::string, std::string> values;
    switch (kind) {
        case env::EnvKind::TicTacToe:
            values["env_intro"] = "You are an expert agent playing Tic-Tac-Toe on a 3 by 3 board.";
            break;
        case env::EnvKind::KuhnPoker:
            values["env_intro"] = "You are an expert Kuhn Poker agent.";
            break;
        case env::EnvKind::Sokoban:
            values["env_intro"] = "You are an expert agent operating in the Sokoban environment.";
            break;
    }
    values["init_observation"] = traj.steps.empty() ? "" : traj.steps.front().obs.text;
    std::ostringstream transcript;
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        transcript << "Your action " << i + 1 << ": " << env::to_string(traj.steps[i].action)
                   << "\n";
        const std::string& next_text =
            i + 1 < traj.steps.size() ? traj.steps[i + 1].obs.text : traj.final_obs.text;
        transcript << "Observation:\n" << next_text << "\n";
    }
    values["current_trajectory"] = transcript.str();
    values["task_outcome_line"] = traj.outcome == env::GameResult::Win
                                      ? "The task was successfully completed."
                                      : "The task is NOT successfully completed.";
    (void)opts;
    return substitute(tpl, values);
}

}  // namespace mage::rollout
