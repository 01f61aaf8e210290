#pragma once

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "mage/policy/action_parse.hpp"
#include "mage/policy/softmax_policy.hpp"
#include "mage/rollout/prompts.hpp"

namespace mage::policy {

/// Chat-completion endpoint configuration. The auth token is read from an
/// environment variable so it never appears in config files.
struct EndpointConfig {
    std::string base_url = "http://127.0.0.1:8000";
    std::string path = "/v1/chat/completions";
    std::string model = "qwen3-4b";
    double temperature = 0.7;
    double top_p = 0.8;
    int top_k = 20;
    int max_tokens = 3072;
    int timeout_seconds = 60;
    int max_retries = 2;
    std::string auth_env_var = "MAGE_API_KEY";
};

/// Posts one chat request and returns the assistant message content.
/// Retries transient failures; throws TransportError when exhausted.
inline std::string remote_chat(const EndpointConfig& cfg, const std::string& prompt) {
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        httplib::Client client(cfg.base_url);
        client.set_connection_timeout(cfg.timeout_seconds);
        client.set_read_timeout(cfg.timeout_seconds);
        httplib::Headers headers;
        if (const char* token = std::getenv(cfg.auth_env_var.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);

        nlohmann::json body = {
            {"model", cfg.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", cfg.temperature},
            {"top_p", cfg.top_p},
            {"top_k", cfg.top_k},
            {"max_tokens", cfg.max_tokens},
        };
        const auto res = client.Post(cfg.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            const auto json = nlohmann::json::parse(res->body);
            return json.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            last_error = std::string("malformed response body: ") + e.what();
        }
    }
    throw TransportError("remote endpoint " + cfg.base_url + cfg.path + ": " + last_error);
}

/// Renders the Play prompt, queries the endpoint, and parses the tagged
/// action. Unparseable output yields a uniformly random admissible action
/// flagged invalid (the episode's invalid counter picks it up).
inline ActionDecision remote_act(const rollout::PolicyContext& ctx, const EndpointConfig& cfg,
                                 const rollout::PromptOptions& prompt_opts, Rng& rng) {
    const auto prompt = rollout::render_play_prompt(ctx, prompt_opts);
    const std::string content = remote_chat(cfg, prompt.text);

    ActionDecision d;
    d.raw_text = content;
    d.response_length = static_cast<int>(content.size());
    const auto parsed = parse_action(ctx.env_kind, content, prompt_opts.actions_per_turn);
    bool admissible_ok = false;
    if (parsed) {
        if (ctx.env_kind == env::EnvKind::Sokoban) {
            // any non-empty direction sequence within the per-turn cap is playable
            admissible_ok = !parsed->as_sokoban().moves.empty();
        } else {
            for (const auto& a : ctx.admissible) admissible_ok = admissible_ok || a == *parsed;
            // an out-of-range or occupied TTT cell is still a playable (invalid) move
            if (ctx.env_kind == env::EnvKind::TicTacToe) admissible_ok = true;
        }
    }
    if (parsed && admissible_ok) {
        d.action = *parsed;
        d.invalid = false;
    } else {
        d.action = ctx.admissible[rng.next_index(static_cast<int>(ctx.admissible.size()))];
        d.invalid = true;
    }
    return d;
}

/// Remote reflection: fills the Reflect prompt and extracts the <remark>
/// block (whole content when no tag is present).
inline std::string remote_reflect_text(env::EnvKind kind, const rollout::EpisodeTrajectory& traj,
                                       const EndpointConfig& cfg,
                                       const rollout::PromptOptions& prompt_opts) {
    const std::string prompt = rollout::render_reflect_prompt(kind, traj, prompt_opts);
    const std::string content = remote_chat(cfg, prompt);
    const std::string lower = detail::lowercase(content);
    const std::string open = "<remark>", close = "</remark>";
    const std::size_t start = lower.rfind(open);
    if (start == std::string::npos) return content;
    const std::size_t body = start + open.size();
    const std::size_t end = lower.find(close, body);
    return content.substr(body, end == std::string::npos ? std::string::npos : end - body);
}

}  // namespace mage::policy
