#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "mage/policy/remote.hpp"

using namespace mage;
using namespace mage::policy;
using namespace mage::rollout;

namespace {

/// Canned chat-completion server on a loopback port.
struct FakeServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> requests{0};
    std::string reply_content = "<action>(2,2)</action>";
    std::string last_body;

    FakeServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
            ++requests;
            last_body = req.body;
            nlohmann::json body = {
                {"choices",
                 nlohmann::json::array(
                     {{{"message", {{"role", "assistant"}, {"content", reply_content}}}}})}};
            res.set_content(body.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeServer() {
        server.stop();
        thread.join();
    }

    EndpointConfig config() const {
        EndpointConfig cfg;
        cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
        cfg.max_retries = 0;
        cfg.timeout_seconds = 5;
        return cfg;
    }
};

PolicyContext ttt_opening_context(const ContextMemory& memory) {
    env::TicTacToeBoard board;
    env::Observation obs;
    obs.structured = board;
    obs.text = env::ttt::render(board);
    for (const auto& m : env::ttt::legal_moves(board)) obs.admissible.push_back(env::Action{m});
    return build_context(env::EnvKind::TicTacToe, "ttt", memory, {obs}, obs.admissible, 1);
}

}  // namespace

TEST_CASE("remote_act round-trips a tagged action through a live endpoint") {
    FakeServer fake;
    const ContextMemory memory = ContextMemory::initial();
    const auto ctx = ttt_opening_context(memory);
    Rng rng(1);
    PromptOptions prompt_opts;
    const auto d = remote_act(ctx, fake.config(), prompt_opts, rng);
    REQUIRE_FALSE(d.invalid);
    REQUIRE(d.action == env::Action::ttt(2, 2));
    REQUIRE(d.response_length == static_cast<int>(fake.reply_content.size()));
    REQUIRE(fake.requests == 1);

    // the request body is a chat-completion payload with the sampling settings
    const auto body = nlohmann::json::parse(fake.last_body);
    REQUIRE(body.at("messages").at(0).at("role") == "user");
    REQUIRE(body.at("messages").at(0).at("content").get<std::string>().find("# Cell States") !=
            std::string::npos);
    REQUIRE_THAT(body.at("temperature").get<double>(), Catch::Matchers::WithinAbs(0.7, 1e-12));
    REQUIRE_THAT(body.at("top_p").get<double>(), Catch::Matchers::WithinAbs(0.8, 1e-12));
    REQUIRE(body.at("top_k").get<int>() == 20);
}

TEST_CASE("unparseable remote output substitutes a random admissible action") {
    FakeServer fake;
    fake.reply_content = "I refuse to answer in the expected format.";
    const ContextMemory memory = ContextMemory::initial();
    const auto ctx = ttt_opening_context(memory);
    Rng rng(5);
    PromptOptions prompt_opts;
    const auto d = remote_act(ctx, fake.config(), prompt_opts, rng);
    REQUIRE(d.invalid);
    bool admissible = false;
    for (const auto& a : ctx.admissible) admissible = admissible || a == d.action;
    REQUIRE(admissible);
}

TEST_CASE("transport failures throw after retries") {
    EndpointConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens there
    cfg.max_retries = 1;
    cfg.timeout_seconds = 1;
    REQUIRE_THROWS_AS(remote_chat(cfg, "hello"), TransportError);
}

TEST_CASE("remote reflection extracts the remark block") {
    FakeServer fake;
    fake.reply_content = "Reasoning... <remark>Open in the center next time.</remark>";
    EpisodeTrajectory traj;
    traj.episode_index = 1;
    traj.outcome = env::GameResult::Loss;
    StepRecord step;
    env::TicTacToeBoard board;
    step.obs.structured = board;
    step.obs.text = env::ttt::render(board);
    step.action = env::Action::ttt(1, 1);
    traj.steps.push_back(step);
    traj.final_obs = step.obs;
    PromptOptions prompt_opts;
    const std::string text =
        remote_reflect_text(env::EnvKind::TicTacToe, traj, fake.config(), prompt_opts);
    REQUIRE(text == "Open in the center next time.");
}
