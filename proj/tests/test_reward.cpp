#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "mage/common/rng.hpp"
#include "mage/reward/reward.hpp"

using namespace mage;
using namespace mage::reward;

namespace {

/// Direct double-summation of the dual-discount return, independent of the
/// backward recursion used by the implementation.
std::vector<std::vector<double>> brute_force_returns(const std::vector<double>& meta_rewards,
                                                     const std::vector<int>& steps,
                                                     const ReturnConfig& cfg) {
    const int N = static_cast<int>(meta_rewards.size());
    const bool cross = cfg.variant != ReturnVariant::SingleEpisode;
    // G(n, t) with t in [0, T_n]; t = 0 is the first-decision convention value
    std::function<double(int, int)> g = [&](int n, int t) -> double {
        const int T = steps[n];
        double within = 0.0;
        // sparse reward: only t' = T contributes
        if (t == 0) {
            within = std::pow(cfg.gamma_step, cfg.g0_extra_step_discount ? T : T - 1) *
                     meta_rewards[n];
        } else {
            within = std::pow(cfg.gamma_step, T - t) * meta_rewards[n];
        }
        double cross_sum = 0.0;
        if (cross)
            for (int m = n + 1; m < N; ++m)
                cross_sum += std::pow(cfg.gamma_traj, m - n) * g(m, 0);
        return within + cross_sum;
    };
    std::vector<std::vector<double>> out(N);
    for (int n = 0; n < N; ++n)
        for (int t = 1; t <= steps[n]; ++t) out[n].push_back(g(n, t));
    return out;
}

/// Random dyadic reward values (multiples of 0.5), the value lattice actual
/// episode rewards live on; differences and sums of these are exact in IEEE.
double random_dyadic(Rng& rng) {
    return (static_cast<double>(rng.next_index(121)) - 60.0) / 2.0;
}

}  // namespace

TEST_CASE("length penalty boundaries") {
    REQUIRE(length_penalty(0, 100) == 0.0);
    REQUIRE(length_penalty(50, 100) == 0.0);     // L = L_max/2 sits in the free branch
    REQUIRE(length_penalty(100, 100) == 1.0);
    REQUIRE(length_penalty(200, 100) == 1.0);
    REQUIRE_THAT(length_penalty(75, 100), Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("length penalty is continuous and non-decreasing") {
    double prev = -1.0;
    for (int l = 0; l <= 300; ++l) {
        const double v = length_penalty(l, 200);
        REQUIRE(v >= prev);
        prev = v;
    }
    // continuity at the two joints
    REQUIRE_THAT(length_penalty(100 + 1e-9, 200), Catch::Matchers::WithinAbs(0.0, 1e-10));
    REQUIRE_THAT(length_penalty(200 - 1e-9, 200), Catch::Matchers::WithinAbs(1.0, 1e-10));
}

TEST_CASE("episode reward composition") {
    RewardConfig cfg;
    REQUIRE(compose_episode_reward(env::GameResult::Win, 0, {}, cfg) == 10.0);
    REQUIRE(compose_episode_reward(env::GameResult::Loss, 2, {}, cfg) == -11.0);
    cfg.length_coeff = 2.0;
    cfg.max_response_length = 1000;
    REQUIRE(compose_episode_reward(env::GameResult::Draw, 0, {1000}, cfg) == -2.0);
    REQUIRE_THROWS_AS(compose_episode_reward(env::GameResult::Ongoing, 0, {}, cfg),
                      ContractError);
}

TEST_CASE("sokoban defaults treat timeout as failure, games as neutral") {
    const auto soko = RewardConfig::defaults_for(env::EnvKind::Sokoban);
    REQUIRE(task_reward(env::GameResult::Timeout, soko) == -10.0);
    const auto ttt = RewardConfig::defaults_for(env::EnvKind::TicTacToe);
    REQUIRE(task_reward(env::GameResult::Timeout, ttt) == 0.0);
    REQUIRE(ttt.length_coeff == 2.0);
    REQUIRE(soko.length_coeff == 1.0);
}

TEST_CASE("differential meta-reward examples") {
    REQUIRE(differential_meta_reward({10.0}) == std::vector<double>{10.0});
    REQUIRE(differential_meta_reward({-10.0, 10.0, 10.0}) ==
            std::vector<double>{-10.0, 20.0, 0.0});
}

TEST_CASE("differential meta-reward telescopes exactly on dyadic inputs") {
    Rng rng(17);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + rng.next_index(5);
        std::vector<double> returns(n);
        for (double& r : returns) r = random_dyadic(rng);
        const auto diffs = differential_meta_reward(returns);
        double sum = 0.0;
        for (double d : diffs) sum += d;
        REQUIRE(sum == returns.back());  // exact, not approximate
    }
}

TEST_CASE("sparse step rewards") {
    REQUIRE(stepwise_rewards(20.0, 3) == std::vector<double>{0.0, 0.0, 20.0});
    REQUIRE(stepwise_rewards(0.0, 1) == std::vector<double>{0.0});
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const double r = random_dyadic(rng);
        const auto v = stepwise_rewards(r, 1 + rng.next_index(10));
        double sum = 0.0;
        for (double x : v) sum += x;
        REQUIRE(sum == r);
    }
}

TEST_CASE("single-episode geometric discount") {
    ReturnConfig cfg;
    cfg.gamma_step = 0.95;
    const auto v = stepwise_returns({10.0}, {2}, cfg);
    REQUIRE_THAT(v.step_returns[0][0], Catch::Matchers::WithinAbs(9.5, 1e-12));
    REQUIRE_THAT(v.step_returns[0][1], Catch::Matchers::WithinAbs(10.0, 1e-12));
}

TEST_CASE("two-episode worked example under the first-step G0 convention") {
    ReturnConfig cfg;
    cfg.gamma_step = 0.95;
    cfg.gamma_traj = 0.6;
    // episode returns (0, 10) are already the differential rewards here
    const auto v = stepwise_returns({0.0, 10.0}, {3, 3}, cfg);
    REQUIRE_THAT(v.step_returns[1][0], Catch::Matchers::WithinAbs(9.025, 1e-12));
    for (int t = 0; t < 3; ++t)
        REQUIRE_THAT(v.step_returns[0][t], Catch::Matchers::WithinAbs(5.415, 1e-12));
}

TEST_CASE("recursive returns match the brute-force double summation") {
    Rng rng(29);
    for (int trial = 0; trial < 10000; ++trial) {
        ReturnConfig cfg;
        cfg.gamma_step = 0.5 + rng.next_unit() * 0.5;
        cfg.gamma_traj = rng.next_unit();
        cfg.variant = static_cast<ReturnVariant>(rng.next_index(3));
        cfg.g0_extra_step_discount = rng.next_index(2) == 1;
        const int n = 1 + rng.next_index(5);
        std::vector<double> returns(n);
        std::vector<int> steps(n);
        for (int i = 0; i < n; ++i) {
            returns[i] = random_dyadic(rng);
            steps[i] = 1 + rng.next_index(10);
        }
        const auto got = stepwise_returns(returns, steps, cfg);
        const auto want = brute_force_returns(got.meta_rewards, steps, cfg);
        for (int i = 0; i < n; ++i)
            for (std::size_t t = 0; t < want[i].size(); ++t)
                REQUIRE_THAT(got.step_returns[i][t],
                             Catch::Matchers::WithinAbs(want[i][t], 1e-12));
    }
}

TEST_CASE("zero trajectory discount drops the cross-episode term") {
    ReturnConfig diff;
    diff.gamma_traj = 0.0;
    const auto v = stepwise_returns({4.0, -2.0, 8.0}, {2, 3, 1}, diff);
    for (int n = 0; n < 3; ++n)
        for (std::size_t t = 0; t < v.step_returns[n].size(); ++t)
            REQUIRE_THAT(v.step_returns[n][t],
                         Catch::Matchers::WithinAbs(
                             std::pow(0.95, v.step_returns[n].size() - 1 - t) * v.meta_rewards[n],
                             1e-12));

    // cumulative with zero cross term coincides with the single-episode variant
    ReturnConfig cum = diff;
    cum.variant = ReturnVariant::Cumulative;
    ReturnConfig single;
    single.variant = ReturnVariant::SingleEpisode;
    const auto a = stepwise_returns({4.0, -2.0, 8.0}, {2, 3, 1}, cum);
    const auto b = stepwise_returns({4.0, -2.0, 8.0}, {2, 3, 1}, single);
    REQUIRE(a.step_returns == b.step_returns);
}

TEST_CASE("monotone sensitivity: raising the final return raises every step return") {
    ReturnConfig cfg;  // differential, gamma_traj = 0.6
    const std::vector<int> steps{2, 3, 2};
    const auto base = stepwise_returns({4.0, -2.0, 6.0}, steps, cfg);
    const auto bumped = stepwise_returns({4.0, -2.0, 8.0}, steps, cfg);
    for (int n = 0; n < 3; ++n)
        for (std::size_t t = 0; t < base.step_returns[n].size(); ++t)
            REQUIRE(bumped.step_returns[n][t] > base.step_returns[n][t]);
}

TEST_CASE("variant selection changes the meta-rewards") {
    ReturnConfig cfg;
    cfg.variant = ReturnVariant::Cumulative;
    const auto cum = stepwise_returns({4.0, 6.0}, {1, 1}, cfg);
    REQUIRE(cum.meta_rewards == std::vector<double>{4.0, 6.0});
    cfg.variant = ReturnVariant::Differential;
    const auto diff = stepwise_returns({4.0, 6.0}, {1, 1}, cfg);
    REQUIRE(diff.meta_rewards == std::vector<double>{4.0, 2.0});
}

TEST_CASE("return config validation") {
    ReturnConfig bad;
    bad.gamma_step = 0.0;
    REQUIRE_THROWS_AS(stepwise_returns({1.0}, {1}, bad), ConfigError);
    REQUIRE_THROWS_AS(stepwise_returns({}, {}, ReturnConfig{}), ContractError);
    REQUIRE_THROWS_AS(stepwise_returns({1.0}, {0}, ReturnConfig{}), ContractError);
}
