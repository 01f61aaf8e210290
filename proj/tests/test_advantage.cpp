#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "mage/advantage/advantage.hpp"
#include "mage/common/rng.hpp"
#include "mage/env/sokoban.hpp"

using namespace mage;
using namespace mage::adv;

namespace {

std::vector<AdvantageRecord> random_batch(Rng& rng, int n, int num_opponents, int num_anchors) {
    std::vector<AdvantageRecord> out;
    for (int i = 0; i < n; ++i) {
        AdvantageRecord r;
        r.meta_episode_id = i / 6;
        r.episode_index = 1 + rng.next_index(3);
        r.step = 1 + rng.next_index(4);
        r.opponent_id = "opp_" + std::to_string(rng.next_index(num_opponents));
        r.anchor = 1000 + rng.next_index(num_anchors);
        r.raw_return = (rng.next_unit() - 0.5) * 40.0;
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("mean normalization subtracts the group mean") {
    REQUIRE(normalize({2, 4, 6}, NormMode::MeanNorm) == std::vector<double>{-2, 0, 2});
}

TEST_CASE("singleton groups normalize to zero under both modes") {
    REQUIRE(normalize({5}, NormMode::MeanNorm) == std::vector<double>{0});
    REQUIRE(normalize({5}, NormMode::ZNorm) == std::vector<double>{0});
}

TEST_CASE("z-normalization uses the population deviation and sums to zero") {
    const auto adv = normalize({0, 0, 10}, NormMode::ZNorm);
    // population mean 10/3, std sqrt(200/9)
    const double std_dev = std::sqrt(200.0 / 9.0);
    REQUIRE_THAT(adv[2], Catch::Matchers::WithinAbs((10.0 - 10.0 / 3.0) / std_dev, 1e-12));
    REQUIRE_THAT(adv[0] + adv[1] + adv[2], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("group advantages are mean-zero, shift-invariant, and order-preserving") {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + rng.next_index(30);
        std::vector<double> values(n);
        for (double& v : values) v = (rng.next_unit() - 0.5) * 60.0;
        const NormMode mode = rng.next_index(2) ? NormMode::MeanNorm : NormMode::ZNorm;
        const auto adv = normalize(values, mode);

        double sum = 0.0;
        for (double a : adv) sum += a;
        REQUIRE(std::abs(sum) <= 1e-12 * n);

        // shift invariance
        std::vector<double> shifted = values;
        const double c = (rng.next_unit() - 0.5) * 100.0;
        for (double& v : shifted) v += c;
        const auto adv_shifted = normalize(shifted, mode);
        for (int i = 0; i < n; ++i)
            REQUIRE_THAT(adv_shifted[i], Catch::Matchers::WithinAbs(adv[i], 1e-9));

        // monotone transform: no inversions
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (values[i] < values[j]) REQUIRE(adv[i] <= adv[j]);
    }
}

TEST_CASE("stationary grouping never mixes opponents") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto records = random_batch(rng, 60, 3, 5);
        const auto groups = group_records(records, Grouping::Stationary,
                                          GroupScope::StepGlobalAnchor);
        for (const auto& [key, members] : groups) {
            std::set<std::string> ids;
            for (std::size_t m : members) ids.insert(records[m].opponent_id);
            REQUIRE(ids.size() == 1);
            REQUIRE(key.opponent_id == *ids.begin());
        }
    }
}

TEST_CASE("non-stationary grouping pools across opponents") {
    Rng rng(11);
    auto records = random_batch(rng, 200, 3, 2);
    const auto groups = group_records(records, Grouping::NonStationary,
                                      GroupScope::StepGlobalAnchor);
    bool mixed = false;
    for (const auto& [key, members] : groups) {
        REQUIRE(key.opponent_id.empty());
        std::set<std::string> ids;
        for (std::size_t m : members) ids.insert(records[m].opponent_id);
        mixed = mixed || ids.size() > 1;
    }
    REQUIRE(mixed);
}

TEST_CASE("per-episode anchors split groups by episode index") {
    Rng rng(13);
    auto records = random_batch(rng, 120, 1, 2);
    const auto global = group_records(records, Grouping::Stationary,
                                      GroupScope::StepGlobalAnchor);
    const auto local = group_records(records, Grouping::Stationary,
                                     GroupScope::StepPerEpisodeAnchor);
    REQUIRE(local.size() > global.size());
    for (const auto& [key, members] : local) {
        REQUIRE(key.episode_index.has_value());
        for (std::size_t m : members) REQUIRE(records[m].episode_index == *key.episode_index);
    }
}

TEST_CASE("global and per-episode anchors agree when every anchor sits in one episode") {
    // construct a batch where each anchor value appears in exactly one episode index
    std::vector<AdvantageRecord> records;
    Rng rng(17);
    for (int i = 0; i < 90; ++i) {
        AdvantageRecord r;
        r.meta_episode_id = i % 8;
        r.episode_index = 1 + (i % 3);
        r.anchor = 100 + static_cast<std::uint64_t>(r.episode_index) * 50 + rng.next_index(4);
        r.opponent_id = "only";
        r.raw_return = (rng.next_unit() - 0.5) * 20.0;
        records.push_back(r);
    }
    auto a = records, b = records;
    normalize_groups(a, group_records(a, Grouping::Stationary, GroupScope::StepGlobalAnchor),
                     NormMode::MeanNorm);
    normalize_groups(b, group_records(b, Grouping::Stationary, GroupScope::StepPerEpisodeAnchor),
                     NormMode::MeanNorm);
    for (std::size_t i = 0; i < a.size(); ++i)
        REQUIRE_THAT(a[i].advantage, Catch::Matchers::WithinAbs(b[i].advantage, 1e-15));
}

TEST_CASE("combine adds the weighted step component") {
    REQUIRE(combine_advantages({1, 2}, {10, -10}, 0.0) == std::vector<double>{1, 2});
    REQUIRE(combine_advantages({1, 2}, {10, -10}, 1.0) == std::vector<double>{11, -8});
    REQUIRE_THROWS_AS(combine_advantages({1}, {1, 2}, 1.0), ContractError);
}

TEST_CASE("constant returns annihilate to zero advantages") {
    const auto adv = normalize({3, 3, 3, 3}, NormMode::MeanNorm);
    for (double a : adv) REQUIRE(a == 0.0);
    const auto z = normalize({3, 3, 3, 3}, NormMode::ZNorm);
    for (double a : z) REQUIRE(a == 0.0);
}

TEST_CASE("anchor keys are deterministic and collision-free over a million states") {
    // equal states agree
    env::TicTacToeBoard b1, b2;
    b1.set(2, 2, env::Mark::X);
    b2.set(2, 2, env::Mark::X);
    b1.to_move = b2.to_move = env::Mark::O;
    REQUIRE(anchor_key(env::StructuredState{b1}) == anchor_key(env::StructuredState{b2}));
    b2.to_move = env::Mark::X;
    REQUIRE(anchor_key(env::StructuredState{b1}) != anchor_key(env::StructuredState{b2}));

    // Kuhn info sets from different episodes share a key
    env::KuhnView v1{0, env::KuhnCard::Q, "b", std::nullopt};
    env::KuhnView v2{0, env::KuhnCard::Q, "b", std::nullopt};
    REQUIRE(anchor_key(env::StructuredState{v1}) == anchor_key(env::StructuredState{v2}));

    // one million distinct synthetic grids, zero observed collisions
    std::set<std::uint64_t> seen;
    env::SokobanRoom room;
    room.size = 10;
    room.grid.assign(100, env::SokobanCell::Floor);
    int collisions = 0;
    for (int i = 0; i < 1000000; ++i) {
        // walk a distinct grid pattern from the counter bits
        int x = i;
        for (int cell = 0; cell < 32 && x; ++cell, x >>= 1)
            room.grid[cell] = x & 1 ? env::SokobanCell::Box : env::SokobanCell::Floor;
        room.grid[40 + i % 30] = env::SokobanCell::Player;
        room.steps_taken = i;  // not hashed; grids must differ by cells
        room.grid[70 + (i / 30) % 25] = env::SokobanCell::Target;
        const std::uint64_t key = anchor_key(env::StructuredState{room});
        collisions += !seen.insert(key).second;
        room.grid[40 + i % 30] = env::SokobanCell::Floor;
        room.grid[70 + (i / 30) % 25] = env::SokobanCell::Floor;
    }
    REQUIRE(collisions == 0);
}
