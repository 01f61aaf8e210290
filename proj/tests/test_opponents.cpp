#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "mage/opponents/pool.hpp"

using namespace mage;
using namespace mage::env;
using namespace mage::opp;

namespace {

TicTacToeBoard board_from(const std::string& text, Mark to_move) {
    TicTacToeBoard b = ttt::parse(text);
    b.to_move = to_move;
    return b;
}

/// Tactical positions where the mover either wins immediately or must block.
/// Returns (board, minimax-optimal moves for the mover).
std::vector<TicTacToeBoard> tactical_suite() {
    std::vector<TicTacToeBoard> suite;
    // mover has two in a row: completing wins
    suite.push_back(board_from("X X .\nO O .\n. . .", Mark::X));
    suite.push_back(board_from("X . .\nX O .\n. O .", Mark::X));
    suite.push_back(board_from("O . X\n. O X\n. . .", Mark::X));
    suite.push_back(board_from("X O .\nX O .\n. . .", Mark::O));
    suite.push_back(board_from(". . X\nO O X\n. . .", Mark::O));
    // opponent threatens: mover must block
    suite.push_back(board_from("X X .\nO . .\n. . .", Mark::O));
    suite.push_back(board_from("X . .\n. X O\n. . .", Mark::O));
    suite.push_back(board_from("O . .\nO X .\n. . X", Mark::X));
    suite.push_back(board_from(". O .\nX O .\nX . .", Mark::O));
    suite.push_back(board_from(". . O\n. X X\nO . .", Mark::O));
    return suite;
}

}  // namespace

TEST_CASE("minimax: the empty game is a draw") {
    REQUIRE(minimax_value(TicTacToeBoard{}).value == 0);
}

TEST_CASE("minimax: a double threat is a forced win") {
    // X at (1,1),(2,2) vs O at (1,2), X to move
    TicTacToeBoard b = board_from("X O .\n. X .\n. . .", Mark::X);
    REQUIRE(minimax_value(b).value == 1);
}

TEST_CASE("minimax: terminal boards score the winner") {
    TicTacToeBoard b = board_from("X X X\nO O .\n. . .", Mark::O);
    const auto r = minimax_value(b);
    REQUIRE(r.value == 1);
    REQUIRE_FALSE(r.best.has_value());
}

TEST_CASE("minimax: ties break in row-major order") {
    const auto r = minimax_value(TicTacToeBoard{});
    REQUIRE(r.best.has_value());
    REQUIRE(*r.best == TttMove{1, 1});  // every empty-board move draws
}

TEST_CASE("mcts completes its own line and blocks threats on the tactical suite") {
    for (const auto& b : tactical_suite()) {
        Rng rng(99);
        const TttMove pick = mcts_select(b, 1000, rng);
        const int best = minimax_value(b).value;
        const int mover_best = b.to_move == Mark::X ? best : -best;
        REQUIRE(minimax_move_value(b, pick) == mover_best);
    }
}

TEST_CASE("mcts with a single simulation still returns a legal move") {
    Rng rng(0);
    const TttMove pick = mcts_select(TicTacToeBoard{}, 1, rng);
    REQUIRE(ttt::is_legal(TicTacToeBoard{}, pick));
}

TEST_CASE("mcts is deterministic given the rng stream") {
    const auto b = board_from("X . .\n. O .\n. . .", Mark::X);
    Rng r1(7), r2(7);
    REQUIRE(mcts_select(b, 300, r1) == mcts_select(b, 300, r2));
}

TEST_CASE("preferred pattern follows its ordering") {
    REQUIRE(preferred_pattern_act(0, TicTacToeBoard{}) == TttMove{2, 2});
    TicTacToeBoard center_taken;
    center_taken.set(2, 2, Mark::X);
    center_taken.to_move = Mark::O;
    REQUIRE(preferred_pattern_act(0, center_taken) == TttMove{1, 1});
    REQUIRE(preferred_pattern_act(1, TicTacToeBoard{}) == TttMove{1, 1});
    REQUIRE_THROWS_AS(preferred_pattern_act(2, TicTacToeBoard{}), ConfigError);
}

TEST_CASE("kuhn archetypes follow their definitions") {
    const auto conservative = kuhn_style_behavior(KuhnStyle::Conservative);
    const auto aggressive = kuhn_style_behavior(KuhnStyle::Aggressive);
    Rng rng(1);
    // conservative holding J facing a bet folds
    KuhnView v{1, KuhnCard::J, "b", std::nullopt};
    REQUIRE(act_behavior(conservative, v, rng) == KuhnAction::Pass);
    // aggressive holding J first to act bets
    KuhnView first{0, KuhnCard::J, "", std::nullopt};
    REQUIRE(act_behavior(aggressive, first, rng) == KuhnAction::Bet);
    // conservative bets its king
    KuhnView king{0, KuhnCard::K, "", std::nullopt};
    REQUIRE(act_behavior(conservative, king, rng) == KuhnAction::Bet);
}

TEST_CASE("intermediate mixing frequencies match the declared probabilities") {
    const auto intermediate = kuhn_style_behavior(KuhnStyle::Intermediate);
    Rng rng(123);
    const int n = 100000;
    int bets = 0;
    KuhnView q_first{0, KuhnCard::Q, "", std::nullopt};
    for (int i = 0; i < n; ++i)
        bets += act_behavior(intermediate, q_first, rng) == KuhnAction::Bet;
    REQUIRE(std::abs(bets / static_cast<double>(n) - 0.5) < 0.01);

    int calls = 0;
    KuhnView j_facing{1, KuhnCard::J, "b", std::nullopt};
    for (int i = 0; i < n; ++i)
        calls += act_behavior(intermediate, j_facing, rng) == KuhnAction::Bet;
    REQUIRE(calls == 0);
}

TEST_CASE("opponent ids are unique per archetype and parameters") {
    std::vector<OpponentSpec> specs = {
        {Archetype::MctsTTT, 100, 0}, {Archetype::MctsTTT, 1000, 4},
        {Archetype::PreferredPattern, 0, 0}, {Archetype::PreferredPattern, 1, 0},
        {Archetype::RandomTTT, 0, 0}, {Archetype::KuhnConservative, 0, 0},
        {Archetype::KuhnAggressive, 0, 0}, {Archetype::KuhnIntermediate, 0, 0},
        {Archetype::KuhnCFR, 100000, 0}, {Archetype::RandomKuhn, 0, 0},
        {Archetype::None, 0, 0},
    };
    std::map<std::string, int> ids;
    for (const auto& s : specs) ++ids[s.id()];
    REQUIRE(ids.size() == specs.size());
    // seeds do not alter the id: grouping is by archetype and parameters
    REQUIRE(OpponentSpec{Archetype::MctsTTT, 100, 1}.id() ==
            OpponentSpec{Archetype::MctsTTT, 100, 2}.id());
}

TEST_CASE("population sampling matches its weights") {
    PopulationConfig pop;
    pop.entries = {
        {OpponentSpec{Archetype::KuhnConservative, 0, 0}, 0.25},
        {OpponentSpec{Archetype::KuhnAggressive, 0, 0}, 0.25},
        {OpponentSpec{Archetype::KuhnIntermediate, 0, 0}, 0.5},
    };
    Rng rng(7);
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[sample_opponent(pop, rng).id()];
    REQUIRE(std::abs(counts["kuhn_conservative"] / double(n) - 0.25) < 0.01);
    REQUIRE(std::abs(counts["kuhn_aggressive"] / double(n) - 0.25) < 0.01);
    REQUIRE(std::abs(counts["kuhn_intermediate"] / double(n) - 0.5) < 0.01);
}

TEST_CASE("single-entry populations always return that spec") {
    PopulationConfig pop;
    pop.entries = {{OpponentSpec{Archetype::RandomKuhn, 0, 0}, 1.0}};
    Rng rng(0);
    for (int i = 0; i < 100; ++i)
        REQUIRE(sample_opponent(pop, rng).id() == "kuhn_random");
}

TEST_CASE("invalid populations are rejected") {
    PopulationConfig empty;
    REQUIRE_THROWS_AS(empty.validate(), ConfigError);
    PopulationConfig bad;
    bad.entries = {{OpponentSpec{Archetype::RandomKuhn, 0, 0}, 0.5}};
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("archetype replay under equal seeds is identical") {
    const auto intermediate = kuhn_style_behavior(KuhnStyle::Intermediate);
    auto run = [&] {
        Rng rng(11);
        std::vector<KuhnAction> actions;
        for (int i = 0; i < 50; ++i) {
            KuhnView v{0, static_cast<KuhnCard>(i % 3), i % 2 ? "b" : "", std::nullopt};
            actions.push_back(act_behavior(intermediate, v, rng));
        }
        return actions;
    };
    REQUIRE(run() == run());
}
