#include <catch2/catch_amalgamated.hpp>

#include "mage/env/env.hpp"
#include "mage/env/sokoban.hpp"

using namespace mage;
using namespace mage::env;
namespace soko = mage::env::sokoban;

namespace {

SokobanRoom from_text(const std::string& text) { return soko::parse(text); }

void check_balanced(const SokobanRoom& room) {
    int boxes = 0, targets = 0, players = 0;
    for (SokobanCell c : room.grid) {
        boxes += soko::has_box(c);
        targets += soko::is_target_cell(c);
        players += soko::has_player(c);
    }
    REQUIRE(players == 1);
    REQUIRE(boxes == room.num_boxes);
    REQUIRE(targets == room.num_boxes);
}

}  // namespace

TEST_CASE("generated rooms are certified solvable within the step bound") {
    for (std::uint64_t seed : {0, 1, 2, 7, 11, 23}) {
        const SokobanRoom room = soko::generate_room(6, 2, 100, 21, seed);
        check_balanced(room);
        const auto solution = soko::solve_bfs(room, 21);
        REQUIRE(solution.has_value());
        REQUIRE(solution->size() <= 21);
        REQUIRE_FALSE(soko::is_solved(room));
    }
}

TEST_CASE("out-of-distribution box counts generate as well") {
    const SokobanRoom one = soko::generate_room(6, 1, 100, 21, 1);
    REQUIRE(one.num_boxes == 1);
    check_balanced(one);
    const SokobanRoom three = soko::generate_room(6, 3, 100, 21, 2);
    REQUIRE(three.num_boxes == 3);
    check_balanced(three);
}

TEST_CASE("generation is deterministic in the seed") {
    REQUIRE(soko::generate_room(6, 2, 100, 21, 5) == soko::generate_room(6, 2, 100, 21, 5));
}

TEST_CASE("invalid parameters are rejected") {
    REQUIRE_THROWS_AS(soko::generate_room(3, 1, 100, 21, 0), ConfigError);
    REQUIRE_THROWS_AS(soko::generate_room(6, 0, 100, 21, 0), ConfigError);
    REQUIRE_THROWS_AS(soko::generate_room(6, 3, 100, 2, 0), ConfigError);
    EnvConfig cfg{EnvKind::Sokoban};
    cfg.sokoban_boxes = 9;  // over floor-area/4 for a 6x6 interior
    REQUIRE_THROWS_AS(Environment(cfg), ConfigError);
}

TEST_CASE("render and parse round-trip, including the box-on-target glyph") {
    const std::string text =
        "######\n"
        "#_P__#\n"
        "#_X__#\n"
        "#_O_√#\n"
        "#____#\n"
        "######";
    SokobanRoom room = from_text(text);
    room.num_boxes = 2;
    REQUIRE(soko::render(room) == text);
    REQUIRE(room.at(3, 4) == SokobanCell::BoxOnTarget);
    REQUIRE(soko::boxes_on_target(room) == 1);
}

TEST_CASE("pushing a box onto the last target solves the room") {
    SokobanRoom room = from_text(
        "#####\n"
        "#P__#\n"
        "#X__#\n"
        "#O__#\n"
        "#####");
    room.num_boxes = 1;
    REQUIRE(soko::apply_move(room, Dir::Down));
    REQUIRE(soko::is_solved(room));
    REQUIRE(room.at(3, 1) == SokobanCell::BoxOnTarget);
    REQUIRE(room.at(2, 1) == SokobanCell::Player);
    REQUIRE(room.steps_taken == 1);
}

TEST_CASE("blocked moves leave the room unchanged") {
    SokobanRoom room = from_text(
        "#####\n"
        "#P__#\n"
        "#X__#\n"
        "#X__#\n"
        "#####");
    room.num_boxes = 2;
    const SokobanRoom before = room;
    REQUIRE_FALSE(soko::apply_move(room, Dir::Up));    // wall
    REQUIRE_FALSE(soko::apply_move(room, Dir::Down));  // box behind box
    REQUIRE(room == before);
}

TEST_CASE("corner and 2x2 freezes are deadlocks; boxes on targets are not") {
    SokobanRoom corner = from_text(
        "####\n"
        "#XP#\n"
        "#_O#\n"
        "####");
    corner.num_boxes = 1;
    REQUIRE(soko::is_deadlocked(corner));

    SokobanRoom solved_corner = from_text(
        "####\n"
        "#√P#\n"
        "#__#\n"
        "####");
    solved_corner.num_boxes = 1;
    REQUIRE_FALSE(soko::is_deadlocked(solved_corner));

    SokobanRoom pair = from_text(
        "######\n"
        "#____#\n"
        "#XX_P#\n"
        "#XX__#\n"
        "#_OOO#\n"
        "######");
    pair.num_boxes = 4;
    REQUIRE(soko::is_deadlocked(pair));  // 2x2 block of boxes off target
}

TEST_CASE("environment counts blocked moves as invalid and enforces the move budget") {
    EnvConfig cfg{EnvKind::Sokoban};
    cfg.sokoban_size = 6;
    cfg.sokoban_boxes = 1;
    Environment env(cfg);
    env.reset(3);
    int moves = 0;
    StepOutcome out;
    while (!env.terminal()) {
        out = env.step(Action::sokoban({Dir::Up}));  // bang the head against the top
        ++moves;
        REQUIRE(moves <= 21);
    }
    // an all-invalid run must end by timeout or an accidental deadlock push
    REQUIRE((out.result == GameResult::Timeout || out.result == GameResult::Loss));
    REQUIRE(env.invalid_count() >= 1);
}

TEST_CASE("a full three-move action consumes one turn") {
    EnvConfig cfg{EnvKind::Sokoban};
    Environment env(cfg);
    const Observation first = env.reset(0);
    REQUIRE(first.turn_index == 1);
    const StepOutcome out = env.step(Action::sokoban({Dir::Up, Dir::Up, Dir::Up}));
    if (!out.terminal) REQUIRE(out.next_obs.turn_index == 2);
    REQUIRE(out.invalid_moves <= 3);
}

TEST_CASE("admissible actions are the four directions") {
    EnvConfig cfg{EnvKind::Sokoban};
    Environment env(cfg);
    env.reset(9);
    const auto actions = env.admissible();
    REQUIRE(actions.size() == 4);
    REQUIRE(actions[0] == Action::sokoban({Dir::Up}));
    REQUIRE(actions[3] == Action::sokoban({Dir::Right}));
}
