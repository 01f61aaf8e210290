#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "mage/common/rng.hpp"
#include "mage/env/types.hpp"

namespace mage::env::sokoban {

inline constexpr int kRowDelta[4] = {-1, 1, 0, 0};  // up, down, left, right
inline constexpr int kColDelta[4] = {0, 0, -1, 1};

inline bool has_box(SokobanCell c) { return c == SokobanCell::Box || c == SokobanCell::BoxOnTarget; }
inline bool has_player(SokobanCell c) {
    return c == SokobanCell::Player || c == SokobanCell::PlayerOnTarget;
}
inline bool is_target_cell(SokobanCell c) {
    return c == SokobanCell::Target || c == SokobanCell::BoxOnTarget ||
           c == SokobanCell::PlayerOnTarget;
}
inline bool is_free_for_player(SokobanCell c) {
    return c == SokobanCell::Floor || c == SokobanCell::Target;
}

inline SokobanCell without_occupant(SokobanCell c) {
    if (c == SokobanCell::Box || c == SokobanCell::Player) return SokobanCell::Floor;
    if (c == SokobanCell::BoxOnTarget || c == SokobanCell::PlayerOnTarget)
        return SokobanCell::Target;
    return c;
}

inline SokobanCell with_box(SokobanCell base) {
    return base == SokobanCell::Target ? SokobanCell::BoxOnTarget : SokobanCell::Box;
}

inline SokobanCell with_player(SokobanCell base) {
    return base == SokobanCell::Target ? SokobanCell::PlayerOnTarget : SokobanCell::Player;
}

inline std::pair<int, int> player_pos(const SokobanRoom& room) {
    for (int r = 0; r < room.size; ++r)
        for (int c = 0; c < room.size; ++c)
            if (has_player(room.at(r, c))) return {r, c};
    throw ContractError("sokoban: no player cell");
}

inline int boxes_on_target(const SokobanRoom& room) {
    int n = 0;
    for (SokobanCell c : room.grid) n += c == SokobanCell::BoxOnTarget;
    return n;
}

inline bool is_solved(const SokobanRoom& room) { return boxes_on_target(room) == room.num_boxes; }

/// Applies one player move. Returns false (leaving the room untouched) when
/// the move is blocked by a wall, an unpushable box, or the grid edge.
inline bool apply_move(SokobanRoom& room, Dir d) {
    const auto [pr, pc] = player_pos(room);
    const int dr = kRowDelta[static_cast<int>(d)], dc = kColDelta[static_cast<int>(d)];
    const int nr = pr + dr, nc = pc + dc;
    if (!room.in_bounds(nr, nc)) return false;
    const SokobanCell dest = room.at(nr, nc);
    if (dest == SokobanCell::Wall) return false;
    if (has_box(dest)) {
        const int br = nr + dr, bc = nc + dc;
        if (!room.in_bounds(br, bc)) return false;
        const SokobanCell beyond = room.at(br, bc);
        if (!is_free_for_player(beyond)) return false;  // wall or another box
        room.set(br, bc, with_box(beyond));
    }
    room.set(nr, nc, with_player(without_occupant(dest)));
    room.set(pr, pc, without_occupant(room.at(pr, pc)));
    ++room.steps_taken;
    return true;
}

/// A box off target is frozen when it sits in a wall corner or inside a 2x2
/// block of walls/boxes. Either situation makes the room unwinnable.
inline bool is_deadlocked(const SokobanRoom& room) {
    auto solid = [&](int r, int c) {
        return !room.in_bounds(r, c) || room.at(r, c) == SokobanCell::Wall ||
               has_box(room.at(r, c));
    };
    auto wall = [&](int r, int c) {
        return !room.in_bounds(r, c) || room.at(r, c) == SokobanCell::Wall;
    };
    for (int r = 0; r < room.size; ++r) {
        for (int c = 0; c < room.size; ++c) {
            if (room.at(r, c) != SokobanCell::Box) continue;  // on-target boxes are fine
            const bool corner = (wall(r - 1, c) || wall(r + 1, c)) && (wall(r, c - 1) || wall(r, c + 1));
            if (corner) return true;
            for (int dr : {-1, 1})
                for (int dc : {-1, 1})
                    if (solid(r + dr, c) && solid(r, c + dc) && solid(r + dr, c + dc)) return true;
        }
    }
    return false;
}

// ------------------------------------------------------------------ rendering

/// Appendix-style symbols: # wall, _ floor, O target, X box, P player,
/// "√" box-on-target, S player-on-target.
inline std::string cell_symbol(SokobanCell c) {
    switch (c) {
        case SokobanCell::Wall: return "#";
        case SokobanCell::Floor: return "_";
        case SokobanCell::Target: return "O";
        case SokobanCell::Box: return "X";
        case SokobanCell::Player: return "P";
        case SokobanCell::BoxOnTarget: return "√";
        case SokobanCell::PlayerOnTarget: return "S";
    }
    return "?";
}

inline std::string render(const SokobanRoom& room) {
    std::string out;
    for (int r = 0; r < room.size; ++r) {
        if (r) out += '\n';
        for (int c = 0; c < room.size; ++c) out += cell_symbol(room.at(r, c));
    }
    return out;
}

inline SokobanRoom parse(const std::string& text) {
    std::vector<std::vector<SokobanCell>> rows;
    rows.emplace_back();
    for (std::size_t i = 0; i < text.size();) {
        const char ch = text[i];
        if (ch == '\n') {
            rows.emplace_back();
            ++i;
            continue;
        }
        SokobanCell cell;
        if (ch == '#') cell = SokobanCell::Wall;
        else if (ch == '_') cell = SokobanCell::Floor;
        else if (ch == 'O') cell = SokobanCell::Target;
        else if (ch == 'X') cell = SokobanCell::Box;
        else if (ch == 'P') cell = SokobanCell::Player;
        else if (ch == 'S') cell = SokobanCell::PlayerOnTarget;
        else if (text.compare(i, 3, "√") == 0) {
            cell = SokobanCell::BoxOnTarget;
            i += 3;
            rows.back().push_back(cell);
            continue;
        } else {
            throw ConfigError("sokoban parse: unexpected character");
        }
        rows.back().push_back(cell);
        ++i;
    }
    while (!rows.empty() && rows.back().empty()) rows.pop_back();
    if (rows.empty()) throw ConfigError("sokoban parse: empty grid");
    SokobanRoom room;
    room.size = static_cast<int>(rows.size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != room.size)
            throw ConfigError("sokoban parse: grid is not square");
        for (SokobanCell c : row) room.grid.push_back(c);
    }
    int boxes = 0;
    for (SokobanCell c : room.grid) boxes += has_box(c);
    room.num_boxes = boxes;
    return room;
}

// --------------------------------------------------------------------- solver

namespace detail {

inline std::uint64_t state_key(int player, const std::vector<int>& boxes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](int v) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 0x100000001b3ull;
    };
    mix(player);
    for (int b : boxes) mix(b);
    return h;
}

}  // namespace detail

/// Breadth-first search over (player, boxes) states counting player moves.
/// Returns the move sequence of a shortest solution, or nullopt if none
/// exists within `max_steps` moves.
inline std::optional<std::vector<Dir>> solve_bfs(const SokobanRoom& start, int max_steps,
                                                 std::size_t max_states = 2'000'000) {
    struct Node {
        SokobanRoom room;
        int depth;
        std::int64_t parent;
        Dir move;
    };
    if (is_solved(start)) return std::vector<Dir>{};
    auto canonical_boxes = [](const SokobanRoom& room) {
        std::vector<int> boxes;
        for (int i = 0; i < room.size * room.size; ++i)
            if (has_box(room.grid[i])) boxes.push_back(i);
        return boxes;
    };
    std::vector<Node> nodes;
    std::map<std::uint64_t, int> seen;
    auto push = [&](SokobanRoom room, int depth, std::int64_t parent, Dir move) -> bool {
        const auto [pr, pc] = player_pos(room);
        const std::uint64_t key = detail::state_key(pr * room.size + pc, canonical_boxes(room));
        if (seen.count(key)) return false;
        seen[key] = 1;
        nodes.push_back({std::move(room), depth, parent, move});
        return true;
    };
    push(start, 0, -1, Dir::Up);
    for (std::size_t head = 0; head < nodes.size() && nodes.size() < max_states; ++head) {
        const int depth = nodes[head].depth;
        if (depth >= max_steps) continue;
        for (int d = 0; d < 4; ++d) {
            SokobanRoom next = nodes[head].room;
            if (!apply_move(next, static_cast<Dir>(d))) continue;
            const bool solved = is_solved(next);
            if (!push(std::move(next), depth + 1, static_cast<std::int64_t>(head),
                      static_cast<Dir>(d)))
                continue;
            if (solved) {
                std::vector<Dir> path;
                for (std::int64_t at = static_cast<std::int64_t>(nodes.size()) - 1;
                     nodes[at].parent >= 0; at = nodes[at].parent)
                    path.push_back(nodes[at].move);
                std::reverse(path.begin(), path.end());
                return path;
            }
        }
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ generator

namespace detail {

/// Carves a random-walk floor area into an all-wall interior.
inline SokobanRoom carve_topology(int size, Rng& rng) {
    SokobanRoom room;
    room.size = size;
    room.grid.assign(static_cast<std::size_t>(size) * size, SokobanCell::Wall);
    int r = 1 + rng.next_index(size - 2);
    int c = 1 + rng.next_index(size - 2);
    const int target_floor = std::max(4, (size - 2) * (size - 2) * 3 / 4);
    int carved = 0;
    const int walk_budget = size * size * 8;
    for (int step = 0; step < walk_budget && carved < target_floor; ++step) {
        if (room.at(r, c) == SokobanCell::Wall) {
            room.set(r, c, SokobanCell::Floor);
            ++carved;
        }
        const int d = rng.next_index(4);
        const int nr = r + kRowDelta[d], nc = c + kColDelta[d];
        if (nr >= 1 && nr < size - 1 && nc >= 1 && nc < size - 1) {
            r = nr;
            c = nc;
        }
    }
    return room;
}

struct PullState {
    std::pair<int, int> player;
    std::vector<int> boxes;  // cell indices
};

}  // namespace detail

/// Reverse-play generation: place boxes on their targets, then walk the
/// player backwards performing random pulls. Every reachable start state is
/// solvable by construction; a BFS certificate bounds the solution length.
inline SokobanRoom generate_room(int size, int num_boxes, int search_depth,
                                 int max_solution_steps, std::uint64_t seed,
                                 int max_attempts = 200) {
    if (size < 4) throw ConfigError("sokoban: size must be >= 4");
    if (num_boxes < 1) throw ConfigError("sokoban: num_boxes must be >= 1");
    if (max_solution_steps < num_boxes)
        throw ConfigError("sokoban: max_solution_steps must be >= num_boxes");

    Rng rng(derive_seed(seed, 0x536f6b6f));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        SokobanRoom base = detail::carve_topology(size, rng);
        std::vector<int> floor_cells;
        for (int i = 0; i < size * size; ++i)
            if (base.grid[i] == SokobanCell::Floor) floor_cells.push_back(i);
        if (static_cast<int>(floor_cells.size()) < num_boxes * 4) continue;

        // targets with boxes on them, player on a spare floor cell
        std::vector<int> cells = floor_cells;
        for (int i = static_cast<int>(cells.size()) - 1; i > 0; --i)
            std::swap(cells[i], cells[rng.next_index(i + 1)]);
        SokobanRoom room = base;
        std::vector<int> boxes(cells.begin(), cells.begin() + num_boxes);
        for (int b : boxes) room.grid[b] = SokobanCell::BoxOnTarget;
        int player_cell = cells[num_boxes];
        room.grid[player_cell] = SokobanCell::Player;
        room.num_boxes = num_boxes;

        // random pull walk
        int pr = player_cell / size, pc = player_cell % size;
        for (int step = 0; step < search_depth; ++step) {
            // candidate moves: plain walks and pulls
            struct Cand { int d; bool pull; };
            std::vector<Cand> cands;
            for (int d = 0; d < 4; ++d) {
                const int nr = pr + kRowDelta[d], nc = pc + kColDelta[d];
                if (!room.in_bounds(nr, nc) || !is_free_for_player(room.at(nr, nc))) continue;
                cands.push_back({d, false});
                // pulling drags the box that sits behind the player
                const int br = pr - kRowDelta[d], bc = pc - kColDelta[d];
                if (room.in_bounds(br, bc) && has_box(room.at(br, bc))) cands.push_back({d, true});
            }
            if (cands.empty()) break;
            const auto cand = cands[rng.next_index(static_cast<int>(cands.size()))];
            const int nr = pr + kRowDelta[cand.d], nc = pc + kColDelta[cand.d];
            if (cand.pull) {
                const int br = pr - kRowDelta[cand.d], bc = pc - kColDelta[cand.d];
                room.set(br, bc, without_occupant(room.at(br, bc)));
                room.set(pr, pc, with_box(without_occupant(room.at(pr, pc))));
            } else {
                room.set(pr, pc, without_occupant(room.at(pr, pc)));
            }
            room.set(nr, nc, with_player(without_occupant(room.at(nr, nc))));
            pr = nr;
            pc = nc;
        }
        room.steps_taken = 0;

        if (is_solved(room)) continue;  // pulls must displace at least one box
        const auto solution = solve_bfs(room, max_solution_steps);
        if (!solution) continue;
        return room;
    }
    throw GenerationError("sokoban: no solvable room found for size=" + std::to_string(size) +
                          " boxes=" + std::to_string(num_boxes) + " after " +
                          std::to_string(max_attempts) + " attempts");
}

}  // namespace mage::env::sokoban
