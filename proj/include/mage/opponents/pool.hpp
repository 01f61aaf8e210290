#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mage/common/rng.hpp"
#include "mage/env/env.hpp"
#include "mage/opponents/best_response.hpp"
#include "mage/opponents/kuhn_archetypes.hpp"
#include "mage/opponents/mcts.hpp"
#include "mage/opponents/minimax.hpp"
#include "mage/opponents/pattern.hpp"

namespace mage::opp {

enum class Archetype {
    None,  // sentinel for single-agent environments
    MctsTTT,
    PreferredPattern,
    RandomTTT,
    KuhnConservative,
    KuhnAggressive,
    KuhnIntermediate,
    KuhnCFR,
    RandomKuhn,
};

/// Immutable opponent identity. `param` is the archetype's integer parameter:
/// MCTS simulation budget, pattern ordering id, or CFR training iterations.
/// The id is a pure function of (archetype, param) and is the grouping key
/// for agent-specific advantage normalization; the seed is per-instance.
struct OpponentSpec {
    Archetype archetype = Archetype::None;
    int param = 0;
    std::uint64_t seed = 0;

    std::string id() const {
        switch (archetype) {
            case Archetype::None: return "none";
            case Archetype::MctsTTT: return "ttt_mcts_" + std::to_string(param);
            case Archetype::PreferredPattern: return "ttt_pattern_" + std::to_string(param);
            case Archetype::RandomTTT: return "ttt_random";
            case Archetype::KuhnConservative: return "kuhn_conservative";
            case Archetype::KuhnAggressive: return "kuhn_aggressive";
            case Archetype::KuhnIntermediate: return "kuhn_intermediate";
            case Archetype::KuhnCFR: return "kuhn_cfr_" + std::to_string(param);
            case Archetype::RandomKuhn: return "kuhn_random";
        }
        return "?";
    }

    env::EnvKind env_kind() const {
        switch (archetype) {
            case Archetype::MctsTTT:
            case Archetype::PreferredPattern:
            case Archetype::RandomTTT: return env::EnvKind::TicTacToe;
            case Archetype::KuhnConservative:
            case Archetype::KuhnAggressive:
            case Archetype::KuhnIntermediate:
            case Archetype::KuhnCFR:
            case Archetype::RandomKuhn: return env::EnvKind::KuhnPoker;
            case Archetype::None: return env::EnvKind::Sokoban;
        }
        return env::EnvKind::Sokoban;
    }

    bool operator==(const OpponentSpec&) const = default;
};

inline Archetype archetype_from_string(const std::string& s) {
    if (s == "none") return Archetype::None;
    if (s == "ttt_mcts" || s == "mcts") return Archetype::MctsTTT;
    if (s == "ttt_pattern" || s == "pattern") return Archetype::PreferredPattern;
    if (s == "ttt_random") return Archetype::RandomTTT;
    if (s == "kuhn_conservative" || s == "conservative") return Archetype::KuhnConservative;
    if (s == "kuhn_aggressive" || s == "aggressive") return Archetype::KuhnAggressive;
    if (s == "kuhn_intermediate" || s == "intermediate") return Archetype::KuhnIntermediate;
    if (s == "kuhn_cfr" || s == "cfr") return Archetype::KuhnCFR;
    if (s == "kuhn_random") return Archetype::RandomKuhn;
    throw ConfigError("unknown opponent archetype: " + s);
}

struct PopulationConfig {
    std::vector<std::pair<OpponentSpec, double>> entries;

    void validate() const {
        if (entries.empty()) throw ConfigError("population: must not be empty");
        double total = 0.0;
        for (const auto& [spec, w] : entries) {
            if (w <= 0.0) throw ConfigError("population: weights must be positive");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ConfigError("population: weights must sum to 1");
    }
};

/// Samples by weight. The returned spec stays fixed for a whole meta-episode.
inline OpponentSpec sample_opponent(const PopulationConfig& population, Rng& rng) {
    population.validate();
    const double u = rng.next_unit();
    double acc = 0.0;
    for (const auto& [spec, w] : population.entries) {
        acc += w;
        if (u < acc) return spec;
    }
    return population.entries.back().first;
}

/// Process-wide cache of trained CFR profiles keyed by iteration count.
/// Training is deterministic, so cached profiles are reproducible.
inline std::shared_ptr<const KuhnBehavior> cfr_behavior_cached(int iterations) {
    static std::mutex mu;
    static std::unordered_map<int, std::shared_ptr<const KuhnBehavior>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[iterations];
    if (!slot) slot = std::make_shared<KuhnBehavior>(cfr_train(iterations).behavior);
    return slot;
}

/// Fixed behavioral strategy of a Kuhn opponent spec, used by the exact
/// best-response oracles. MCTS opponents have no such closed form.
inline KuhnBehavior kuhn_behavior_of(const OpponentSpec& spec,
                                     const KuhnArchetypeParams& params = {}) {
    switch (spec.archetype) {
        case Archetype::KuhnConservative: return kuhn_style_behavior(KuhnStyle::Conservative);
        case Archetype::KuhnAggressive: return kuhn_style_behavior(KuhnStyle::Aggressive);
        case Archetype::KuhnIntermediate:
            return kuhn_style_behavior(KuhnStyle::Intermediate, params);
        case Archetype::RandomKuhn: return kuhn_style_behavior(KuhnStyle::Random);
        case Archetype::KuhnCFR: return *cfr_behavior_cached(spec.param > 0 ? spec.param : 100000);
        default: throw ConfigError("opponent " + spec.id() + " has no Kuhn behavior");
    }
}

/// Builds the move callback the environment invokes for opponent turns.
/// All opponents are stateless between moves.
inline env::OpponentFn make_opponent(const OpponentSpec& spec,
                                     const KuhnArchetypeParams& params = {}) {
    switch (spec.archetype) {
        case Archetype::None: return nullptr;
        case Archetype::MctsTTT: {
            const int sims = spec.param > 0 ? spec.param : 100;
            return [sims](const env::StructuredState& s, Rng& rng) {
                return env::Action{mcts_select(std::get<env::TicTacToeBoard>(s), sims, rng)};
            };
        }
        case Archetype::PreferredPattern: {
            const int ordering = spec.param;
            pattern_ordering(ordering);  // validate eagerly
            return [ordering](const env::StructuredState& s, Rng&) {
                return env::Action{preferred_pattern_act(ordering, std::get<env::TicTacToeBoard>(s))};
            };
        }
        case Archetype::RandomTTT:
            return [](const env::StructuredState& s, Rng& rng) {
                return env::Action{random_ttt_act(std::get<env::TicTacToeBoard>(s), rng)};
            };
        default: {
            const auto behavior = std::make_shared<KuhnBehavior>(kuhn_behavior_of(spec, params));
            return [behavior](const env::StructuredState& s, Rng& rng) {
                return env::Action::kuhn(act_behavior(*behavior, std::get<env::KuhnView>(s), rng));
            };
        }
    }
}

/// The three-archetype Kuhn training population with uniform weights.
inline PopulationConfig kuhn_archetype_population() {
    PopulationConfig pop;
    pop.entries = {
        {OpponentSpec{Archetype::KuhnConservative, 0, 0}, 1.0 / 3.0},
        {OpponentSpec{Archetype::KuhnAggressive, 0, 0}, 1.0 / 3.0},
        {OpponentSpec{Archetype::KuhnIntermediate, 0, 0}, 1.0 / 3.0},
    };
    return pop;
}

/// Balanced Tic-Tac-Toe population: 50% MCTS mass, 50% pattern/random.
inline PopulationConfig ttt_balanced_population() {
    PopulationConfig pop;
    pop.entries = {
        {OpponentSpec{Archetype::MctsTTT, 100, 0}, 0.5},
        {OpponentSpec{Archetype::PreferredPattern, 0, 0}, 0.175},
        {OpponentSpec{Archetype::PreferredPattern, 1, 0}, 0.175},
        {OpponentSpec{Archetype::RandomTTT, 0, 0}, 0.15},
    };
    return pop;
}

}  // namespace mage::opp
