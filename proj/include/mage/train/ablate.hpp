#pragma once

#include <filesystem>
#include <fstream>

#include "mage/train/evaluate.hpp"

namespace mage::train {

enum class AblationAxis { RewardVariant, OpponentDistribution, GroupingStationarity, AnchorScope };

inline AblationAxis axis_from_string(const std::string& s) {
    if (s == "reward_variant") return AblationAxis::RewardVariant;
    if (s == "opponent_distribution") return AblationAxis::OpponentDistribution;
    if (s == "grouping_stationarity") return AblationAxis::GroupingStationarity;
    if (s == "anchor_scope") return AblationAxis::AnchorScope;
    throw ConfigError("unknown ablation axis: " + s);
}

inline const char* to_string(AblationAxis a) {
    switch (a) {
        case AblationAxis::RewardVariant: return "reward_variant";
        case AblationAxis::OpponentDistribution: return "opponent_distribution";
        case AblationAxis::GroupingStationarity: return "grouping_stationarity";
        case AblationAxis::AnchorScope: return "anchor_scope";
    }
    return "?";
}

struct AblationArm {
    std::string name;
    RunConfig config;
};

/// Weight mass shifted onto the non-search / passive opponents.
inline opp::PopulationConfig skewed_population(const opp::PopulationConfig& base) {
    opp::PopulationConfig out = base;
    // push 80% of the mass onto the first non-MCTS entry family
    double passive_total = 0.0;
    for (const auto& [spec, w] : out.entries)
        if (spec.archetype != opp::Archetype::MctsTTT &&
            spec.archetype != opp::Archetype::KuhnCFR)
            passive_total += w;
    if (passive_total <= 0.0) return out;
    for (auto& [spec, w] : out.entries) {
        const bool passive = spec.archetype != opp::Archetype::MctsTTT &&
                             spec.archetype != opp::Archetype::KuhnCFR;
        w = passive ? 0.8 * (w / passive_total) : 0.2 * (w / (1.0 - passive_total));
    }
    return out;
}

inline std::vector<AblationArm> ablation_arms(const RunConfig& base, AblationAxis axis) {
    std::vector<AblationArm> arms;
    switch (axis) {
        case AblationAxis::RewardVariant: {
            for (auto variant : {reward::ReturnVariant::Differential,
                                 reward::ReturnVariant::Cumulative,
                                 reward::ReturnVariant::SingleEpisode}) {
                RunConfig cfg = base;
                cfg.returns.variant = variant;
                arms.push_back({reward::to_string(variant), cfg});
            }
            break;
        }
        case AblationAxis::OpponentDistribution: {
            RunConfig balanced = base;
            arms.push_back({"balanced", balanced});
            RunConfig skewed = base;
            skewed.population = skewed_population(base.population);
            arms.push_back({"skewed", skewed});
            break;
        }
        case AblationAxis::GroupingStationarity: {
            // mixing requires per-meta-episode opponents in both arms
            RunConfig stationary = base;
            stationary.opponent_sampling = OpponentSampling::PerMetaEpisode;
            stationary.grouping = adv::Grouping::Stationary;
            arms.push_back({"stationary", stationary});
            RunConfig mixed = stationary;
            mixed.grouping = adv::Grouping::NonStationary;
            arms.push_back({"non_stationary", mixed});
            break;
        }
        case AblationAxis::AnchorScope: {
            RunConfig global = base;
            global.anchor_scope = adv::GroupScope::StepGlobalAnchor;
            arms.push_back({"global_anchor", global});
            RunConfig local = base;
            local.anchor_scope = adv::GroupScope::StepPerEpisodeAnchor;
            arms.push_back({"per_episode_anchor", local});
            break;
        }
    }
    return arms;
}

/// Verifies the arm configs differ from each other only on the declared axis.
inline void assert_single_axis_diff(const std::vector<AblationArm>& arms, AblationAxis axis) {
    auto scrub = [&](const RunConfig& cfg) {
        json j = to_json(cfg);
        switch (axis) {
            case AblationAxis::RewardVariant: j["returns"].erase("variant"); break;
            case AblationAxis::OpponentDistribution: j.erase("population"); break;
            case AblationAxis::GroupingStationarity: j.erase("grouping"); break;
            case AblationAxis::AnchorScope: j.erase("anchor_scope"); break;
        }
        return j;
    };
    for (std::size_t i = 1; i < arms.size(); ++i)
        MAGE_REQUIRE(scrub(arms[i].config) == scrub(arms[0].config),
                     "ablation arms differ outside the declared axis");
}

struct AblationOutcome {
    std::string axis;
    struct ArmResult {
        std::string name;
        std::vector<MetricsRow> eval_rows;
    };
    std::vector<ArmResult> arms;
};

/// Runs the matched configs with shared seeds and evaluates the final
/// checkpoints against the training population.
inline AblationOutcome ablate(const RunConfig& base, AblationAxis axis,
                              const std::string& out_dir) {
    auto arms = ablation_arms(base, axis);
    assert_single_axis_diff(arms, axis);

    AblationOutcome outcome;
    outcome.axis = to_string(axis);
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/ablation_" + to_string(axis) + ".csv");
    csv << "axis,arm," << metrics_header(base.num_episodes) << "\n";

    for (const auto& arm : arms) {
        const std::string arm_dir = out_dir + "/" + arm.name;
        const TrainResult trained = train(arm.config, arm_dir);
        rollout::SoftmaxPolicy policy(trained.params);
        std::vector<opp::OpponentSpec> opponents;
        for (const auto& [spec, w] : arm.config.population.entries) opponents.push_back(spec);
        auto eval = evaluate(policy, opponents, arm.config.eval_meta_episodes, arm.config,
                             derive_seed(arm.config.seed, 0xeba1));
        for (const auto& row : eval.rows)
            csv << to_string(axis) << ',' << arm.name << ',' << metrics_row_csv(row) << "\n";
        outcome.arms.push_back({arm.name, eval.rows});
    }
    return outcome;
}

}  // namespace mage::train
