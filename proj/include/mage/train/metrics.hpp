#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mage/common/errors.hpp"

namespace mage::train {

/// Pass@k: fraction of meta-episodes with at least one success among the
/// first k episodes. Monotone non-decreasing in k by construction.
inline double pass_at_k(const std::vector<std::vector<bool>>& meta_outcomes, int k) {
    MAGE_REQUIRE(k >= 1, "pass_at_k: k must be >= 1");
    if (meta_outcomes.empty()) return 0.0;
    int hits = 0;
    for (const auto& episodes : meta_outcomes) {
        MAGE_REQUIRE(k <= static_cast<int>(episodes.size()), "pass_at_k: k exceeds N");
        for (int i = 0; i < k; ++i) {
            if (episodes[i]) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(meta_outcomes.size());
}

/// Wilson 95% confidence interval for a binomial proportion.
inline std::pair<double, double> wilson_ci(int successes, int n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct MetricsRow {
    int epoch = 0;
    std::string opponent_id;
    int num_meta_episodes = 0;
    std::vector<double> episode_success;  // per episode index, 1..N
    std::vector<double> pass_at;          // k = 1..N
    double mean_return = 0.0;             // mean composed R(tau) over all episodes
    double mean_final_return = 0.0;
    double mean_invalid = 0.0;
    int final_wins = 0, final_draws = 0, final_losses = 0, final_timeouts = 0;
    double final_ci_low = 0.0, final_ci_high = 1.0;
    double loss = 0.0;  // training loss; zero for evaluation rows
};

inline std::string metrics_header(int num_episodes) {
    std::string h = "epoch,opponent_id,num_meta_episodes";
    for (int n = 1; n <= num_episodes; ++n) h += ",success_ep" + std::to_string(n);
    for (int k = 1; k <= num_episodes; ++k) h += ",pass_at_" + std::to_string(k);
    h += ",mean_return,mean_final_return,mean_invalid";
    h += ",final_wins,final_draws,final_losses,final_timeouts";
    h += ",final_ci_low,final_ci_high,loss";
    return h;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string metrics_row_csv(const MetricsRow& row) {
    std::string line = std::to_string(row.epoch) + "," + row.opponent_id + "," +
                       std::to_string(row.num_meta_episodes);
    for (double v : row.episode_success) line += "," + format_double(v);
    for (double v : row.pass_at) line += "," + format_double(v);
    line += "," + format_double(row.mean_return);
    line += "," + format_double(row.mean_final_return);
    line += "," + format_double(row.mean_invalid);
    line += "," + std::to_string(row.final_wins) + "," + std::to_string(row.final_draws) + "," +
            std::to_string(row.final_losses) + "," + std::to_string(row.final_timeouts);
    line += "," + format_double(row.final_ci_low) + "," + format_double(row.final_ci_high);
    line += "," + format_double(row.loss);
    return line;
}

}  // namespace mage::train
