#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mage/common/rng.hpp"
#include "mage/policy/features.hpp"

namespace mage::policy {

struct PolicyParams {
    env::EnvKind env_kind = env::EnvKind::KuhnPoker;
    int feature_dim = 0;
    std::vector<double> theta;

    static PolicyParams zeros(env::EnvKind kind) {
        PolicyParams p;
        p.env_kind = kind;
        p.feature_dim = action_feature_dim(kind);
        p.theta.assign(p.feature_dim, 0.0);
        return p;
    }

    void validate() const {
        if (static_cast<int>(theta.size()) != feature_dim)
            throw ConfigError("policy params: theta size does not match feature_dim");
        for (double v : theta)
            if (!std::isfinite(v)) throw NumericError("policy params: non-finite entry");
    }
};

struct ActionDecision {
    env::Action action;
    double log_prob = 0.0;       // exact log-probability of the sampled action
    std::string raw_text;        // remote policies only
    int response_length = 0;     // remote policies only
    bool invalid = false;        // remote parse failure, substituted action
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    MAGE_REQUIRE(a.size() == b.size(), "policy: feature/theta size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Masked softmax over the admissible actions only; inadmissible actions have
/// probability exactly zero because they are never enumerated.
inline std::vector<double> admissible_probs(const rollout::PolicyContext& ctx,
                                            const PolicyParams& params,
                                            std::vector<FeatureVector>* features_out = nullptr) {
    MAGE_REQUIRE(!ctx.admissible.empty(), "policy: no admissible actions");
    std::vector<double> logits(ctx.admissible.size());
    for (std::size_t i = 0; i < ctx.admissible.size(); ++i) {
        FeatureVector f = action_features(ctx, ctx.admissible[i]);
        logits[i] = dot(f.values, params.theta);
        if (features_out) features_out->push_back(std::move(f));
    }
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - max_logit);
        denom += probs[i];
    }
    for (double& p : probs) p /= denom;
    return probs;
}

}  // namespace detail

/// Samples an action from the masked softmax using exactly one rng draw.
inline ActionDecision act(const rollout::PolicyContext& ctx, const PolicyParams& params, Rng& rng) {
    const std::vector<double> probs = detail::admissible_probs(ctx, params);
    const double u = rng.next_unit();
    double acc = 0.0;
    std::size_t pick = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    ActionDecision d;
    d.action = ctx.admissible[pick];
    d.log_prob = std::log(probs[pick]);
    return d;
}

inline double log_prob_of(const rollout::PolicyContext& ctx, const env::Action& action,
                          const PolicyParams& params) {
    const std::vector<double> probs = detail::admissible_probs(ctx, params);
    for (std::size_t i = 0; i < ctx.admissible.size(); ++i)
        if (ctx.admissible[i] == action) return std::log(probs[i]);
    throw ContractError("log_prob_of: action not admissible");
}

/// Exact gradient of log pi(action | context) with respect to theta:
/// phi(s, a) - sum_b pi(b) phi(s, b).
inline std::vector<double> logprob_grad(const rollout::PolicyContext& ctx,
                                        const env::Action& action, const PolicyParams& params) {
    std::vector<FeatureVector> features;
    const std::vector<double> probs = detail::admissible_probs(ctx, params, &features);
    std::optional<std::size_t> chosen;
    for (std::size_t i = 0; i < ctx.admissible.size(); ++i)
        if (ctx.admissible[i] == action) chosen = i;
    MAGE_REQUIRE(chosen.has_value(), "logprob_grad: action not admissible");
    std::vector<double> grad = features[*chosen].values;
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t k = 0; k < grad.size(); ++k)
            grad[k] -= probs[i] * features[i].values[k];
    return grad;
}

/// One gradient-ascent step on the advantage-weighted log-likelihood.
/// Returns new params; the input is unchanged.
inline PolicyParams apply_update(const PolicyParams& params, const std::vector<double>& gradient,
                                 double learning_rate) {
    MAGE_REQUIRE(gradient.size() == params.theta.size(), "apply_update: shape mismatch");
    for (double g : gradient)
        if (!std::isfinite(g)) throw NumericError("apply_update: non-finite gradient entry");
    PolicyParams next = params;
    for (std::size_t i = 0; i < next.theta.size(); ++i)
        next.theta[i] += learning_rate * gradient[i];
    next.validate();
    return next;
}

// ---------------------------------------------------------------- checkpoints

/// Versioned text checkpoint with hex-float parameters (lossless round-trip).
inline std::string params_to_text(const PolicyParams& params) {
    std::ostringstream out;
    out << "mage-checkpoint v1\n";
    out << "env " << env::to_string(params.env_kind) << "\n";
    out << "feature_dim " << params.feature_dim << "\n";
    out << std::hexfloat;
    for (double v : params.theta) out << v << "\n";
    return out.str();
}

inline PolicyParams params_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "mage-checkpoint" || version != "v1")
        throw ConfigError("checkpoint: bad header");
    std::string field, env_name;
    int dim = 0;
    in >> field >> env_name;
    if (field != "env") throw ConfigError("checkpoint: missing env field");
    in >> field >> dim;
    if (field != "feature_dim") throw ConfigError("checkpoint: missing feature_dim field");
    PolicyParams p;
    p.env_kind = env::env_kind_from_string(env_name);
    p.feature_dim = dim;
    std::string token;
    while (in >> token) p.theta.push_back(std::strtod(token.c_str(), nullptr));
    p.validate();
    if (p.feature_dim != action_feature_dim(p.env_kind))
        throw ConfigError("checkpoint: feature_dim does not match this featurizer version");
    return p;
}

inline void params_save(const PolicyParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("checkpoint save: cannot open " + path);
    out << params_to_text(params);
}

inline PolicyParams params_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("checkpoint load: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_text(buf.str());
}

}  // namespace mage::policy
