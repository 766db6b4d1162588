#include "jamsim/jammer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jamsim::jammer {

JamDecision decide_jam(const nn::MlpNetwork& classifier, const Eigen::VectorXd& window) {
    if (!classifier.trained()) {
        throw std::logic_error("decide_jam: classifier not trained");
    }
    JamDecision d;
    d.score = classifier.score(window);
    d.jam = d.score <= classifier.threshold;
    return d;
}

bool sensing_jam_decide(double rssi, double tau) {
    return rssi > tau;
}

bool random_jam_decide(double p_jam, RngStream& rng) {
    if (p_jam < 0.0 || p_jam > 1.0) {
        throw std::invalid_argument("random_jam_decide: p_jam outside [0,1]");
    }
    return rng.bernoulli(p_jam);
}

double jam_power(const PowerPolicy& policy, double s) {
    if (s > policy.score_threshold) return 0.0;
    switch (policy.mode) {
        case PolicyMode::MinOnlyBelowCutoff:
            return s <= policy.c ? policy.p_min : 0.0;
        case PolicyMode::MaxFlat:
            return policy.p_max;
        case PolicyMode::Linear:
            return policy.p_max - policy.c1 * s;
        case PolicyMode::SteeperClampedLow:
            return std::max(policy.p_max - policy.c * s, policy.p_min);
        case PolicyMode::SteeperClampedHigh:
            return std::min(policy.p_min + policy.c * (policy.score_threshold - s),
                            policy.p_max);
    }
    return 0.0;
}

double mean_policy_power(const PowerPolicy& policy, const std::vector<double>& scores) {
    if (scores.empty()) return 0.0;
    double sum = 0.0;
    for (double s : scores) sum += jam_power(policy, s);
    return sum / static_cast<double>(scores.size());
}

PowerPolicy calibrate_power_policy(const std::vector<double>& training_scores,
                                   double p_min, double p_max, double p_avg,
                                   double score_threshold) {
    if (p_min >= p_max) {
        throw std::invalid_argument("calibrate_power_policy: need p_min < p_max");
    }
    if (training_scores.empty()) {
        throw std::invalid_argument("calibrate_power_policy: no calibration scores");
    }

    PowerPolicy policy;
    policy.p_min = p_min;
    policy.p_max = p_max;
    policy.p_avg = p_avg;
    policy.score_threshold = score_threshold;
    policy.c1 = (p_max - p_min) / score_threshold;

    const double n = static_cast<double>(training_scores.size());
    std::vector<double> jammed;
    for (double s : training_scores) {
        if (s <= score_threshold) jammed.push_back(s);
    }
    const double jam_fraction = static_cast<double>(jammed.size()) / n;

    const double p1 = p_min * jam_fraction;
    const double p2 = p_max * jam_fraction;

    if (p1 >= p_avg) {
        // Case 1: even P_min everywhere busts the budget; drop the
        // low-confidence slots by lowering the score cutoff.
        policy.mode = PolicyMode::MinOnlyBelowCutoff;
        std::sort(jammed.begin(), jammed.end());
        double cutoff = -1.0; // below any score: never jam
        for (std::size_t i = 0; i < jammed.size(); ++i) {
            const double cost = p_min * static_cast<double>(i + 1) / n;
            if (cost <= p_avg) {
                cutoff = jammed[i];
            } else {
                break;
            }
        }
        // With tied scores a cutoff admits every tie; back off if that
        // would exceed the budget.
        policy.c = cutoff;
        while (policy.c >= 0.0 && mean_policy_power(policy, training_scores) > p_avg) {
            auto it = std::lower_bound(jammed.begin(), jammed.end(), policy.c);
            policy.c = it == jammed.begin() ? -1.0 : *std::prev(it);
        }
        return policy;
    }

    if (p2 <= p_avg) {
        policy.mode = PolicyMode::MaxFlat;
        return policy;
    }

    auto ramp_mean = [&](PolicyMode mode, double c) {
        PowerPolicy trial = policy;
        trial.mode = mode;
        trial.c = c;
        return mean_policy_power(trial, training_scores);
    };

    const double p3 = ramp_mean(PolicyMode::Linear, policy.c1);
    const double rel_tol = 1e-9 * std::max({std::abs(p3), std::abs(p_avg), 1.0});
    if (std::abs(p3 - p_avg) <= rel_tol) {
        policy.mode = PolicyMode::Linear;
        policy.c = policy.c1;
        return policy;
    }

    const PolicyMode mode =
        p3 > p_avg ? PolicyMode::SteeperClampedLow : PolicyMode::SteeperClampedHigh;
    policy.mode = mode;

    // mean is monotone in c (decreasing for 3b, increasing for 3c); bracket
    // then bisect to 1e-9 relative.
    double lo = policy.c1;
    double hi = policy.c1;
    const bool decreasing = mode == PolicyMode::SteeperClampedLow;
    for (int i = 0; i < 200; ++i) {
        hi *= 2.0;
        const double m = ramp_mean(mode, hi);
        if ((decreasing && m <= p_avg) || (!decreasing && m >= p_avg)) break;
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-9 * std::max(hi, 1.0); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double m = ramp_mean(mode, mid);
        const bool go_right = decreasing ? (m > p_avg) : (m < p_avg);
        (go_right ? lo : hi) = mid;
    }
    // Land on the feasible side of the budget.
    policy.c = decreasing ? hi : lo;
    return policy;
}

}  // namespace jamsim::jammer
