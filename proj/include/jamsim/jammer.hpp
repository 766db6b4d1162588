#pragma once

#include <vector>

#include "jamsim/nn.hpp"
#include "jamsim/rng.hpp"

namespace jamsim::jammer {

enum class JammerKind { None, DeepLearning, Sensing, Random };

struct JammerConfig {
    JammerKind kind = JammerKind::DeepLearning;
    double tau = 3.4;          // sensing threshold
    double p_jam = 0.5;        // random-jammer transmit probability
    double fixed_power = 1000; // P_J
    // Power budget; negative means no budget (fixed_power used flat).
    double p_avg = -1.0;
    double p_min = 500;
    double p_max = 1000;
};

struct JamDecision {
    bool jam = false;
    double score = 0.0;
};

// Deep-learning jammer: jam iff the classifier score satisfies s <= S.
JamDecision decide_jam(const nn::MlpNetwork& classifier, const Eigen::VectorXd& window);

// Sensing-based jammer: jam iff the slot's received power exceeds tau.
bool sensing_jam_decide(double rssi, double tau);

bool random_jam_decide(double p_jam, RngStream& rng);

enum class PolicyMode {
    MinOnlyBelowCutoff, // case 1: P_min up to a score cutoff c, else 0
    MaxFlat,            // case 2: always P_max
    Linear,             // case 3a: P_max - c1*s
    SteeperClampedLow,  // case 3b: max{P_max - c*s, P_min}, c > c1
    SteeperClampedHigh  // case 3c: min{P_min + c*(S-s), P_max}, c > c1
};

struct PowerPolicy {
    double p_min = 500;
    double p_max = 1000;
    double p_avg = 1000;
    double score_threshold = 0.5; // S
    PolicyMode mode = PolicyMode::MaxFlat;
    double c = 0.0;  // calibrated cutoff / slope
    double c1 = 0.0; // (P_max - P_min) / S
};

// Fits the piecewise-linear p(s) to the average power budget on the
// training-score distribution. Scores above S cost nothing; the empirical
// mean over all given scores is constrained to p_avg.
PowerPolicy calibrate_power_policy(const std::vector<double>& training_scores,
                                   double p_min, double p_max, double p_avg,
                                   double score_threshold);

double jam_power(const PowerPolicy& policy, double s);

// Empirical mean of jam_power over a score set (budget checks).
double mean_policy_power(const PowerPolicy& policy, const std::vector<double>& scores);

}  // namespace jamsim::jammer
