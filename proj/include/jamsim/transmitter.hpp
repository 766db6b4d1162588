#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "jamsim/env.hpp"
#include "jamsim/nn.hpp"

namespace jamsim::transmitter {

class warmup_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DefenseConfig {
    double p_d = 0.0; // fraction of slots whose action is inverted
    int window = 500; // slots per flip-selection batch
};

// The K most recent RSSI readings, oldest first.
Eigen::VectorXd make_features(const std::vector<double>& history, int k);

// Runs the world for n_slots with T silent, labelling each full sensing
// window with the ground-truth busy status; first K-1 slots are warm-up.
nn::SplitDataset collect_training_data(env::World& world, int n_slots, int k);

struct TransmitDecision {
    bool transmit = false;
    double score = 0.0;
};

// Idle prediction (score <= threshold) => transmit.
TransmitDecision decide_transmit(const nn::MlpNetwork& classifier,
                                 const Eigen::VectorXd& window);

// Picks the ceil(p_d * N) highest-confidence slots of a window. Confidence is
// side-normalized around the decision threshold so both tails compare:
// (th - s)/th below the threshold, (s - th)/(1 - th) above it.
std::vector<std::size_t> select_flip_slots(const std::vector<double>& scores,
                                           double threshold, double p_d);

// Throughput-driven search for the defense level: coarse scan over
// {0,10,...,100}% then halving refinement (5%, 2.5%) probing both neighbors
// of the incumbent, stopping at 1% granularity or when no neighbor improves
// by more than one window's measurement noise (ties keep the lower p_d).
class DefenseSearch {
public:
    // Next p_d to evaluate (fractions, e.g. 0.2 for 20%).
    double next_candidate() const;
    // Feed the throughput measured at next_candidate().
    void report(double throughput);
    bool converged() const { return phase_ == Phase::Done; }
    double best_p_d() const { return incumbent_; }
    int iterations() const { return iterations_; }

private:
    enum class Phase { Coarse, Refine, Done };
    Phase phase_ = Phase::Coarse;
    int coarse_index_ = 0;
    double incumbent_ = 0.0;
    double incumbent_value_ = 0.0;
    double step_ = 0.05;
    int refine_side_ = 0; // 0: probe below, 1: probe above
    double probe_best_value_ = 0.0;
    double probe_best_pd_ = 0.0;
    bool probe_improved_ = false;
    int iterations_ = 0;

    void advance_refinement();
};

}  // namespace jamsim::transmitter
