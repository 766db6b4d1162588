#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jamsim/env.hpp"
#include "jamsim/gan.hpp"
#include "jamsim/jammer.hpp"
#include "jamsim/metrics.hpp"
#include "jamsim/nn.hpp"
#include "jamsim/transmitter.hpp"

namespace jamsim::harness {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GanSettings {
    bool enabled = false;
    int n_real = 10;
    int n_synthetic = 500;
    gan::CGanConfig cgan;
};

// Defaults reproduce the static four-node scenario.
struct ScenarioConfig {
    env::Geometry geometry;
    env::ChannelModel channel;
    double lambda = 0.2;          // background arrival rate
    double activation_prob = 0.2; // background burst-start probability
    double p_t = 1000.0;          // transmit powers in units of N0
    double p_b = 1000.0;
    double beta = 3.0; // SINR success threshold
    int k_t = 10;      // sensing window lengths
    int k_j = 10;
    int train_slots = 1000;
    int eval_slots = 500;
    jammer::JammerConfig jam;
    transmitter::DefenseConfig defense;
    GanSettings gan;
    bool tune_transmitter = false; // grid search vs the fixed 1x100 sigmoid
    bool tune_jammer = false;      // grid search vs the fixed 2x50 tanh
    std::uint64_t seed = 1;
};

void validate(const ScenarioConfig& cfg); // throws config_error

// A jammer trained in one run, reusable in another (adaptive-defense loops
// where J does not retrain between iterations).
struct PretrainedJammer {
    bool has_net = false;
    nn::MlpNetwork net;
    jammer::PowerPolicy policy;
    bool policy_active = false;
};

struct ScenarioResult {
    metrics::Metrics transmitter;
    metrics::Metrics jammer;
    metrics::SlotLog log;
    nn::ThresholdResult t_validation; // C_T errors on its validation split
    nn::ThresholdResult j_validation; // C_J errors on its validation data
    PretrainedJammer agent;           // J's trained state, reusable
};

// Full pipeline: T trains on train_slots of passive sensing; J collects its
// dataset while T operates (defense active if p_d > 0) and trains/calibrates;
// then an eval_slots evaluation with both sides active. Bit-deterministic in
// (cfg). Passing a pretrained jammer skips J's collection/training phase.
ScenarioResult run_scenario(const ScenarioConfig& cfg,
                            const PretrainedJammer* pretrained = nullptr);

enum class SweepAxis {
    JammerType,
    Tau,
    PAvg,
    PDefense,
    MobilityCircleR, // J on the d_JR=10 circle, values are d_BJ
    MobilityCircleB, // J on the d_BJ=10 circle, values are d_JR
    GanCounts        // values are synthetic sample counts
};

SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis axis);
std::string to_string(jammer::JammerKind kind);
jammer::JammerKind jammer_kind_from_string(const std::string& s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Tau;
    std::vector<double> values;              // numeric axes
    std::vector<std::string> jammer_values;  // JammerType axis
    int replications = 5;
};

struct SweepRow {
    std::string axis;
    std::string label; // jammer kind name, or the formatted value
    double value = 0.0;
    int replication = 0;
    std::uint64_t seed = 0;
    metrics::Metrics transmitter;
    metrics::Metrics jammer;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

// One run_scenario per (value, replication); replication seeds are shared
// across axis values so points differ only through the axis.
SweepTable run_sweep(const ScenarioConfig& base, const SweepSpec& spec);

// The scenario config for one sweep point (exposed for tests).
ScenarioConfig sweep_point_config(const ScenarioConfig& base, const SweepSpec& spec,
                                  std::size_t value_index);

// Intersection of circles (c1, r1) and (c2, r2), picking the point on the
// far side of the line c1-c2 from the origin; throws config_error when the
// circles do not meet.
env::Vec2 circle_intersection(const env::Vec2& c1, double r1, const env::Vec2& c2,
                              double r2);

void export_sweep_csv(const SweepTable& table, const std::string& path);
void export_sweep_json(const SweepTable& table, const std::string& path);
std::string sweep_to_csv(const SweepTable& table);
std::string sweep_to_json(const SweepTable& table);

// Trains three jammer classifiers on shared data — n_real samples alone,
// n_real + n_synthetic GAN-augmented, and a large all-real set — and
// evaluates all on the same held-out set.
struct GanComparison {
    double err_real_small = 0.0;
    double err_augmented = 0.0;
    double err_real_large = 0.0;
    int n_real = 0;
    int n_synthetic = 0;
    int n_large = 0;
};

GanComparison run_gan_comparison(const ScenarioConfig& cfg, int n_large = 500,
                                 int n_test = 500);

enum class RetrainPolicy { PerIteration, Never };

struct AdaptStep {
    double p_d = 0.0;
    double throughput = 0.0;
};

struct AdaptResult {
    double best_p_d = 0.0;
    int iterations = 0;
    std::vector<AdaptStep> trace;
};

// Throughput-driven search over the defense level against the configured
// jammer; each candidate is evaluated on the same world realization.
AdaptResult run_adaptive_defense(const ScenarioConfig& base, RetrainPolicy retrain);

// Flat "key = value" config with [section] headers; starts from defaults.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");

}  // namespace jamsim::harness
