#pragma once

#include <string>
#include <vector>

namespace jamsim::metrics {

// Ground truth and decisions for one evaluated slot. counterfactual_success
// answers "would this transmission have succeeded with jamming power forced
// to zero", evaluated on the same channel draws.
struct SlotRecord {
    long slot = 0;
    bool channel_busy = false;
    bool t_transmitted = false;
    double t_score = 0.0;
    bool flipped = false;
    bool jam_decision = false;
    double jam_power = 0.0;
    bool success = false;
    bool counterfactual_success = false;
    bool ack = false;
};

using SlotLog = std::vector<SlotRecord>;

enum class Subject { Transmitter, Jammer };

struct Metrics {
    double throughput = 0.0;    // successes / slots
    double success_ratio = 0.0; // successes / transmissions
    bool success_ratio_defined = false;
    double e_md = 0.0;
    bool e_md_defined = false;
    double e_fa = 0.0;
    bool e_fa_defined = false;
    long n_slots = 0;
    long n_transmissions = 0;
    long n_successes = 0;
    double mean_jam_power = 0.0;
};

Metrics compute_metrics(const SlotLog& log, Subject subject);

// CSV round trip for slot logs; field order matches SlotRecord.
void write_slot_log_csv(const SlotLog& log, const std::string& path);
SlotLog read_slot_log_csv(const std::string& path);

// JSON object with the Metrics fields; undefined ratios exported as null.
std::string metrics_to_json(const Metrics& m);
void write_metrics_json(const Metrics& m, const std::string& path);

// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace jamsim::metrics
