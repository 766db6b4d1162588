#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "jamsim/rng.hpp"

namespace jamsim::env {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Node placement. Defaults reproduce the static scenario:
// T=(0,0), R=(10,0), B=(0,10), J=(10,10).
struct Geometry {
    Vec2 pos_t{0.0, 0.0};
    Vec2 pos_r{10.0, 0.0};
    Vec2 pos_b{0.0, 10.0};
    Vec2 pos_j{10.0, 10.0};

    double d_tr() const { return distance(pos_t, pos_r); }
    double d_tb() const { return distance(pos_t, pos_b); }
    double d_tj() const { return distance(pos_t, pos_j); }
    double d_br() const { return distance(pos_b, pos_r); }
    double d_bj() const { return distance(pos_b, pos_j); }
    double d_jr() const { return distance(pos_j, pos_r); }
};

struct ChannelModel {
    double noise_power = 1.0;           // N0, normalized to 1
    double pathloss_exponent = 2.0;
    double shadowing_sigma_db = 3.0;    // log-normal shadowing, 0 dB median
    double external_interference = 0.0; // unobserved transmitters, off by default
    double sensing_noise_jitter = 0.1;  // RSSI = N0*(1 + jitter*|z|) + signal
};

struct BackgroundSourceState {
    int queue_len = 0;
    bool active = false;
    double arrival_rate = 0.2;    // lambda, packets/slot
    double activation_prob = 0.2; // chance to start draining a non-empty queue
};

class invalid_geometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Free-space 1/d^2 decay scaled by a log-normal shadowing multiplier.
double path_gain(double d, double shadow_draw, double pathloss_exponent = 2.0);

// Multiplier with median exactly 1 (0 dB median).
double shadow_multiplier(double sigma_db, double standard_normal_draw);

double sinr(double tx_power, double gain_tx, double jam_power, double gain_jam,
            bool busy, double interference, double noise_power = 1.0);

bool transmission_success(double sinr_value, double beta);

// Advances the background source one slot; returns whether it transmits.
bool step_background(BackgroundSourceState& state, RngStream& rng);

// One start-of-slot RSSI sample at an observer.
double sense(const ChannelModel& ch, bool source_transmitting, double source_power,
             double gain_to_observer, double noise_draw);

// Everything random about one slot, drawn once so that actual and
// counterfactual outcomes share identical channel conditions.
struct SlotState {
    long slot = 0;
    bool busy = false;
    double shadow_tr = 1.0;
    double shadow_br = 1.0;
    double shadow_bt = 1.0;
    double shadow_bj = 1.0;
    double shadow_tj = 1.0;
    double shadow_jr = 1.0;
    double noise_z_t = 0.0;
    double noise_z_j = 0.0;
    double noise_z_j_data = 0.0;
    double rssi_t = 0.0; // sensing sample at T (noise + B component)
    double rssi_j = 0.0; // sensing sample at J (noise + B component)
};

// The ground-truth world: propagation, traffic and sensing for one run.
// Single-threaded; all randomness comes from named sub-streams of one seed.
class World {
public:
    World(const Geometry& geo, const ChannelModel& ch, const BackgroundSourceState& bg,
          double p_t, double p_b, std::uint64_t seed);

    SlotState step();

    // Received power at J during the data period of the current slot.
    double jam_sense_rssi(const SlotState& s, bool t_transmitting) const;

    // SINR at R for the current slot given T transmits against jam_power.
    double receiver_sinr(const SlotState& s, double jam_power) const;

    const Geometry& geometry() const { return geo_; }
    const ChannelModel& channel() const { return ch_; }
    const BackgroundSourceState& background() const { return bg_; }
    double p_t() const { return p_t_; }
    double p_b() const { return p_b_; }

private:
    Geometry geo_;
    ChannelModel ch_;
    BackgroundSourceState bg_;
    double p_t_;
    double p_b_;
    long slot_ = 0;

    RngStream traffic_;
    RngStream sh_tr_, sh_br_, sh_bt_, sh_bj_, sh_tj_, sh_jr_;
    RngStream noise_t_, noise_j_, noise_j_data_;
};

}  // namespace jamsim::env
