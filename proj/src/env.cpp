#include "jamsim/env.hpp"

#include <cmath>

namespace jamsim::env {

double path_gain(double d, double shadow_draw, double pathloss_exponent) {
    if (d <= 0.0) {
        throw invalid_geometry("path_gain: distance must be positive");
    }
    return shadow_draw / std::pow(d, pathloss_exponent);
}

double shadow_multiplier(double sigma_db, double standard_normal_draw) {
    return std::pow(10.0, sigma_db * standard_normal_draw / 10.0);
}

double sinr(double tx_power, double gain_tx, double jam_power, double gain_jam,
            bool busy, double interference, double noise_power) {
    const double denom =
        noise_power + (busy ? interference : 0.0) + gain_jam * jam_power;
    return gain_tx * tx_power / denom;
}

bool transmission_success(double sinr_value, double beta) {
    return sinr_value > beta;
}

bool step_background(BackgroundSourceState& state, RngStream& rng) {
    if (rng.bernoulli(state.arrival_rate)) {
        state.queue_len += 1;
    }
    if (!state.active && state.queue_len > 0) {
        if (rng.bernoulli(state.activation_prob)) {
            state.active = true;
        }
    }
    bool transmitting = false;
    if (state.active) {
        transmitting = true;
        state.queue_len -= 1;
        if (state.queue_len == 0) {
            state.active = false;
        }
    }
    return transmitting;
}

double sense(const ChannelModel& ch, bool source_transmitting, double source_power,
             double gain_to_observer, double noise_draw) {
    double rssi = ch.noise_power * (1.0 + ch.sensing_noise_jitter * std::abs(noise_draw));
    if (source_transmitting) {
        rssi += source_power * gain_to_observer;
    }
    return rssi;
}

World::World(const Geometry& geo, const ChannelModel& ch, const BackgroundSourceState& bg,
             double p_t, double p_b, std::uint64_t seed)
    : geo_(geo),
      ch_(ch),
      bg_(bg),
      p_t_(p_t),
      p_b_(p_b),
      traffic_(RngStream::derive(seed, "traffic")),
      sh_tr_(RngStream::derive(seed, "shadow/T-R")),
      sh_br_(RngStream::derive(seed, "shadow/B-R")),
      sh_bt_(RngStream::derive(seed, "shadow/B-T")),
      sh_bj_(RngStream::derive(seed, "shadow/B-J")),
      sh_tj_(RngStream::derive(seed, "shadow/T-J")),
      sh_jr_(RngStream::derive(seed, "shadow/J-R")),
      noise_t_(RngStream::derive(seed, "noise/T")),
      noise_j_(RngStream::derive(seed, "noise/J")),
      noise_j_data_(RngStream::derive(seed, "noise/J-data")) {
    if (geo_.d_tr() <= 0.0 || geo_.d_tb() <= 0.0 || geo_.d_tj() <= 0.0 ||
        geo_.d_br() <= 0.0 || geo_.d_bj() <= 0.0 || geo_.d_jr() <= 0.0) {
        throw invalid_geometry("World: all pairwise distances must be positive");
    }
}

SlotState World::step() {
    SlotState s;
    s.slot = slot_++;
    s.busy = step_background(bg_, traffic_);

    const double sigma = ch_.shadowing_sigma_db;
    s.shadow_tr = shadow_multiplier(sigma, sh_tr_.normal());
    s.shadow_br = shadow_multiplier(sigma, sh_br_.normal());
    s.shadow_bt = shadow_multiplier(sigma, sh_bt_.normal());
    s.shadow_bj = shadow_multiplier(sigma, sh_bj_.normal());
    s.shadow_tj = shadow_multiplier(sigma, sh_tj_.normal());
    s.shadow_jr = shadow_multiplier(sigma, sh_jr_.normal());
    s.noise_z_t = noise_t_.normal();
    s.noise_z_j = noise_j_.normal();
    s.noise_z_j_data = noise_j_data_.normal();

    const double exp = ch_.pathloss_exponent;
    s.rssi_t = sense(ch_, s.busy, p_b_, path_gain(geo_.d_tb(), s.shadow_bt, exp), s.noise_z_t);
    s.rssi_j = sense(ch_, s.busy, p_b_, path_gain(geo_.d_bj(), s.shadow_bj, exp), s.noise_z_j);
    return s;
}

double World::jam_sense_rssi(const SlotState& s, bool t_transmitting) const {
    return sense(ch_, t_transmitting, p_t_,
                 path_gain(geo_.d_tj(), s.shadow_tj, ch_.pathloss_exponent),
                 s.noise_z_j_data);
}

double World::receiver_sinr(const SlotState& s, double jam_power) const {
    const double exp = ch_.pathloss_exponent;
    const double gain_tx = path_gain(geo_.d_tr(), s.shadow_tr, exp);
    const double gain_jam = path_gain(geo_.d_jr(), s.shadow_jr, exp);
    const double interference =
        p_b_ * path_gain(geo_.d_br(), s.shadow_br, exp) + ch_.external_interference;
    return sinr(p_t_, gain_tx, jam_power, gain_jam, s.busy, interference, ch_.noise_power);
}

}  // namespace jamsim::env
