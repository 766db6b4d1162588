#include "jamsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace jamsim::harness {

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

std::vector<int> to_labels(const Eigen::VectorXi& y) {
    return {y.data(), y.data() + y.size()};
}

nn::Dataset make_dataset(const std::vector<Eigen::VectorXd>& xs,
                         const std::vector<int>& ys, std::size_t begin,
                         std::size_t end) {
    nn::Dataset d;
    const long n = static_cast<long>(end - begin);
    const long dim = n > 0 ? xs[begin].size() : 0;
    d.x.resize(n, dim);
    d.y.resize(n);
    for (long i = 0; i < n; ++i) {
        d.x.row(i) = xs[begin + static_cast<std::size_t>(i)].transpose();
        d.y(i) = ys[begin + static_cast<std::size_t>(i)];
    }
    return d;
}

// Classifiers see sensing windows on a dB scale. Linear-power windows span
// three orders of magnitude, and small networks interpolate poorly between a
// strongly and a weakly shadowed busy reading; the log scale compresses the
// dynamic range so the busy/idle clusters stay separable under shadowing.
double to_db(double power) { return 10.0 * std::log10(std::max(power, 1e-12)); }

Eigen::VectorXd window_db(const Eigen::VectorXd& w) {
    Eigen::VectorXd out(w.size());
    for (long i = 0; i < w.size(); ++i) out[i] = to_db(w[i]);
    return out;
}

// The transmitter balances its two error kinds with min-max selection. The
// jammer's no-ACK labels carry one-sided noise from receiver-side fading it
// cannot observe; min-max chases that noise floor to a uselessly timid
// threshold, so the jammer operates at the balanced-error optimum instead.
enum class ThresholdRule { MinMax, Balanced };

// Fixed-architecture training with held-out threshold selection, or the full
// grid search when tune is set.
nn::MlpNetwork fit_classifier(const nn::Dataset& train, const nn::Dataset& valid,
                              bool tune, int hidden_layers, int neurons,
                              nn::Activation act, const nn::TrainConfig& tc,
                              RngStream& rng, ThresholdRule rule,
                              nn::ThresholdResult* validation) {
    if (tune) {
        nn::TuneResult tr =
            nn::tune_hyperparameters(train, valid, nn::default_grid(), tc, rng);
        if (rule == ThresholdRule::Balanced) {
            nn::ThresholdResult r = nn::select_threshold_balanced(
                to_vec(tr.net.scores(valid.x)), to_labels(valid.y));
            tr.net.threshold = r.threshold;
            tr.errors = r;
        }
        if (validation) *validation = tr.errors;
        return std::move(tr.net);
    }
    std::vector<int> sizes{static_cast<int>(train.x.cols())};
    for (int i = 0; i < hidden_layers; ++i) sizes.push_back(neurons);
    sizes.push_back(2);
    nn::MlpNetwork net =
        nn::MlpNetwork::init(sizes, std::vector<nn::Activation>(hidden_layers, act), rng);
    nn::train(net, train, tc, rng);
    const std::vector<double> scores = to_vec(net.scores(valid.x));
    const std::vector<int> labels = to_labels(valid.y);
    nn::ThresholdResult r = rule == ThresholdRule::Balanced
                                ? nn::select_threshold_balanced(scores, labels)
                                : nn::select_threshold(scores, labels);
    net.threshold = r.threshold;
    if (validation) *validation = r;
    return net;
}

// World + trained transmitter + slot engine shared by the scenario, sweep,
// GAN-comparison and adaptive-defense entry points.
class Pipeline {
public:
    explicit Pipeline(const ScenarioConfig& cfg)
        : cfg_(cfg), world_(make_world(cfg)), rng_jam_(RngStream::derive(cfg.seed, "jam-random")) {
        nn::SplitDataset t_data =
            transmitter::collect_training_data(world_, cfg_.train_slots, cfg_.k_t);
        for (auto* d : {&t_data.train, &t_data.test}) {
            d->x = (10.0 * d->x.array().max(1e-12).log10()).matrix();
        }
        RngStream rng_t = RngStream::derive(cfg_.seed, "train-T");
        nn::TrainConfig tc;
        c_t = fit_classifier(t_data.train, t_data.test, cfg_.tune_transmitter, 1, 100,
                             nn::Activation::Sigmoid, tc, rng_t,
                             ThresholdRule::MinMax, &t_validation);
        const int warmup = std::max(cfg_.k_t, cfg_.k_j) - 1;
        for (int i = 0; i < warmup; ++i) {
            env::SlotState s = world_.step();
            hist_t_.push_back(s.rssi_t);
            hist_j_.push_back(s.rssi_j);
        }
    }

    // Runs n_slots with T active, split into defense windows. When jamming is
    // off the slots serve as J's observation phase; collectors receive J's
    // sensing window and the observed ACK label (0 = ACK).
    void run(int n_slots, bool jamming, const nn::MlpNetwork* c_j,
             const jammer::PowerPolicy* policy, std::vector<Eigen::VectorXd>* j_x,
             std::vector<int>* j_y, metrics::SlotLog* log) {
        int remaining = n_slots;
        while (remaining > 0) {
            const int n = std::min(remaining, cfg_.defense.window);
            run_window(n, jamming, c_j, policy, j_x, j_y, log);
            remaining -= n;
        }
    }

    nn::MlpNetwork c_t;
    nn::ThresholdResult t_validation;

private:
    struct SlotDraft {
        env::SlotState state;
        Eigen::VectorXd t_features;
        Eigen::VectorXd j_features;
        double t_score = 0.0;
        bool t_decision = false;
    };

    static env::World make_world(const ScenarioConfig& cfg) {
        env::BackgroundSourceState bg;
        bg.arrival_rate = cfg.lambda;
        bg.activation_prob = cfg.activation_prob;
        return env::World(cfg.geometry, cfg.channel, bg, cfg.p_t, cfg.p_b, cfg.seed);
    }

    void run_window(int n, bool jamming, const nn::MlpNetwork* c_j,
                    const jammer::PowerPolicy* policy, std::vector<Eigen::VectorXd>* j_x,
                    std::vector<int>* j_y, metrics::SlotLog* log) {
        // Pass 1: channel draws, sensing and T's raw decisions. None of these
        // depend on the defense flips, which need the whole window's scores.
        std::vector<SlotDraft> drafts;
        std::vector<double> scores;
        drafts.reserve(n);
        scores.reserve(n);
        for (int i = 0; i < n; ++i) {
            SlotDraft d;
            d.state = world_.step();
            hist_t_.push_back(d.state.rssi_t);
            hist_j_.push_back(d.state.rssi_j);
            d.t_features = window_db(transmitter::make_features(hist_t_, cfg_.k_t));
            d.j_features = window_db(transmitter::make_features(hist_j_, cfg_.k_j));
            transmitter::TransmitDecision td = transmitter::decide_transmit(c_t, d.t_features);
            d.t_score = td.score;
            d.t_decision = td.transmit;
            scores.push_back(td.score);
            drafts.push_back(std::move(d));
        }

        const std::vector<std::size_t> flips =
            cfg_.defense.p_d > 0.0
                ? transmitter::select_flip_slots(scores, c_t.threshold, cfg_.defense.p_d)
                : std::vector<std::size_t>{};

        // Pass 2: final actions and outcomes.
        std::size_t fi = 0;
        for (std::size_t i = 0; i < drafts.size(); ++i) {
            const bool flipped = fi < flips.size() && flips[fi] == i;
            if (flipped) ++fi;
            const SlotDraft& d = drafts[i];
            const bool t_tx = d.t_decision != flipped;

            bool jam = false;
            double power = 0.0;
            if (jamming) {
                switch (cfg_.jam.kind) {
                    case jammer::JammerKind::None:
                        break;
                    case jammer::JammerKind::DeepLearning: {
                        const jammer::JamDecision jd = jammer::decide_jam(*c_j, d.j_features);
                        if (jd.jam) {
                            power = policy ? jammer::jam_power(*policy, jd.score)
                                           : cfg_.jam.fixed_power;
                        }
                        jam = power > 0.0;
                        break;
                    }
                    case jammer::JammerKind::Sensing:
                        jam = jammer::sensing_jam_decide(
                            world_.jam_sense_rssi(d.state, t_tx), cfg_.jam.tau);
                        if (jam) power = cfg_.jam.fixed_power;
                        break;
                    case jammer::JammerKind::Random:
                        jam = jammer::random_jam_decide(cfg_.jam.p_jam, rng_jam_);
                        if (jam) power = cfg_.jam.fixed_power;
                        break;
                }
            }

            const bool success =
                t_tx && env::transmission_success(world_.receiver_sinr(d.state, power),
                                                  cfg_.beta);
            const bool counterfactual =
                t_tx && env::transmission_success(world_.receiver_sinr(d.state, 0.0),
                                                  cfg_.beta);
            if (j_x) {
                j_x->push_back(d.j_features);
                j_y->push_back(success ? 0 : 1);
            }
            if (log) {
                log->push_back({d.state.slot, d.state.busy, t_tx, d.t_score, flipped, jam,
                                power, success, counterfactual, success});
            }
        }
    }

    ScenarioConfig cfg_;
    env::World world_;
    RngStream rng_jam_;
    std::vector<double> hist_t_;
    std::vector<double> hist_j_;
};

// First n_small pool samples, with the last one swapped for the pool's first
// sample of a missing label so both classes are always present.
nn::Dataset small_set_with_both_labels(const std::vector<Eigen::VectorXd>& xs,
                                       const std::vector<int>& ys, int n_small,
                                       std::size_t pool_size) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n_small));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    bool has[2] = {false, false};
    for (std::size_t i : idx) has[ys[i]] = true;
    if (!has[0] || !has[1]) {
        const int missing = has[0] ? 1 : 0;
        bool found = false;
        for (std::size_t j = idx.size(); j < pool_size; ++j) {
            if (ys[j] == missing) {
                idx.back() = j;
                found = true;
                break;
            }
        }
        if (!found) {
            throw nn::degenerate_dataset(
                "jammer collected a single outcome label; cannot train");
        }
    }
    nn::Dataset d;
    d.x.resize(n_small, xs[0].size());
    d.y.resize(n_small);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        d.x.row(static_cast<long>(i)) = xs[idx[i]].transpose();
        d.y(static_cast<long>(i)) = ys[idx[i]];
    }
    return d;
}

std::vector<gan::SyntheticSample> generate_balanced(const gan::CGan& g,
                                                    const nn::Dataset& real,
                                                    int n_synthetic, RngStream& rng) {
    const auto [n_pos, n_neg] = gan::proportional_counts(real, n_synthetic);
    std::vector<gan::SyntheticSample> synth = gan::generate_synthetic(g, 0, n_pos, rng);
    std::vector<gan::SyntheticSample> neg = gan::generate_synthetic(g, 1, n_neg, rng);
    synth.insert(synth.end(), neg.begin(), neg.end());
    return synth;
}

nlohmann::json metrics_json(const metrics::Metrics& m) {
    nlohmann::json o;
    o["throughput"] = m.throughput;
    o["success_ratio"] =
        m.success_ratio_defined ? nlohmann::json(m.success_ratio) : nlohmann::json();
    o["e_md"] = m.e_md_defined ? nlohmann::json(m.e_md) : nlohmann::json();
    o["e_fa"] = m.e_fa_defined ? nlohmann::json(m.e_fa) : nlohmann::json();
    o["n_slots"] = m.n_slots;
    o["n_transmissions"] = m.n_transmissions;
    o["n_successes"] = m.n_successes;
    o["mean_jam_power"] = m.mean_jam_power;
    return o;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
    auto fail = [](const std::string& msg) { throw config_error("config: " + msg); };
    if (cfg.eval_slots < 1) fail("eval_slots must be >= 1");
    if (cfg.k_t < 1 || cfg.k_j < 1) fail("sensing window length must be >= 1");
    if (cfg.train_slots < 2 * std::max(cfg.k_t, cfg.k_j)) {
        fail("train_slots too small for the sensing window");
    }
    if (cfg.lambda < 0.0 || cfg.lambda > 1.0) fail("lambda must lie in [0,1]");
    if (cfg.activation_prob <= 0.0 || cfg.activation_prob > 1.0) {
        fail("activation_prob must lie in (0,1]");
    }
    if (cfg.p_t <= 0.0 || cfg.p_b <= 0.0) fail("transmit powers must be positive");
    if (cfg.beta <= 0.0) fail("beta must be positive");
    if (cfg.channel.noise_power <= 0.0) fail("noise_power must be positive");
    if (cfg.defense.p_d < 0.0 || cfg.defense.p_d > 1.0) fail("p_d must lie in [0,1]");
    if (cfg.defense.window < 1) fail("defense window must be >= 1");
    if (cfg.jam.p_jam < 0.0 || cfg.jam.p_jam > 1.0) fail("p_jam must lie in [0,1]");
    if (cfg.jam.fixed_power < 0.0) fail("jamming power must be non-negative");
    if (cfg.jam.p_avg >= 0.0 && cfg.jam.p_min >= cfg.jam.p_max) {
        fail("power budget requires p_min < p_max");
    }
    if (cfg.gan.enabled) {
        if (cfg.gan.n_real < 2) fail("gan n_real must be >= 2");
        if (cfg.gan.n_synthetic < 0) fail("gan n_synthetic must be >= 0");
        if (cfg.gan.cgan.epochs < 1) fail("gan epochs must be >= 1");
        if (cfg.gan.cgan.noise_dim < 1) fail("gan noise_dim must be >= 1");
        if (cfg.gan.cgan.leaky_slope <= 0.0 || cfg.gan.cgan.leaky_slope >= 1.0) {
            fail("gan leaky slope must lie in (0,1)");
        }
    }
    const env::Geometry& g = cfg.geometry;
    if (g.d_tr() <= 0.0 || g.d_tb() <= 0.0 || g.d_tj() <= 0.0 || g.d_br() <= 0.0 ||
        g.d_bj() <= 0.0 || g.d_jr() <= 0.0) {
        fail("all pairwise node distances must be positive");
    }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const PretrainedJammer* pretrained) {
    validate(cfg);
    Pipeline pipe(cfg);

    ScenarioResult res;
    res.t_validation = pipe.t_validation;

    const bool needs_net = cfg.jam.kind == jammer::JammerKind::DeepLearning;
    if (pretrained) {
        res.agent = *pretrained;
    } else {
        // Observation phase: J listens while T operates under the configured
        // defense; the same slots advance the world for every jammer kind.
        const int n_collect =
            needs_net && cfg.gan.enabled ? cfg.gan.n_real : cfg.train_slots;
        std::vector<Eigen::VectorXd> j_x;
        std::vector<int> j_y;
        pipe.run(n_collect, false, nullptr, nullptr, &j_x, &j_y, nullptr);

        if (needs_net) {
            RngStream rng_j = RngStream::derive(cfg.seed, "train-J");
            nn::TrainConfig tc;
            nn::Dataset train_set;
            nn::Dataset valid_set;
            if (cfg.gan.enabled) {
                auto has_both = [&] {
                    bool h[2] = {false, false};
                    for (int y : j_y) h[y] = true;
                    return h[0] && h[1];
                };
                int extra = 0;
                while (!has_both() && extra < 8 * cfg.defense.window) {
                    pipe.run(cfg.defense.window, false, nullptr, nullptr, &j_x, &j_y,
                             nullptr);
                    extra += cfg.defense.window;
                }
                nn::Dataset small = small_set_with_both_labels(j_x, j_y, cfg.gan.n_real,
                                                               j_x.size());
                RngStream rng_g = rng_j.fork("gan");
                gan::CGan g = gan::train_cgan(small, cfg.gan.cgan, rng_g);
                RngStream rng_s = rng_j.fork("synth");
                train_set = gan::augment_dataset(
                    small, generate_balanced(g, small, cfg.gan.n_synthetic, rng_s));
                valid_set = train_set; // too few real samples for a held-out split
            } else {
                nn::SplitDataset sp =
                    nn::split_half(make_dataset(j_x, j_y, 0, j_x.size()));
                train_set = std::move(sp.train);
                valid_set = std::move(sp.test);
            }
            res.agent.net =
                fit_classifier(train_set, valid_set, cfg.tune_jammer, 2, 50,
                               nn::Activation::Tanh, tc, rng_j,
                               ThresholdRule::Balanced, &res.j_validation);
            res.agent.has_net = true;
            if (cfg.jam.p_avg >= 0.0) {
                res.agent.policy = jammer::calibrate_power_policy(
                    to_vec(res.agent.net.scores(train_set.x)), cfg.jam.p_min,
                    cfg.jam.p_max, cfg.jam.p_avg, res.agent.net.threshold);
                res.agent.policy_active = true;
            }
        }
    }

    if (needs_net && !res.agent.has_net) {
        throw config_error("deep-learning jammer has no trained classifier");
    }

    pipe.run(cfg.eval_slots, true, res.agent.has_net ? &res.agent.net : nullptr,
             res.agent.policy_active ? &res.agent.policy : nullptr, nullptr, nullptr,
             &res.log);
    res.transmitter = metrics::compute_metrics(res.log, metrics::Subject::Transmitter);
    res.jammer = metrics::compute_metrics(res.log, metrics::Subject::Jammer);
    return res;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::JammerType: return "jammer-type";
        case SweepAxis::Tau: return "tau";
        case SweepAxis::PAvg: return "p-avg";
        case SweepAxis::PDefense: return "p-d";
        case SweepAxis::MobilityCircleR: return "mobility-circle-r";
        case SweepAxis::MobilityCircleB: return "mobility-circle-b";
        case SweepAxis::GanCounts: return "gan-counts";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    for (SweepAxis a : {SweepAxis::JammerType, SweepAxis::Tau, SweepAxis::PAvg,
                        SweepAxis::PDefense, SweepAxis::MobilityCircleR,
                        SweepAxis::MobilityCircleB, SweepAxis::GanCounts}) {
        if (to_string(a) == s) return a;
    }
    throw config_error("unknown sweep axis: " + s);
}

std::string to_string(jammer::JammerKind kind) {
    switch (kind) {
        case jammer::JammerKind::None: return "none";
        case jammer::JammerKind::DeepLearning: return "dl";
        case jammer::JammerKind::Sensing: return "sensing";
        case jammer::JammerKind::Random: return "random";
    }
    return "?";
}

jammer::JammerKind jammer_kind_from_string(const std::string& s) {
    for (jammer::JammerKind k :
         {jammer::JammerKind::None, jammer::JammerKind::DeepLearning,
          jammer::JammerKind::Sensing, jammer::JammerKind::Random}) {
        if (to_string(k) == s) return k;
    }
    throw config_error("unknown jammer kind: " + s);
}

env::Vec2 circle_intersection(const env::Vec2& c1, double r1, const env::Vec2& c2,
                              double r2) {
    if (r1 < 0.0 || r2 < 0.0) throw config_error("circle_intersection: negative radius");
    const double dx = c2.x - c1.x;
    const double dy = c2.y - c1.y;
    const double d = std::hypot(dx, dy);
    if (d <= 0.0) throw config_error("circle_intersection: concentric circles");

    // Rounded radii (e.g. 4.14 for the tangent distance) may miss tangency by
    // a sliver; snap within 0.5% of the center distance.
    const double snap = 0.005 * d;
    if (d > r1 + r2) {
        if (d - (r1 + r2) > snap) {
            throw config_error("circle_intersection: circles do not meet");
        }
        return {c1.x + r1 * dx / d, c1.y + r1 * dy / d};
    }
    if (d < std::abs(r1 - r2)) {
        if (std::abs(r1 - r2) - d > snap) {
            throw config_error("circle_intersection: one circle contains the other");
        }
        const double s = r1 >= r2 ? 1.0 : -1.0;
        return {c1.x + s * r1 * dx / d, c1.y + s * r1 * dy / d};
    }

    const double a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
    const double px = c1.x + a * dx / d;
    const double py = c1.y + a * dy / d;
    const env::Vec2 p1{px + h * dy / d, py - h * dx / d};
    const env::Vec2 p2{px - h * dy / d, py + h * dx / d};
    auto side = [&](double x, double y) { return dx * (y - c1.y) - dy * (x - c1.x); };
    // Keep the branch on the opposite side of the c1-c2 line from the origin
    // (where T sits), matching the default placement of J.
    return side(p1.x, p1.y) * side(0.0, 0.0) <= 0.0 ? p1 : p2;
}

ScenarioConfig sweep_point_config(const ScenarioConfig& base, const SweepSpec& spec,
                                  std::size_t value_index) {
    ScenarioConfig cfg = base;
    switch (spec.axis) {
        case SweepAxis::JammerType:
            cfg.jam.kind = jammer_kind_from_string(spec.jammer_values.at(value_index));
            break;
        case SweepAxis::Tau:
            cfg.jam.kind = jammer::JammerKind::Sensing;
            cfg.jam.tau = spec.values.at(value_index);
            break;
        case SweepAxis::PAvg:
            cfg.jam.kind = jammer::JammerKind::DeepLearning;
            cfg.jam.p_avg = spec.values.at(value_index);
            break;
        case SweepAxis::PDefense:
            cfg.defense.p_d = spec.values.at(value_index);
            break;
        case SweepAxis::MobilityCircleR:
            cfg.geometry.pos_j =
                circle_intersection(base.geometry.pos_b, spec.values.at(value_index),
                                    base.geometry.pos_r, base.geometry.d_jr());
            break;
        case SweepAxis::MobilityCircleB:
            cfg.geometry.pos_j =
                circle_intersection(base.geometry.pos_b, base.geometry.d_bj(),
                                    base.geometry.pos_r, spec.values.at(value_index));
            break;
        case SweepAxis::GanCounts:
            cfg.jam.kind = jammer::JammerKind::DeepLearning;
            cfg.gan.enabled = true;
            cfg.gan.n_synthetic =
                static_cast<int>(std::llround(spec.values.at(value_index)));
            break;
    }
    return cfg;
}

SweepTable run_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
    const std::size_t n_values = spec.axis == SweepAxis::JammerType
                                     ? spec.jammer_values.size()
                                     : spec.values.size();
    if (n_values == 0) throw config_error("run_sweep: no axis values");
    if (spec.replications < 1) throw config_error("run_sweep: replications must be >= 1");

    SweepTable table;
    table.rows.reserve(n_values * static_cast<std::size_t>(spec.replications));
    for (std::size_t vi = 0; vi < n_values; ++vi) {
        ScenarioConfig cfg = sweep_point_config(base, spec, vi);
        for (int rep = 0; rep < spec.replications; ++rep) {
            // Replication seeds are shared across axis values.
            cfg.seed =
                RngStream::derive(base.seed, "rep-" + std::to_string(rep)).next_u64();
            ScenarioResult r = run_scenario(cfg);
            SweepRow row;
            row.axis = to_string(spec.axis);
            row.label = spec.axis == SweepAxis::JammerType
                            ? spec.jammer_values[vi]
                            : metrics::format_double(spec.values[vi]);
            row.value = spec.axis == SweepAxis::JammerType ? static_cast<double>(vi)
                                                           : spec.values[vi];
            row.replication = rep;
            row.seed = cfg.seed;
            row.transmitter = r.transmitter;
            row.jammer = r.jammer;
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string sweep_to_csv(const SweepTable& table) {
    std::ostringstream out;
    out << "axis,label,value,replication,seed,t_throughput,t_success_ratio,"
           "t_e_md,t_e_fa,j_e_md,j_e_fa,mean_jam_power\n";
    auto opt = [](double v, bool defined) {
        return defined ? metrics::format_double(v) : std::string();
    };
    for (const SweepRow& r : table.rows) {
        out << r.axis << ',' << r.label << ',' << metrics::format_double(r.value) << ','
            << r.replication << ',' << r.seed << ','
            << metrics::format_double(r.transmitter.throughput) << ','
            << opt(r.transmitter.success_ratio, r.transmitter.success_ratio_defined)
            << ',' << opt(r.transmitter.e_md, r.transmitter.e_md_defined) << ','
            << opt(r.transmitter.e_fa, r.transmitter.e_fa_defined) << ','
            << opt(r.jammer.e_md, r.jammer.e_md_defined) << ','
            << opt(r.jammer.e_fa, r.jammer.e_fa_defined) << ','
            << metrics::format_double(r.jammer.mean_jam_power) << '\n';
    }
    return out.str();
}

std::string sweep_to_json(const SweepTable& table) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SweepRow& r : table.rows) {
        nlohmann::json o;
        o["axis"] = r.axis;
        o["label"] = r.label;
        o["value"] = r.value;
        o["replication"] = r.replication;
        o["seed"] = r.seed;
        o["transmitter"] = metrics_json(r.transmitter);
        o["jammer"] = metrics_json(r.jammer);
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

namespace {
void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}
}  // namespace

void export_sweep_csv(const SweepTable& table, const std::string& path) {
    write_file(path, sweep_to_csv(table));
}

void export_sweep_json(const SweepTable& table, const std::string& path) {
    write_file(path, sweep_to_json(table));
}

GanComparison run_gan_comparison(const ScenarioConfig& cfg, int n_large, int n_test) {
    validate(cfg);
    const int n_real = cfg.gan.n_real;
    if (n_large < n_real) throw config_error("run_gan_comparison: n_large < n_real");
    if (n_test < 2) throw config_error("run_gan_comparison: n_test must be >= 2");

    Pipeline pipe(cfg);
    std::vector<Eigen::VectorXd> xs;
    std::vector<int> ys;
    pipe.run(n_large + n_test, false, nullptr, nullptr, &xs, &ys, nullptr);

    const std::size_t pool_size = static_cast<std::size_t>(n_large);
    nn::Dataset pool = make_dataset(xs, ys, 0, pool_size);
    nn::Dataset test = make_dataset(xs, ys, pool_size, xs.size());
    nn::Dataset small = small_set_with_both_labels(xs, ys, n_real, pool_size);

    RngStream rng = RngStream::derive(cfg.seed, "gan-compare");
    nn::TrainConfig tc;
    auto max_error_on_test = [&](const nn::Dataset& train, RngStream sub) {
        nn::MlpNetwork net =
            fit_classifier(train, train, false, 2, 50, nn::Activation::Tanh, tc, sub,
                           ThresholdRule::MinMax, nullptr);
        nn::ThresholdResult r = nn::classification_errors(
            to_vec(net.scores(test.x)), to_labels(test.y), net.threshold);
        return r.max_error();
    };

    GanComparison out;
    out.n_real = n_real;
    out.n_synthetic = cfg.gan.n_synthetic;
    out.n_large = n_large;
    out.err_real_small = max_error_on_test(small, rng.fork("small"));

    RngStream rng_g = rng.fork("gan");
    gan::CGan g = gan::train_cgan(small, cfg.gan.cgan, rng_g);
    RngStream rng_s = rng.fork("synth");
    nn::Dataset augmented =
        gan::augment_dataset(small, generate_balanced(g, small, cfg.gan.n_synthetic, rng_s));
    out.err_augmented = max_error_on_test(augmented, rng.fork("aug"));
    out.err_real_large = max_error_on_test(pool, rng.fork("large"));
    return out;
}

AdaptResult run_adaptive_defense(const ScenarioConfig& base, RetrainPolicy retrain) {
    validate(base);
    PretrainedJammer fixed;
    const bool use_fixed = retrain == RetrainPolicy::Never;
    if (use_fixed) {
        ScenarioConfig cfg0 = base;
        cfg0.defense.p_d = 0.0;
        fixed = run_scenario(cfg0).agent;
    }

    AdaptResult out;
    transmitter::DefenseSearch search;
    while (!search.converged()) {
        const double p_d = search.next_candidate();
        ScenarioConfig cfg = base;
        cfg.defense.p_d = p_d;
        // Same seed for every candidate: points differ only through p_d.
        ScenarioResult r = run_scenario(cfg, use_fixed ? &fixed : nullptr);
        search.report(r.transmitter.throughput);
        out.trace.push_back({p_d, r.transmitter.throughput});
    }
    out.best_p_d = search.best_p_d();
    out.iterations = search.iterations();
    return out;
}

namespace {

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error(where + ": not a number: " + v);
    }
}

int parse_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(d);
    } catch (const std::exception&) {
        throw config_error(where + ": not an integer: " + v);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const unsigned long long d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error(where + ": not an unsigned integer: " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error(where + ": not a boolean: " + v);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void apply_kv(ScenarioConfig& cfg, const std::string& sec, const std::string& key,
              const std::string& val, const std::string& where) {
    auto num = [&] { return parse_double(val, where); };
    auto integer = [&] { return parse_int(val, where); };
    auto boolean = [&] { return parse_bool(val, where); };
    const std::string full = sec.empty() ? key : sec + "." + key;

    if (sec == "geometry") {
        if (key == "t_x") cfg.geometry.pos_t.x = num();
        else if (key == "t_y") cfg.geometry.pos_t.y = num();
        else if (key == "r_x") cfg.geometry.pos_r.x = num();
        else if (key == "r_y") cfg.geometry.pos_r.y = num();
        else if (key == "b_x") cfg.geometry.pos_b.x = num();
        else if (key == "b_y") cfg.geometry.pos_b.y = num();
        else if (key == "j_x") cfg.geometry.pos_j.x = num();
        else if (key == "j_y") cfg.geometry.pos_j.y = num();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "channel") {
        if (key == "noise_power") cfg.channel.noise_power = num();
        else if (key == "pathloss_exponent") cfg.channel.pathloss_exponent = num();
        else if (key == "shadowing_sigma_db") cfg.channel.shadowing_sigma_db = num();
        else if (key == "external_interference") cfg.channel.external_interference = num();
        else if (key == "sensing_noise_jitter") cfg.channel.sensing_noise_jitter = num();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "traffic") {
        if (key == "lambda") cfg.lambda = num();
        else if (key == "activation_prob") cfg.activation_prob = num();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "radio") {
        if (key == "p_t") cfg.p_t = num();
        else if (key == "p_b") cfg.p_b = num();
        else if (key == "beta") cfg.beta = num();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "transmitter") {
        if (key == "k") cfg.k_t = integer();
        else if (key == "tune") cfg.tune_transmitter = boolean();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "jammer") {
        if (key == "kind") cfg.jam.kind = jammer_kind_from_string(val);
        else if (key == "tau") cfg.jam.tau = num();
        else if (key == "p_jam") cfg.jam.p_jam = num();
        else if (key == "power") cfg.jam.fixed_power = num();
        else if (key == "p_avg") cfg.jam.p_avg = num();
        else if (key == "p_min") cfg.jam.p_min = num();
        else if (key == "p_max") cfg.jam.p_max = num();
        else if (key == "k") cfg.k_j = integer();
        else if (key == "tune") cfg.tune_jammer = boolean();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "defense") {
        if (key == "p_d") cfg.defense.p_d = num();
        else if (key == "window") cfg.defense.window = integer();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "gan") {
        if (key == "enabled") cfg.gan.enabled = boolean();
        else if (key == "n_real") cfg.gan.n_real = integer();
        else if (key == "n_synthetic") cfg.gan.n_synthetic = integer();
        else if (key == "epochs") cfg.gan.cgan.epochs = integer();
        else throw config_error(where + ": unknown key " + full);
    } else if (sec == "run") {
        if (key == "seed") cfg.seed = parse_u64(val, where);
        else if (key == "train_slots") cfg.train_slots = integer();
        else if (key == "eval_slots") cfg.eval_slots = integer();
        else throw config_error(where + ": unknown key " + full);
    } else {
        throw config_error(where + ": unknown section [" + sec + "]");
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error(where + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error(where + ": expected key = value");
        }
        apply_kv(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                 where);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

}  // namespace jamsim::harness
