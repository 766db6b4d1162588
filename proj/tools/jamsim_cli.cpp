// Command-line front end: scenario runs, sweeps, GAN augmentation studies,
// adaptive defense search and metric export.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jamsim/harness.hpp"
#include "json.hpp"

namespace {

using jamsim::harness::ScenarioConfig;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string jammer;
    double tau = 3.4;
    double p_jam = 0.5;
    double p_avg = -1.0;
    double p_d = 0.0;
    int gan_real = 10;
    int gan_synth = 500;
    int gan_epochs = 3500;

    CLI::App* cmd = nullptr;

    void attach(CLI::App* c) {
        cmd = c;
        c->add_option("--config", config_path, "scenario config file");
        c->add_option("--seed", seed, "master seed");
        c->add_option("--jammer", jammer, "jammer kind")
            ->check(CLI::IsMember({"none", "dl", "sensing", "random"}));
        c->add_option("--tau", tau, "sensing-jammer threshold");
        c->add_option("--p-jam", p_jam, "random-jammer jamming probability");
        c->add_option("--p-avg", p_avg, "jammer average power budget (negative: none)");
        c->add_option("--p-d", p_d, "defense level in [0,1]");
        c->add_option("--gan-real", gan_real, "real samples for GAN training");
        c->add_option("--gan-synth", gan_synth, "synthetic samples to generate");
        c->add_option("--gan-epochs", gan_epochs, "GAN training epochs");
    }

    ScenarioConfig build(bool enable_gan = false) const {
        ScenarioConfig cfg = config_path.empty()
                                 ? ScenarioConfig{}
                                 : jamsim::harness::load_config(config_path);
        if (cmd->count("--seed")) cfg.seed = seed;
        if (cmd->count("--jammer")) {
            cfg.jam.kind = jamsim::harness::jammer_kind_from_string(jammer);
        }
        if (cmd->count("--tau")) cfg.jam.tau = tau;
        if (cmd->count("--p-jam")) cfg.jam.p_jam = p_jam;
        if (cmd->count("--p-avg")) cfg.jam.p_avg = p_avg;
        if (cmd->count("--p-d")) cfg.defense.p_d = p_d;
        if (cmd->count("--gan-real")) cfg.gan.n_real = gan_real;
        if (cmd->count("--gan-synth")) cfg.gan.n_synthetic = gan_synth;
        if (cmd->count("--gan-epochs")) cfg.gan.cgan.epochs = gan_epochs;
        if (enable_gan) cfg.gan.enabled = true;
        return cfg;
    }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

nlohmann::json metrics_json(const jamsim::metrics::Metrics& m) {
    return nlohmann::json::parse(jamsim::metrics::metrics_to_json(m));
}

int run_cmd(const CommonOpts& opts, const std::string& out_prefix) {
    ScenarioConfig cfg = opts.build();
    jamsim::harness::ScenarioResult res = jamsim::harness::run_scenario(cfg);

    nlohmann::json summary;
    summary["seed"] = cfg.seed;
    summary["jammer"] = jamsim::harness::to_string(cfg.jam.kind);
    summary["p_d"] = cfg.defense.p_d;
    summary["transmitter"] = metrics_json(res.transmitter);
    summary["jammer_metrics"] = metrics_json(res.jammer);
    std::cout << summary.dump(2) << "\n";

    if (!out_prefix.empty()) {
        jamsim::metrics::write_slot_log_csv(res.log, out_prefix + "_log.csv");
        jamsim::metrics::write_metrics_json(res.transmitter,
                                            out_prefix + "_transmitter.json");
        jamsim::metrics::write_metrics_json(res.jammer, out_prefix + "_jammer.json");
    }
    return 0;
}

int sweep_cmd(const CommonOpts& opts, const std::string& axis,
              const std::vector<std::string>& values, int replications,
              const std::string& format, const std::string& out) {
    ScenarioConfig base = opts.build();
    jamsim::harness::SweepSpec spec;
    spec.axis = jamsim::harness::sweep_axis_from_string(axis);
    spec.replications = replications;
    if (spec.axis == jamsim::harness::SweepAxis::JammerType) {
        spec.jammer_values = values;
    } else {
        for (const std::string& v : values) {
            try {
                spec.values.push_back(std::stod(v));
            } catch (const std::exception&) {
                throw jamsim::harness::config_error("--values: not a number: " + v);
            }
        }
    }
    jamsim::harness::SweepTable table = jamsim::harness::run_sweep(base, spec);
    const std::string text = format == "json" ? jamsim::harness::sweep_to_json(table)
                                              : jamsim::harness::sweep_to_csv(table);
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text(out, text);
    }
    return 0;
}

int gan_cmd(const CommonOpts& opts, int n_large, int n_test, const std::string& out) {
    ScenarioConfig cfg = opts.build(/*enable_gan=*/true);
    jamsim::harness::GanComparison c =
        jamsim::harness::run_gan_comparison(cfg, n_large, n_test);
    nlohmann::json o;
    o["n_real"] = c.n_real;
    o["n_synthetic"] = c.n_synthetic;
    o["n_large"] = c.n_large;
    o["max_error_real_small"] = c.err_real_small;
    o["max_error_augmented"] = c.err_augmented;
    o["max_error_real_large"] = c.err_real_large;
    const std::string text = o.dump(2) + "\n";
    std::cout << text;
    if (!out.empty()) write_text(out, text);
    return 0;
}

int adapt_cmd(const CommonOpts& opts, const std::string& retrain,
              const std::string& out) {
    ScenarioConfig base = opts.build();
    const auto policy = retrain == "never"
                            ? jamsim::harness::RetrainPolicy::Never
                            : jamsim::harness::RetrainPolicy::PerIteration;
    jamsim::harness::AdaptResult res =
        jamsim::harness::run_adaptive_defense(base, policy);
    nlohmann::json o;
    o["best_p_d"] = res.best_p_d;
    o["iterations"] = res.iterations;
    o["trace"] = nlohmann::json::array();
    for (const auto& step : res.trace) {
        o["trace"].push_back({{"p_d", step.p_d}, {"throughput", step.throughput}});
    }
    const std::string text = o.dump(2) + "\n";
    std::cout << text;
    if (!out.empty()) write_text(out, text);
    return 0;
}

int export_cmd(const std::string& log_path, const std::string& subject,
               const std::string& format, const std::string& out) {
    jamsim::metrics::SlotLog log = jamsim::metrics::read_slot_log_csv(log_path);
    const auto subj = subject == "jammer" ? jamsim::metrics::Subject::Jammer
                                          : jamsim::metrics::Subject::Transmitter;
    jamsim::metrics::Metrics m = jamsim::metrics::compute_metrics(log, subj);
    std::string text;
    if (format == "csv") {
        std::ostringstream csv;
        auto opt = [](double v, bool defined) {
            return defined ? jamsim::metrics::format_double(v) : std::string();
        };
        csv << "throughput,success_ratio,e_md,e_fa,n_slots,n_transmissions,"
               "n_successes,mean_jam_power\n"
            << jamsim::metrics::format_double(m.throughput) << ','
            << opt(m.success_ratio, m.success_ratio_defined) << ','
            << opt(m.e_md, m.e_md_defined) << ',' << opt(m.e_fa, m.e_fa_defined) << ','
            << m.n_slots << ',' << m.n_transmissions << ',' << m.n_successes << ','
            << jamsim::metrics::format_double(m.mean_jam_power) << '\n';
        text = csv.str();
    } else {
        text = jamsim::metrics::metrics_to_json(m);
    }
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text(out, text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jamming-game simulator: adversarial spectrum sensing, "
                 "power-controlled jamming, GAN data augmentation and a "
                 "causative-attack defense"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, gan_opts, adapt_opts;
    std::string run_out, sweep_axis, sweep_format = "csv", sweep_out;
    std::vector<std::string> sweep_values;
    int sweep_reps = 5;
    int gan_large = 500, gan_test = 500;
    std::string gan_out, adapt_retrain = "per-iteration", adapt_out;
    std::string export_log, export_subject = "transmitter", export_format = "json",
                export_out;

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run_opts.attach(run);
    run->add_option("--out", run_out, "output prefix for slot log and metrics");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep_opts.attach(sweep);
    sweep->add_option("--axis", sweep_axis, "sweep axis")
        ->required()
        ->check(CLI::IsMember({"jammer-type", "tau", "p-avg", "p-d",
                               "mobility-circle-r", "mobility-circle-b",
                               "gan-counts"}));
    sweep->add_option("--values", sweep_values, "axis values")->required();
    sweep->add_option("--replications", sweep_reps, "seeds per point");
    sweep->add_option("--format", sweep_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", sweep_out, "output file (default: stdout)");

    CLI::App* ganc = app.add_subcommand(
        "gan-augment", "compare classifiers with and without GAN augmentation");
    gan_opts.attach(ganc);
    ganc->add_option("--n-large", gan_large, "all-real comparison set size");
    ganc->add_option("--n-test", gan_test, "held-out test set size");
    ganc->add_option("--out", gan_out, "output file (default: stdout only)");

    CLI::App* adapt =
        app.add_subcommand("adapt-defense", "search for the best defense level");
    adapt_opts.attach(adapt);
    adapt->add_option("--retrain-jammer", adapt_retrain, "jammer retraining schedule")
        ->check(CLI::IsMember({"per-iteration", "never"}));
    adapt->add_option("--out", adapt_out, "output file (default: stdout only)");

    CLI::App* exp = app.add_subcommand("export", "recompute metrics from a slot log");
    exp->add_option("--log", export_log, "slot log CSV")->required();
    exp->add_option("--subject", export_subject, "metrics subject")
        ->check(CLI::IsMember({"transmitter", "jammer"}));
    exp->add_option("--format", export_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    exp->add_option("--out", export_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return run_cmd(run_opts, run_out);
        if (sweep->parsed()) {
            return sweep_cmd(sweep_opts, sweep_axis, sweep_values, sweep_reps,
                             sweep_format, sweep_out);
        }
        if (ganc->parsed()) return gan_cmd(gan_opts, gan_large, gan_test, gan_out);
        if (adapt->parsed()) return adapt_cmd(adapt_opts, adapt_retrain, adapt_out);
        if (exp->parsed()) {
            return export_cmd(export_log, export_subject, export_format, export_out);
        }
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const jamsim::harness::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const jamsim::nn::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const jamsim::env::invalid_geometry& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
