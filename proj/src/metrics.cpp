#include "jamsim/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jamsim::metrics {

Metrics compute_metrics(const SlotLog& log, Subject subject) {
    if (log.empty()) {
        throw std::invalid_argument("compute_metrics: empty log");
    }

    Metrics m;
    m.n_slots = static_cast<long>(log.size());
    double jam_power_sum = 0.0;
    long md_num = 0, md_den = 0, fa_num = 0, fa_den = 0;

    for (const auto& r : log) {
        if (r.t_transmitted) ++m.n_transmissions;
        if (r.success) ++m.n_successes;
        jam_power_sum += r.jam_power;

        if (subject == Subject::Transmitter) {
            // Classifier prediction is the pre-flip decision.
            const bool predicted_idle = r.t_transmitted != r.flipped;
            if (!r.channel_busy) {
                ++md_den;
                if (!predicted_idle) ++md_num; // idle predicted busy
            } else {
                ++fa_den;
                if (predicted_idle) ++fa_num; // busy predicted idle
            }
        } else {
            if (r.counterfactual_success) {
                ++md_den;
                if (!r.jam_decision) ++md_num; // missed a would-be success
            } else {
                ++fa_den;
                if (r.jam_decision) ++fa_num; // jammed with nothing to jam
            }
        }
    }

    m.throughput = static_cast<double>(m.n_successes) / m.n_slots;
    if (m.n_transmissions > 0) {
        m.success_ratio = static_cast<double>(m.n_successes) / m.n_transmissions;
        m.success_ratio_defined = true;
    }
    if (md_den > 0) {
        m.e_md = static_cast<double>(md_num) / md_den;
        m.e_md_defined = true;
    }
    if (fa_den > 0) {
        m.e_fa = static_cast<double>(fa_num) / fa_den;
        m.e_fa_defined = true;
    }
    m.mean_jam_power = jam_power_sum / m.n_slots;
    return m;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_slot_log_csv(const SlotLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_slot_log_csv: cannot open " + path);
    out << "slot,channel_busy,t_transmitted,t_score,flipped,jam_decision,"
           "jam_power,success,counterfactual_success,ack\n";
    for (const auto& r : log) {
        out << r.slot << ',' << r.channel_busy << ',' << r.t_transmitted << ','
            << format_double(r.t_score) << ',' << r.flipped << ',' << r.jam_decision
            << ',' << format_double(r.jam_power) << ',' << r.success << ','
            << r.counterfactual_success << ',' << r.ack << '\n';
    }
}

SlotLog read_slot_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_slot_log_csv: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    SlotLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        SlotRecord r;
        auto next = [&]() {
            if (!std::getline(ss, field, ',')) {
                throw std::runtime_error("read_slot_log_csv: malformed row in " + path);
            }
            return field;
        };
        r.slot = std::stol(next());
        r.channel_busy = next() == "1";
        r.t_transmitted = next() == "1";
        r.t_score = std::stod(next());
        r.flipped = next() == "1";
        r.jam_decision = next() == "1";
        r.jam_power = std::stod(next());
        r.success = next() == "1";
        r.counterfactual_success = next() == "1";
        r.ack = next() == "1";
        log.push_back(r);
    }
    return log;
}

std::string metrics_to_json(const Metrics& m) {
    std::ostringstream out;
    auto ratio = [&](double v, bool defined) {
        return defined ? format_double(v) : std::string("null");
    };
    out << "{\n"
        << "  \"throughput\": " << format_double(m.throughput) << ",\n"
        << "  \"success_ratio\": " << ratio(m.success_ratio, m.success_ratio_defined)
        << ",\n"
        << "  \"e_md\": " << ratio(m.e_md, m.e_md_defined) << ",\n"
        << "  \"e_fa\": " << ratio(m.e_fa, m.e_fa_defined) << ",\n"
        << "  \"n_slots\": " << m.n_slots << ",\n"
        << "  \"n_transmissions\": " << m.n_transmissions << ",\n"
        << "  \"n_successes\": " << m.n_successes << ",\n"
        << "  \"mean_jam_power\": " << format_double(m.mean_jam_power) << "\n"
        << "}\n";
    return out.str();
}

void write_metrics_json(const Metrics& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_metrics_json: cannot open " + path);
    out << metrics_to_json(m);
}

}  // namespace jamsim::metrics
