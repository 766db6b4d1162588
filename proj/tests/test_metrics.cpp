#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "jamsim/metrics.hpp"

using namespace jamsim::metrics;

namespace {

// 500 slots shaped to known counts: 400 transmissions, 383 successes,
// 383 counterfactual successes of which 16 go unjammed, and 17 of the 117
// remaining slots jammed anyway.
SlotLog reference_log() {
    SlotLog log;
    for (int i = 0; i < 500; ++i) {
        SlotRecord r;
        r.slot = i;
        if (i < 383) {
            r.t_transmitted = true;
            r.success = true;
            r.counterfactual_success = true;
            r.ack = true;
            r.jam_decision = i >= 16; // 16 misdetections
            r.jam_power = r.jam_decision ? 1000.0 : 0.0;
        } else {
            r.channel_busy = true;
            r.t_transmitted = i < 400;
            r.jam_decision = i < 400; // 17 false alarms
            r.jam_power = r.jam_decision ? 1000.0 : 0.0;
        }
        log.push_back(r);
    }
    return log;
}

}  // namespace

TEST_CASE("metrics oracle on a hand-built log") {
    SlotLog log = reference_log();

    Metrics t = compute_metrics(log, Subject::Transmitter);
    CHECK(t.throughput == doctest::Approx(383.0 / 500.0));
    CHECK(t.n_slots == 500);
    CHECK(t.n_transmissions == 400);
    CHECK(t.n_successes == 383);
    REQUIRE(t.success_ratio_defined);
    CHECK(t.success_ratio == doctest::Approx(383.0 / 400.0));

    Metrics j = compute_metrics(log, Subject::Jammer);
    REQUIRE(j.e_md_defined);
    REQUIRE(j.e_fa_defined);
    CHECK(j.e_md == doctest::Approx(16.0 / 383.0)); // 4.18%
    CHECK(j.e_fa == doctest::Approx(17.0 / 117.0)); // 14.53%
    CHECK(j.mean_jam_power == doctest::Approx((367.0 + 17.0) * 1000.0 / 500.0));
}

TEST_CASE("transmitter errors use the pre-flip prediction") {
    SlotLog log;
    // Idle slot, transmitted because a busy prediction was flipped:
    // the classifier itself was wrong, so it counts as a misdetection.
    SlotRecord a;
    a.t_transmitted = true;
    a.flipped = true;
    log.push_back(a);
    // Busy slot, predicted idle, flip prevented the transmission: still a
    // false alarm for the classifier.
    SlotRecord b;
    b.channel_busy = true;
    b.t_transmitted = false;
    b.flipped = true;
    log.push_back(b);

    Metrics t = compute_metrics(log, Subject::Transmitter);
    CHECK(t.e_md == 1.0);
    CHECK(t.e_fa == 1.0);
}

TEST_CASE("undefined ratios are flagged") {
    SlotLog log;
    SlotRecord r;
    r.channel_busy = true; // no idle slot, no transmissions, no cf successes
    log.push_back(r);
    Metrics t = compute_metrics(log, Subject::Transmitter);
    CHECK_FALSE(t.success_ratio_defined);
    CHECK_FALSE(t.e_md_defined);
    CHECK(t.e_fa_defined);
    Metrics j = compute_metrics(log, Subject::Jammer);
    CHECK_FALSE(j.e_md_defined);

    CHECK_THROWS_AS(compute_metrics(SlotLog{}, Subject::Transmitter),
                    std::invalid_argument);
}

TEST_CASE("slot log csv round trip") {
    SlotLog log = reference_log();
    log[3].t_score = 0.12345678901234567;
    log[4].jam_power = 987.654321;
    const std::string path = "test_metrics_log.csv";
    write_slot_log_csv(log, path);
    SlotLog back = read_slot_log_csv(path);
    REQUIRE(back.size() == log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(back[i].slot == log[i].slot);
        CHECK(back[i].channel_busy == log[i].channel_busy);
        CHECK(back[i].t_transmitted == log[i].t_transmitted);
        CHECK(back[i].t_score == log[i].t_score);
        CHECK(back[i].flipped == log[i].flipped);
        CHECK(back[i].jam_decision == log[i].jam_decision);
        CHECK(back[i].jam_power == log[i].jam_power);
        CHECK(back[i].success == log[i].success);
        CHECK(back[i].counterfactual_success == log[i].counterfactual_success);
        CHECK(back[i].ack == log[i].ack);
    }

    // Same log, byte-identical file.
    const std::string path2 = "test_metrics_log2.csv";
    write_slot_log_csv(log, path2);
    std::ifstream f1(path), f2(path2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("metrics json uses null for undefined ratios") {
    SlotLog log;
    SlotRecord r;
    r.channel_busy = true;
    log.push_back(r);
    Metrics t = compute_metrics(log, Subject::Transmitter);
    const std::string js = metrics_to_json(t);
    CHECK(js.find("\"success_ratio\": null") != std::string::npos);
    CHECK(js.find("\"e_md\": null") != std::string::npos);
    CHECK(js.find("\"e_fa\": 0") != std::string::npos);
    CHECK(js.find("\"n_slots\": 1") != std::string::npos);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.766, 1.0 / 3.0, 1e-12, 12345.6789, 0.0, -2.5}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(383.0 / 500.0) == "0.766");
}
