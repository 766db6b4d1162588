#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "jamsim/harness.hpp"

using namespace jamsim;
using namespace jamsim::harness;

namespace {

// Small but complete scenario for fast end-to-end checks.
ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.train_slots = 120;
    cfg.eval_slots = 100;
    cfg.jam.kind = jammer::JammerKind::Sensing;
    cfg.seed = 17;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const std::string text =
        "# comment line\n"
        "[run]\n"
        "seed = 99\n"
        "train_slots = 800\n"
        "[jammer]\n"
        "kind = random   ; trailing comment\n"
        "p_jam = 0.25\n"
        "p_avg = 600\n"
        "[defense]\n"
        "p_d = 0.3\n"
        "[geometry]\n"
        "j_x = 5\n"
        "j_y = 5\n"
        "[channel]\n"
        "shadowing_sigma_db = 2.5\n"
        "[transmitter]\n"
        "tune = true\n";
    ScenarioConfig cfg = parse_config(text);
    CHECK(cfg.seed == 99);
    CHECK(cfg.train_slots == 800);
    CHECK(cfg.eval_slots == 500); // untouched default
    CHECK(cfg.jam.kind == jammer::JammerKind::Random);
    CHECK(cfg.jam.p_jam == 0.25);
    CHECK(cfg.jam.p_avg == 600.0);
    CHECK(cfg.defense.p_d == 0.3);
    CHECK(cfg.geometry.pos_j.x == 5.0);
    CHECK(cfg.geometry.pos_j.y == 5.0);
    CHECK(cfg.channel.shadowing_sigma_db == 2.5);
    CHECK(cfg.tune_transmitter);
}

TEST_CASE("config parse errors carry the line location") {
    CHECK_THROWS_AS(parse_config("[run]\nbogus = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("[run]\nseed 99\n"), config_error);
    CHECK_THROWS_AS(parse_config("[run\nseed = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("[run]\nseed = banana\n"), config_error);
    CHECK_THROWS_AS(parse_config("[jammer]\nkind = laser\n"), config_error);
    try {
        parse_config("[run]\n\nseed = oops\n", "test.cfg");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("test.cfg:3") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("does_not_exist.cfg"), config_error);
}

TEST_CASE("config validation") {
    ScenarioConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.defense.p_d = 1.5;
    CHECK_THROWS_AS(validate(cfg), config_error);
    cfg = ScenarioConfig{};
    cfg.train_slots = 10;
    CHECK_THROWS_AS(validate(cfg), config_error);
    cfg = ScenarioConfig{};
    cfg.geometry.pos_j = cfg.geometry.pos_r;
    CHECK_THROWS_AS(validate(cfg), config_error);
    cfg = ScenarioConfig{};
    cfg.jam.p_avg = 100.0;
    cfg.jam.p_min = 900.0;
    cfg.jam.p_max = 800.0;
    CHECK_THROWS_AS(validate(cfg), config_error);
}

TEST_CASE("circle intersection oracle") {
    const env::Vec2 b{0.0, 10.0};
    const env::Vec2 r{10.0, 0.0};

    // Both radii 10: the far-side intersection is the default jammer spot.
    env::Vec2 p = circle_intersection(b, 10.0, r, 10.0);
    CHECK(p.x == doctest::Approx(10.0));
    CHECK(p.y == doctest::Approx(10.0));

    // Tangent case: the rounded 4.14 radius still lands between the centers.
    p = circle_intersection(b, 10.0 * (std::sqrt(2.0) - 1.0), r, 10.0);
    CHECK(std::hypot(p.x - b.x, p.y - b.y) ==
          doctest::Approx(10.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-6));
    CHECK(std::hypot(p.x - r.x, p.y - r.y) == doctest::Approx(10.0).epsilon(0.01));

    // Outer tangent with the rounded 24.14.
    p = circle_intersection(b, 10.0 * (std::sqrt(2.0) + 1.0), r, 10.0);
    CHECK(std::hypot(p.x - b.x, p.y - b.y) ==
          doctest::Approx(10.0 * (std::sqrt(2.0) + 1.0)).epsilon(1e-6));

    CHECK_THROWS_AS(circle_intersection(b, 1.0, r, 1.0), config_error);
    CHECK_THROWS_AS(circle_intersection(b, 30.0, r, 1.0), config_error);
    CHECK_THROWS_AS(circle_intersection(b, 5.0, b, 5.0), config_error);
    CHECK_THROWS_AS(circle_intersection(b, -1.0, r, 5.0), config_error);
}

TEST_CASE("sweep point configs move only the axis under study") {
    ScenarioConfig base;
    SweepSpec spec;
    spec.axis = SweepAxis::Tau;
    spec.values = {2.0, 5.0};
    ScenarioConfig p0 = sweep_point_config(base, spec, 0);
    CHECK(p0.jam.kind == jammer::JammerKind::Sensing);
    CHECK(p0.jam.tau == 2.0);
    CHECK(p0.geometry.pos_j.x == base.geometry.pos_j.x);

    spec.axis = SweepAxis::PAvg;
    spec.values = {400.0};
    ScenarioConfig p1 = sweep_point_config(base, spec, 0);
    CHECK(p1.jam.kind == jammer::JammerKind::DeepLearning);
    CHECK(p1.jam.p_avg == 400.0);

    spec.axis = SweepAxis::MobilityCircleB;
    spec.values = {15.0};
    ScenarioConfig p2 = sweep_point_config(base, spec, 0);
    CHECK(p2.geometry.d_bj() == doctest::Approx(10.0));
    CHECK(p2.geometry.d_jr() == doctest::Approx(15.0));

    spec.axis = SweepAxis::MobilityCircleR;
    spec.values = {20.0};
    ScenarioConfig p3 = sweep_point_config(base, spec, 0);
    CHECK(p3.geometry.d_jr() == doctest::Approx(10.0));
    CHECK(p3.geometry.d_bj() == doctest::Approx(20.0));
}

TEST_CASE("sweep csv and json exports") {
    SweepTable empty;
    CHECK(sweep_to_csv(empty) ==
          "axis,label,value,replication,seed,t_throughput,t_success_ratio,"
          "t_e_md,t_e_fa,j_e_md,j_e_fa,mean_jam_power\n");
    CHECK(sweep_to_json(empty) == "[]\n");

    SweepTable table;
    SweepRow row;
    row.axis = "tau";
    row.label = "2";
    row.value = 2.0;
    row.replication = 1;
    row.seed = 42;
    row.transmitter.throughput = 0.5;
    row.jammer.e_md = 0.25;
    row.jammer.e_md_defined = true;
    table.rows.push_back(row);

    const std::string csv = sweep_to_csv(table);
    CHECK(csv.find("tau,2,2,1,42,0.5,") != std::string::npos);
    CHECK(csv == sweep_to_csv(table)); // deterministic

    // Undefined ratios export as empty CSV fields.
    std::istringstream lines(csv);
    std::string header, data;
    std::getline(lines, header);
    std::getline(lines, data);
    CHECK(data.find(",,") != std::string::npos);

    const std::string path1 = "test_harness_sweep1.csv";
    const std::string path2 = "test_harness_sweep2.csv";
    export_sweep_csv(table, path1);
    export_sweep_csv(table, path2);
    CHECK(slurp(path1) == csv);
    CHECK(slurp(path1) == slurp(path2));
    std::remove(path1.c_str());
    std::remove(path2.c_str());

    const std::string js = sweep_to_json(table);
    CHECK(js.find("\"axis\": \"tau\"") != std::string::npos);
    CHECK(js.find("\"replication\": 1") != std::string::npos);
}

TEST_CASE("scenario runs are bit-deterministic in the config") {
    ScenarioConfig cfg = small_config();
    ScenarioResult a = run_scenario(cfg);
    ScenarioResult b = run_scenario(cfg);
    REQUIRE(a.log.size() == b.log.size());
    CHECK(a.log.size() == static_cast<std::size_t>(cfg.eval_slots));
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].t_score == b.log[i].t_score);
        CHECK(a.log[i].success == b.log[i].success);
        CHECK(a.log[i].jam_power == b.log[i].jam_power);
    }
    CHECK(a.transmitter.throughput == b.transmitter.throughput);

    // A different seed produces a different world.
    cfg.seed = 18;
    ScenarioResult c = run_scenario(cfg);
    bool differs = false;
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        if (a.log[i].t_score != c.log[i].t_score) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("sweep shares replication seeds across axis values") {
    ScenarioConfig base = small_config();
    SweepSpec spec;
    spec.axis = SweepAxis::Tau;
    spec.values = {2.0, 4.0};
    spec.replications = 2;
    SweepTable table = run_sweep(base, spec);
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[0].seed == table.rows[2].seed); // rep 0 at both taus
    CHECK(table.rows[1].seed == table.rows[3].seed);
    CHECK(table.rows[0].seed != table.rows[1].seed);
    CHECK(table.rows[0].label == "2");
    CHECK(table.rows[3].label == "4");
    const std::uint64_t expect =
        RngStream::derive(base.seed, "rep-0").next_u64();
    CHECK(table.rows[0].seed == expect);

    SweepSpec bad;
    bad.axis = SweepAxis::Tau;
    CHECK_THROWS_AS(run_sweep(base, bad), config_error);
}

TEST_CASE("adaptive defense trace matches the search") {
    ScenarioConfig cfg = small_config();
    cfg.defense.window = 100;
    AdaptResult r = run_adaptive_defense(cfg, RetrainPolicy::Never);
    CHECK(r.iterations >= 11);
    CHECK(r.iterations <= 15);
    CHECK(static_cast<int>(r.trace.size()) == r.iterations);
    CHECK(r.best_p_d >= 0.0);
    CHECK(r.best_p_d <= 1.0);
    CHECK(r.trace[0].p_d == 0.0);
    CHECK(r.trace[1].p_d == doctest::Approx(0.1));
}

TEST_CASE("axis and jammer kind names round trip") {
    for (SweepAxis a : {SweepAxis::JammerType, SweepAxis::Tau, SweepAxis::PAvg,
                        SweepAxis::PDefense, SweepAxis::MobilityCircleR,
                        SweepAxis::MobilityCircleB, SweepAxis::GanCounts}) {
        CHECK(sweep_axis_from_string(to_string(a)) == a);
    }
    for (jammer::JammerKind k :
         {jammer::JammerKind::None, jammer::JammerKind::DeepLearning,
          jammer::JammerKind::Sensing, jammer::JammerKind::Random}) {
        CHECK(jammer_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(sweep_axis_from_string("bogus"), config_error);
    CHECK_THROWS_AS(jammer_kind_from_string("bogus"), config_error);
}
