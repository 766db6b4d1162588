#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "jamsim/gan.hpp"

using namespace jamsim;
using namespace jamsim::gan;

namespace {

// Two well-separated 1-D gaussians, one per label.
nn::Dataset gaussian_toy(int n, std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, "toy-data");
    nn::Dataset d;
    d.x.resize(n, 1);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const int lab = i % 2;
        d.x(i, 0) = (lab == 0 ? 2.0 : 8.0) + rng.normal();
        d.y(i) = lab;
    }
    return d;
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments label_moments(const nn::Dataset& d, int label) {
    Moments m;
    int cnt = 0;
    for (long i = 0; i < d.size(); ++i) {
        if (d.y(i) == label) {
            m.mean += d.x(i, 0);
            ++cnt;
        }
    }
    m.mean /= cnt;
    for (long i = 0; i < d.size(); ++i) {
        if (d.y(i) == label) m.sd += (d.x(i, 0) - m.mean) * (d.x(i, 0) - m.mean);
    }
    m.sd = std::sqrt(m.sd / cnt);
    return m;
}

Moments sample_moments(const std::vector<SyntheticSample>& samples) {
    Moments m;
    for (const auto& s : samples) m.mean += s.features[0];
    m.mean /= samples.size();
    for (const auto& s : samples) {
        m.sd += (s.features[0] - m.mean) * (s.features[0] - m.mean);
    }
    m.sd = std::sqrt(m.sd / samples.size());
    return m;
}

}  // namespace

TEST_CASE("conditional generation reproduces per-label moments on a gaussian toy") {
    nn::Dataset toy = gaussian_toy(200, 42);
    RngStream rng = RngStream::derive(6, "gan-toy");
    CGanConfig cfg;
    CGan g = train_cgan(toy, cfg, rng);

    REQUIRE(g.d_loss.size() == static_cast<std::size_t>(cfg.epochs));
    REQUIRE(g.g_loss.size() == static_cast<std::size_t>(cfg.epochs));
    CHECK(g.feature_dim == 1);

    RngStream rs = rng.fork("synth");
    for (int label : {0, 1}) {
        Moments real = label_moments(toy, label);
        Moments synth = sample_moments(generate_synthetic(g, label, 2000, rs));
        CAPTURE(label);
        CHECK(std::abs(synth.mean - real.mean) <= 0.2 * std::abs(real.mean));
        CHECK(std::abs(synth.sd - real.sd) <= 0.2 * real.sd);
    }
}

TEST_CASE("discriminator outputs are probabilities") {
    nn::Dataset toy = gaussian_toy(40, 7);
    RngStream rng = RngStream::derive(1, "gan-d");
    CGanConfig cfg;
    cfg.epochs = 200;
    CGan g = train_cgan(toy, cfg, rng);
    Eigen::MatrixXd in(toy.size(), 3); // feature + one-hot label
    for (long i = 0; i < toy.size(); ++i) {
        in(i, 0) = toy.x(i, 0);
        in(i, 1) = toy.y(i) == 0 ? 1.0 : 0.0;
        in(i, 2) = toy.y(i) == 1 ? 1.0 : 0.0;
    }
    in.col(0) = g.normalizer.apply(toy.x).col(0);
    Eigen::MatrixXd p = g.discriminator.forward_inference(in);
    REQUIRE(p.cols() == 1);
    for (long i = 0; i < p.rows(); ++i) {
        CHECK(p(i, 0) > 0.0);
        CHECK(p(i, 0) < 1.0);
    }
    for (double v : g.d_loss) CHECK(std::isfinite(v));
    for (double v : g.g_loss) CHECK(std::isfinite(v));
}

TEST_CASE("generation is deterministic, labelled and non-negative") {
    nn::Dataset toy = gaussian_toy(30, 9);
    CGanConfig cfg;
    cfg.epochs = 150;
    RngStream rng1 = RngStream::derive(5, "gan-det");
    CGan g1 = train_cgan(toy, cfg, rng1);
    RngStream rng2 = RngStream::derive(5, "gan-det");
    CGan g2 = train_cgan(toy, cfg, rng2);

    RngStream s1 = rng1.fork("synth");
    RngStream s2 = rng2.fork("synth");
    auto a = generate_synthetic(g1, 1, 50, s1);
    auto b = generate_synthetic(g2, 1, 50, s2);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].features[0] == b[i].features[0]);
        CHECK(a[i].label == 1);
        CHECK(a[i].synthetic);
        CHECK(a[i].features[0] >= 0.0);
    }

    RngStream s3 = s1.fork("empty");
    CHECK(generate_synthetic(g1, 0, 0, s3).empty());
}

TEST_CASE("train_cgan rejects degenerate datasets") {
    CGanConfig cfg;
    RngStream rng(1);
    nn::Dataset empty;
    empty.x.resize(0, 1);
    empty.y.resize(0);
    CHECK_THROWS_AS(train_cgan(empty, cfg, rng), nn::degenerate_dataset);

    nn::Dataset one_label;
    one_label.x = Eigen::MatrixXd::Random(6, 1);
    one_label.y = Eigen::VectorXi::Zero(6);
    CHECK_THROWS_AS(train_cgan(one_label, cfg, rng), nn::degenerate_dataset);
}

TEST_CASE("proportional synthetic counts") {
    nn::Dataset d;
    d.x.resize(10, 1);
    d.y.resize(10);
    for (int i = 0; i < 10; ++i) d.y(i) = i < 7 ? 0 : 1;
    auto [n_pos, n_neg] = proportional_counts(d, 500);
    CHECK(n_pos == 350);
    CHECK(n_neg == 150);
    auto [p2, n2] = proportional_counts(d, 0);
    CHECK(p2 == 0);
    CHECK(n2 == 0);
}

TEST_CASE("augment_dataset appends synthetic rows after the real ones") {
    nn::Dataset real;
    real.x.resize(2, 3);
    real.x << 1, 2, 3, 4, 5, 6;
    real.y.resize(2);
    real.y << 0, 1;
    std::vector<SyntheticSample> synth;
    Eigen::VectorXd f(3);
    f << 7, 8, 9;
    synth.push_back({f, 1, true});

    nn::Dataset aug = augment_dataset(real, synth);
    REQUIRE(aug.size() == 3);
    CHECK(aug.x(0, 0) == 1.0);
    CHECK(aug.x(2, 2) == 9.0);
    CHECK(aug.y(2) == 1);

    Eigen::VectorXd bad(2);
    bad << 1, 2;
    std::vector<SyntheticSample> wrong{{bad, 0, true}};
    CHECK_THROWS_AS(augment_dataset(real, wrong), nn::shape_error);
}

TEST_CASE("loss csv round trip") {
    CGan g;
    g.d_loss = {1.25, 0.5};
    g.g_loss = {0.75, 1.0};
    const std::string path = "test_gan_loss.csv";
    write_loss_csv(g, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,d_loss,g_loss");
    std::getline(in, line);
    CHECK(line == "0,1.25,0.75");
    std::getline(in, line);
    CHECK(line == "1,0.5,1");
    in.close();
    std::remove(path.c_str());
}
