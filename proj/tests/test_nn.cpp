#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "jamsim/nn.hpp"

using namespace jamsim;
using namespace jamsim::nn;

namespace {

Dataset two_blob_dataset(int n, RngStream& rng, double sep = 4.0, int dim = 2) {
    Dataset d;
    d.x.resize(n, dim);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const int lab = i % 2;
        for (int j = 0; j < dim; ++j) {
            d.x(i, j) = (lab == 0 ? 0.0 : sep) + rng.normal();
        }
        d.y(i) = lab;
    }
    return d;
}

// Brute-force minimizer over the same candidate set: midpoints of adjacent
// distinct sorted scores.
template <typename Objective>
ThresholdResult scan_oracle(const std::vector<double>& scores,
                            const std::vector<int>& labels, Objective objective) {
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<double> candidates;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    if (candidates.empty()) candidates.push_back(sorted.front());
    ThresholdResult best = classification_errors(scores, labels, candidates.front());
    for (double c : candidates) {
        ThresholdResult r = classification_errors(scores, labels, c);
        if (objective(r) < objective(best) ||
            (objective(r) == objective(best) && r.threshold < best.threshold)) {
            best = r;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("parameter count") {
    RngStream rng(1);
    auto net = MlpNetwork::init({10, 100, 2}, {Activation::Sigmoid}, rng);
    CHECK(net.param_count() == 1302); // 10*100+100 + 100*2+2
    auto net2 = MlpNetwork::init({10, 50, 50, 2}, {Activation::Tanh, Activation::Tanh}, rng);
    CHECK(net2.param_count() == 10 * 50 + 50 + 50 * 50 + 50 + 50 * 2 + 2);
}

TEST_CASE("hand-computed forward pass") {
    RngStream rng(1);
    auto net = MlpNetwork::init({2, 2, 2}, {Activation::Sigmoid}, rng);
    net.layers[0].w << 1.0, -1.0, 0.5, 0.5;
    net.layers[0].b << 0.0, 1.0;
    net.layers[1].w << 2.0, 0.0, 0.0, 2.0;
    net.layers[1].b << 0.0, 0.0;
    // Identity normalizer.
    net.normalizer.shift = Eigen::VectorXd::Zero(2);
    net.normalizer.scale = Eigen::VectorXd::Ones(2);
    net.normalizer.fitted = true;

    Eigen::MatrixXd x(1, 2);
    x << 1.0, 2.0;
    const double h1 = 1.0 / (1.0 + std::exp(1.0));  // sigma(1 - 2)
    const double h2 = 1.0 / (1.0 + std::exp(-2.5)); // sigma(0.5 + 1 + 1)
    const double z1 = 2.0 * h1;
    const double z2 = 2.0 * h2;
    const double p1 = std::exp(z1) / (std::exp(z1) + std::exp(z2));
    Eigen::MatrixXd out = net.forward_inference(x);
    CHECK(out(0, 0) == doctest::Approx(p1).epsilon(1e-12));
    CHECK(out(0, 1) == doctest::Approx(1.0 - p1).epsilon(1e-12));
    CHECK(net.score(x.row(0).transpose()) == doctest::Approx(1.0 - p1));
}

TEST_CASE("softmax rows are normalized") {
    RngStream rng(3);
    auto net = MlpNetwork::init({5, 30, 2}, {Activation::Tanh}, rng);
    Eigen::MatrixXd x(40, 5);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = 100.0 * rng.normal();
    net.normalizer.fit(x);
    Eigen::MatrixXd out = net.forward_inference(x);
    for (long i = 0; i < out.rows(); ++i) {
        CHECK(std::abs(out.row(i).sum() - 1.0) < 1e-9);
        CHECK(out(i, 0) >= 0.0);
        CHECK(out(i, 1) >= 0.0);
    }
}

TEST_CASE("gradient check passes for every activation configuration") {
    RngStream rng(5);
    Eigen::MatrixXd x(12, 4);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    Eigen::VectorXi y(12);
    for (int i = 0; i < 12; ++i) y(i) = i % 2;
    for (Activation act : {Activation::Sigmoid, Activation::Tanh, Activation::LeakyRelu}) {
        for (bool bn : {false, true}) {
            CAPTURE(to_string(act));
            CAPTURE(bn);
            RngStream sub = rng.fork(to_string(act) + (bn ? "-bn" : ""));
            auto net = MlpNetwork::init({4, 6, 5, 2}, {act, act}, sub,
                                        OutputKind::Softmax2, bn);
            net.normalizer.fit(x);
            CHECK(gradient_check(net, x, y) < 1e-4);
        }
    }
}

TEST_CASE("training separates gaussian blobs and the loss trace has one entry per epoch") {
    RngStream rng(11);
    Dataset d = two_blob_dataset(200, rng);
    auto net = MlpNetwork::init({2, 20, 2}, {Activation::Tanh}, rng);
    TrainConfig cfg;
    cfg.epochs = 60;
    std::vector<double> trace = train(net, d, cfg, rng);
    REQUIRE(trace.size() == 60);
    CHECK(trace.back() < 0.5 * trace.front());
    Eigen::VectorXd s = net.scores(d.x);
    int correct = 0;
    for (long i = 0; i < d.size(); ++i) {
        correct += (s(i) > 0.5) == (d.y(i) == 1);
    }
    CHECK(correct >= 198);
}

TEST_CASE("training solves xor") {
    RngStream rng(17);
    Dataset d;
    d.x.resize(200, 2);
    d.y.resize(200);
    for (int i = 0; i < 200; ++i) {
        const int a = (i / 2) % 2, b = i % 2;
        d.x(i, 0) = a + 0.05 * rng.normal();
        d.x(i, 1) = b + 0.05 * rng.normal();
        d.y(i) = a ^ b;
    }
    auto net = MlpNetwork::init({2, 8, 2}, {Activation::Tanh}, rng);
    TrainConfig cfg;
    std::vector<double> trace = train(net, d, cfg, rng);
    Eigen::VectorXd s = net.scores(d.x);
    int correct = 0;
    for (long i = 0; i < d.size(); ++i) correct += (s(i) > 0.5) == (d.y(i) == 1);
    CHECK(correct == 200);
}

TEST_CASE("train rejects degenerate datasets") {
    RngStream rng(1);
    auto net = MlpNetwork::init({2, 4, 2}, {Activation::Sigmoid}, rng);
    TrainConfig cfg;
    Dataset empty;
    empty.x.resize(0, 2);
    empty.y.resize(0);
    CHECK_THROWS_AS(train(net, empty, cfg, rng), degenerate_dataset);
    Dataset single;
    single.x = Eigen::MatrixXd::Random(10, 2);
    single.y = Eigen::VectorXi::Zero(10);
    CHECK_THROWS_AS(train(net, single, cfg, rng), degenerate_dataset);
}

TEST_CASE("cross entropy oracle") {
    // Two-term form: -log p(true) - log(1 - p(wrong)) per sample.
    Eigen::MatrixXd p(2, 2);
    p << 0.9, 0.1, 0.2, 0.8;
    Eigen::VectorXi y(2);
    y << 0, 1;
    const double want = -0.5 * ((std::log(0.9) + std::log1p(-0.1)) +
                                (std::log(0.8) + std::log1p(-0.2)));
    CHECK(cross_entropy(p, y) == doctest::Approx(want));
}

TEST_CASE("classification errors at a fixed threshold") {
    const std::vector<double> scores{0.1, 0.2, 0.6, 0.9};
    const std::vector<int> labels{0, 0, 1, 1};
    ThresholdResult r = classification_errors(scores, labels, 0.5);
    CHECK(r.e_md == 0.0);
    CHECK(r.e_fa == 0.0);
    r = classification_errors(scores, labels, 0.15);
    CHECK(r.e_md == doctest::Approx(0.5)); // the 0.2 positive lands above
    CHECK(r.e_fa == 0.0);
    r = classification_errors(scores, labels, 0.95);
    CHECK(r.e_md == 0.0);
    CHECK(r.e_fa == 1.0);
}

TEST_CASE("threshold selection matches the exhaustive-scan oracle on random instances") {
    RngStream rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform() * 40);
        std::vector<double> scores;
        std::vector<int> labels;
        bool seen[2] = {false, false};
        for (int i = 0; i < n; ++i) {
            const int lab = rng.bernoulli(0.5) ? 1 : 0;
            // Coarse quantization forces frequent score ties.
            scores.push_back(std::round(rng.uniform() * 8.0) / 8.0);
            labels.push_back(lab);
            seen[lab] = true;
        }
        if (!seen[0]) labels[0] = 0;
        if (!seen[1]) labels[1] = 1;

        ThresholdResult got = select_threshold(scores, labels);
        ThresholdResult want = scan_oracle(
            scores, labels, [](const ThresholdResult& r) { return r.max_error(); });
        CAPTURE(trial);
        CHECK(got.max_error() == doctest::Approx(want.max_error()).epsilon(1e-12));
        CHECK(got.threshold == doctest::Approx(want.threshold).epsilon(1e-12));

        ThresholdResult got_b = select_threshold_balanced(scores, labels);
        ThresholdResult want_b = scan_oracle(
            scores, labels, [](const ThresholdResult& r) { return r.e_md + r.e_fa; });
        CHECK(got_b.e_md + got_b.e_fa ==
              doctest::Approx(want_b.e_md + want_b.e_fa).epsilon(1e-12));
        CHECK(got_b.threshold == doctest::Approx(want_b.threshold).epsilon(1e-12));

        // Reported errors agree with a recount at the returned threshold.
        ThresholdResult recount = classification_errors(scores, labels, got.threshold);
        CHECK(got.e_md == recount.e_md);
        CHECK(got.e_fa == recount.e_fa);
    }
}

TEST_CASE("threshold selection rejects one-class input") {
    CHECK_THROWS_AS(select_threshold({0.1, 0.2}, {0, 0}), degenerate_dataset);
    CHECK_THROWS_AS(select_threshold({}, {}), degenerate_dataset);
    CHECK_THROWS_AS(select_threshold({0.1}, {0, 1}), degenerate_dataset);
}

TEST_CASE("split half preserves order") {
    Dataset d;
    d.x.resize(5, 1);
    d.y.resize(5);
    for (int i = 0; i < 5; ++i) {
        d.x(i, 0) = i;
        d.y(i) = i % 2;
    }
    SplitDataset sp = split_half(d);
    CHECK(sp.train.size() == 2);
    CHECK(sp.test.size() == 3);
    CHECK(sp.train.x(1, 0) == 1.0);
    CHECK(sp.test.x(0, 0) == 2.0);
}

TEST_CASE("normalizer round trip") {
    RngStream rng(31);
    Eigen::MatrixXd x(30, 3);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = 5.0 + 3.0 * rng.normal();
    Normalizer nz;
    nz.fit(x);
    Eigen::MatrixXd z = nz.apply(x);
    CHECK((nz.invert(z) - x).cwiseAbs().maxCoeff() < 1e-9);
    // Normalized columns are centered with unit spread.
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(z.col(j).mean()) < 1e-9);
    }
    CHECK((nz.apply_row(x.row(4).transpose()) - z.row(4).transpose()).norm() < 1e-12);
}

TEST_CASE("save and load round trip") {
    RngStream rng(37);
    Dataset d = two_blob_dataset(100, rng);
    auto net = MlpNetwork::init({2, 10, 5, 2}, {Activation::Tanh, Activation::LeakyRelu},
                                rng, OutputKind::Softmax2, true);
    TrainConfig cfg;
    cfg.epochs = 20;
    train(net, d, cfg, rng);
    net.threshold = 0.371;

    const std::string path = "test_nn_roundtrip.net";
    save_network(net, path);
    MlpNetwork loaded = load_network(path);
    std::remove(path.c_str());

    CHECK(loaded.layer_sizes == net.layer_sizes);
    CHECK(loaded.threshold == net.threshold);
    Eigen::VectorXd a = net.scores(d.x);
    Eigen::VectorXd b = loaded.scores(d.x);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("default grid shape") {
    auto grid = default_grid();
    CHECK(grid.size() == 2 * 9 * 2); // {1,2} layers x {20,30,...,100} x {sigmoid,tanh}
    bool has = false;
    for (const auto& h : grid) {
        if (h.hidden_layers == 2 && h.neurons == 60 && h.act == Activation::Tanh) has = true;
    }
    CHECK(has);
}

TEST_CASE("hyperparameter tuning returns a trained separator") {
    RngStream rng(41);
    Dataset train_set = two_blob_dataset(120, rng);
    Dataset valid_set = two_blob_dataset(80, rng);
    TrainConfig cfg;
    cfg.epochs = 30;
    std::vector<HyperConfig> grid{{1, 20, Activation::Sigmoid}, {1, 40, Activation::Tanh}};
    TuneResult tr = tune_hyperparameters(train_set, valid_set, grid, cfg, rng);
    CHECK(tr.net.trained());
    CHECK(tr.errors.max_error() < 0.05);
    CHECK(tr.net.threshold == tr.errors.threshold);
}
