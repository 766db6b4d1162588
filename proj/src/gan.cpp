#include "jamsim/gan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "jamsim/metrics.hpp"

namespace jamsim::gan {

namespace {

Eigen::MatrixXd one_hot(const Eigen::VectorXi& labels) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(labels.size(), 2);
    for (long i = 0; i < labels.size(); ++i) h(i, labels(i)) = 1.0;
    return h;
}

Eigen::MatrixXd concat_cols(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

double bce(const Eigen::MatrixXd& p, double target) {
    double loss = 0.0;
    for (long i = 0; i < p.rows(); ++i) {
        const double v = std::clamp(p(i, 0), 1e-12, 1.0 - 1e-12);
        loss -= target > 0.5 ? std::log(v) : std::log1p(-v);
    }
    return loss / p.rows();
}

void set_leaky(nn::MlpNetwork& net, double slope) {
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
        net.layers[l].leaky_slope = slope;
    }
}

}  // namespace

CGan train_cgan(const nn::Dataset& real, const CGanConfig& cfg, RngStream& rng) {
    const long n = real.size();
    if (n == 0) throw nn::degenerate_dataset("train_cgan: empty dataset");
    const bool has_pos = (real.y.array() == 0).any();
    const bool has_neg = (real.y.array() == 1).any();
    if (!has_pos || !has_neg) {
        throw nn::degenerate_dataset("train_cgan: both labels required");
    }

    CGan gan;
    gan.noise_dim = cfg.noise_dim;
    gan.feature_dim = static_cast<int>(real.x.cols());
    gan.normalizer.fit(real.x);
    const Eigen::MatrixXd xn = gan.normalizer.apply(real.x);

    RngStream init_g = rng.fork("init-g");
    RngStream init_d = rng.fork("init-d");
    gan.generator = nn::MlpNetwork::init(
        {cfg.noise_dim + 2, cfg.hidden1, cfg.hidden2, gan.feature_dim},
        {nn::Activation::LeakyRelu, nn::Activation::LeakyRelu}, init_g,
        nn::OutputKind::Linear, /*batch_norm=*/true);
    // No batch norm in D: normalizing each pure-real or pure-fake batch
    // erases the mean/scale differences D must detect, leaving G's output
    // level unconstrained.
    gan.discriminator = nn::MlpNetwork::init(
        {gan.feature_dim + 2, cfg.hidden1, cfg.hidden2, 1},
        {nn::Activation::LeakyRelu, nn::Activation::LeakyRelu}, init_d,
        nn::OutputKind::SigmoidScalar, /*batch_norm=*/false);
    set_leaky(gan.generator, cfg.leaky_slope);
    set_leaky(gan.discriminator, cfg.leaky_slope);

    nn::TrainConfig opt_cfg;
    opt_cfg.optimizer = nn::TrainConfig::Optimizer::Adam;
    opt_cfg.learning_rate = cfg.learning_rate;
    opt_cfg.adam_beta1 = cfg.adam_beta1;
    opt_cfg.adam_beta2 = cfg.adam_beta2;
    nn::Optimizer opt_g(opt_cfg);
    nn::Optimizer opt_d(opt_cfg);

    const int batch = std::max(2, std::min<int>(cfg.batch_size, static_cast<int>(n)));
    gan.d_loss.reserve(cfg.epochs);
    gan.g_loss.reserve(cfg.epochs);

    Eigen::MatrixXd xb(batch, gan.feature_dim);
    Eigen::VectorXi yb(batch);
    Eigen::MatrixXd z(batch, cfg.noise_dim);

    // With a desk-scale real set the whole dataset fits in one batch; feeding
    // it verbatim gives D the exact empirical distribution instead of a
    // bootstrap resample of it.
    auto sample_real = [&]() {
        if (n <= batch) {
            for (int i = 0; i < batch; ++i) {
                xb.row(i) = xn.row(i % n);
                yb(i) = real.y(i % n);
            }
            return;
        }
        for (int i = 0; i < batch; ++i) {
            const long j = static_cast<long>(rng.uniform() * n) % n;
            xb.row(i) = xn.row(j);
            yb(i) = real.y(j);
        }
    };
    auto sample_noise = [&]() {
        for (int i = 0; i < batch; ++i) {
            for (int j = 0; j < cfg.noise_dim; ++j) z(i, j) = rng.normal();
        }
    };

    nn::ForwardCache cache_g, cache_d;
    nn::Gradients grads_real, grads_fake, grads_g;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Discriminator: real batch up, generated batch down.
        sample_real();
        const Eigen::MatrixXd cond = one_hot(yb);
        Eigen::MatrixXd p_real =
            gan.discriminator.forward(concat_cols(xb, cond), true, &cache_d);
        const double loss_real = bce(p_real, 1.0);
        gan.discriminator.backward(cache_d, (p_real.array() - 1.0).matrix() / batch,
                                   grads_real);

        sample_noise();
        Eigen::MatrixXd fake =
            gan.generator.forward(concat_cols(z, cond), true, &cache_g);
        Eigen::MatrixXd p_fake =
            gan.discriminator.forward(concat_cols(fake, cond), true, &cache_d);
        const double loss_fake = bce(p_fake, 0.0);
        gan.discriminator.backward(cache_d, p_fake / batch, grads_fake);

        for (std::size_t l = 0; l < grads_real.layers.size(); ++l) {
            grads_real.layers[l].dw += grads_fake.layers[l].dw;
            grads_real.layers[l].db += grads_fake.layers[l].db;
            if (grads_real.layers[l].dgamma.size() > 0) {
                grads_real.layers[l].dgamma += grads_fake.layers[l].dgamma;
                grads_real.layers[l].dbeta += grads_fake.layers[l].dbeta;
            }
        }
        opt_d.step(gan.discriminator, grads_real);

        // Generator: non-saturating objective, push D(G(z,y)) toward 1.
        sample_noise();
        fake = gan.generator.forward(concat_cols(z, cond), true, &cache_g);
        Eigen::MatrixXd p_g = gan.discriminator.forward(
            concat_cols(fake, cond), true, &cache_d, /*update_running=*/false);
        const double loss_g = bce(p_g, 1.0);
        Eigen::MatrixXd d_input = gan.discriminator.backward(
            cache_d, (p_g.array() - 1.0).matrix() / batch, grads_fake);
        gan.generator.backward(cache_g, d_input.leftCols(gan.feature_dim), grads_g);
        opt_g.step(gan.generator, grads_g);

        gan.d_loss.push_back(loss_real + loss_fake);
        gan.g_loss.push_back(loss_g);
    }

    // Generation conditions on one label at a time but uses the batch-norm
    // running averages, which during training track a drifting generator.
    // Refresh them with frozen weights over mixed-label batches so the stored
    // statistics describe the final network.
    for (int pass = 0; pass < 500; ++pass) {
        sample_real();
        sample_noise();
        gan.generator.forward(concat_cols(z, one_hot(yb)), true, nullptr, true);
    }
    return gan;
}

std::vector<SyntheticSample> generate_synthetic(const CGan& gan, int label, int n,
                                                RngStream& rng) {
    std::vector<SyntheticSample> out;
    if (n <= 0) return out;
    Eigen::MatrixXd z(n, gan.noise_dim);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < gan.noise_dim; ++j) z(i, j) = rng.normal();
    }
    Eigen::VectorXi labels = Eigen::VectorXi::Constant(n, label);
    Eigen::MatrixXd gen =
        gan.generator.forward_inference(concat_cols(z, one_hot(labels)));
    Eigen::MatrixXd raw = gan.normalizer.invert(gen).cwiseMax(0.0);
    out.reserve(n);
    for (long i = 0; i < n; ++i) {
        out.push_back({raw.row(i).transpose(), label, true});
    }
    return out;
}

std::pair<int, int> proportional_counts(const nn::Dataset& real, int n_synthetic) {
    const double pos_ratio =
        static_cast<double>((real.y.array() == 0).count()) / real.size();
    const int n_pos = static_cast<int>(std::lround(pos_ratio * n_synthetic));
    return {n_pos, n_synthetic - n_pos};
}

nn::Dataset augment_dataset(const nn::Dataset& real,
                            const std::vector<SyntheticSample>& synthetic) {
    for (const auto& s : synthetic) {
        if (s.features.size() != real.x.cols()) {
            throw nn::shape_error("augment_dataset: feature dimension mismatch");
        }
    }
    nn::Dataset out;
    const long n = real.size() + static_cast<long>(synthetic.size());
    out.x.resize(n, real.x.cols());
    out.y.resize(n);
    out.x.topRows(real.size()) = real.x;
    out.y.head(real.size()) = real.y;
    for (std::size_t i = 0; i < synthetic.size(); ++i) {
        out.x.row(real.size() + static_cast<long>(i)) = synthetic[i].features.transpose();
        out.y(real.size() + static_cast<long>(i)) = synthetic[i].label;
    }
    return out;
}

void write_loss_csv(const CGan& gan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loss_csv: cannot open " + path);
    out << "epoch,d_loss,g_loss\n";
    for (std::size_t i = 0; i < gan.d_loss.size(); ++i) {
        out << i << ',' << metrics::format_double(gan.d_loss[i]) << ','
            << metrics::format_double(gan.g_loss[i]) << '\n';
    }
}

}  // namespace jamsim::gan
