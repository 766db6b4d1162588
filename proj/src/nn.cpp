#include "jamsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace jamsim::nn {

namespace {

constexpr double kBnEps = 1e-8;
constexpr double kBnMomentum = 0.9;
Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z, double slope) {
    switch (act) {
        case Activation::Sigmoid:
            return (1.0 + (-z.array()).exp()).inverse().matrix();
        case Activation::Tanh:
            return z.array().tanh().matrix();
        case Activation::LeakyRelu:
            return z.array().max(slope * z.array()).matrix();
    }
    return z;
}

Eigen::MatrixXd activate_grad(Activation act, const LayerCache& c, double slope) {
    switch (act) {
        case Activation::Sigmoid:
            return (c.a.array() * (1.0 - c.a.array())).matrix();
        case Activation::Tanh:
            return (1.0 - c.a.array().square()).matrix();
        case Activation::LeakyRelu:
            return (c.zt.array() > 0.0).select(
                Eigen::MatrixXd::Ones(c.zt.rows(), c.zt.cols()),
                Eigen::MatrixXd::Constant(c.zt.rows(), c.zt.cols(), slope));
    }
    return Eigen::MatrixXd::Ones(c.zt.rows(), c.zt.cols());
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd shifted = z.colwise() - z.rowwise().maxCoeff();
    Eigen::MatrixXd e = shifted.array().exp().matrix();
    return e.array().colwise() / e.rowwise().sum().array();
}

}  // namespace

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::LeakyRelu: return "leaky-relu";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "tanh") return Activation::Tanh;
    if (s == "leaky-relu") return Activation::LeakyRelu;
    throw config_error("unknown activation: " + s);
}

void Normalizer::fit(const Eigen::MatrixXd& x) {
    shift = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - shift.transpose();
    Eigen::VectorXd var = centered.array().square().colwise().mean();
    scale = var.array().sqrt().max(1e-12);
    fitted = true;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& x) const {
    if (!fitted) return x;
    return (x.rowwise() - shift.transpose()).array().rowwise() /
           scale.transpose().array();
}

Eigen::VectorXd Normalizer::apply_row(const Eigen::VectorXd& x) const {
    if (!fitted) return x;
    return ((x - shift).array() / scale.array()).matrix();
}

Eigen::MatrixXd Normalizer::invert(const Eigen::MatrixXd& x) const {
    if (!fitted) return x;
    return (x.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
           shift.transpose();
}

SplitDataset split_half(const Dataset& all) {
    const long n = all.size();
    const long h = n / 2;
    SplitDataset out;
    out.train.x = all.x.topRows(h);
    out.train.y = all.y.head(h);
    out.test.x = all.x.bottomRows(n - h);
    out.test.y = all.y.tail(n - h);
    return out;
}

MlpNetwork MlpNetwork::init(const std::vector<int>& sizes,
                            const std::vector<Activation>& hidden_acts, RngStream& rng,
                            OutputKind output, bool batch_norm) {
    if (sizes.size() < 3) {
        throw config_error("init_network: need at least one hidden layer");
    }
    for (int w : sizes) {
        if (w < 1) throw config_error("init_network: layer widths must be >= 1");
    }
    if (hidden_acts.size() != sizes.size() - 2) {
        throw config_error("init_network: one activation per hidden layer required");
    }

    MlpNetwork net;
    net.layer_sizes = sizes;
    net.output = output;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer;
        const int in = sizes[l];
        const int out = sizes[l + 1];
        layer.w.resize(out, in);
        for (int r = 0; r < out; ++r) {
            for (int c = 0; c < in; ++c) layer.w(r, c) = rng.uniform(-1.0, 1.0);
        }
        layer.b.resize(out);
        for (int r = 0; r < out; ++r) layer.b(r) = rng.uniform(-1.0, 1.0);
        const bool hidden = l + 2 < sizes.size();
        if (hidden) {
            layer.act = hidden_acts[l];
            layer.batch_norm = batch_norm;
            if (batch_norm) {
                layer.gamma = Eigen::VectorXd::Ones(out);
                layer.beta = Eigen::VectorXd::Zero(out);
                layer.run_mean = Eigen::VectorXd::Zero(out);
                layer.run_var = Eigen::VectorXd::Ones(out);
            }
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

long MlpNetwork::param_count() const {
    long n = 0;
    for (const auto& l : layers) {
        n += l.w.size() + l.b.size();
        if (l.batch_norm) n += l.gamma.size() + l.beta.size();
    }
    return n;
}

Eigen::MatrixXd MlpNetwork::forward(const Eigen::MatrixXd& x_raw, bool training,
                                    ForwardCache* cache, bool update_running) {
    if (x_raw.cols() != layer_sizes.front()) {
        throw shape_error("forward: input width mismatch");
    }
    if (cache) cache->layers.assign(layers.size(), LayerCache{});

    Eigen::MatrixXd a = normalizer.apply(x_raw);
    const long n = a.rows();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Layer& layer = layers[l];
        const bool is_output = (l + 1 == layers.size());
        LayerCache local;
        LayerCache& c = cache ? cache->layers[l] : local;
        c.x_in = a;
        c.z = (a * layer.w.transpose()).rowwise() + layer.b.transpose();

        if (!is_output && layer.batch_norm) {
            Eigen::RowVectorXd mean, var;
            if (training) {
                mean = c.z.colwise().mean();
                var = (c.z.rowwise() - mean).array().square().colwise().mean();
                if (update_running) {
                    layer.run_mean = kBnMomentum * layer.run_mean.array() +
                                     (1.0 - kBnMomentum) * mean.transpose().array();
                    layer.run_var = kBnMomentum * layer.run_var.array() +
                                    (1.0 - kBnMomentum) * var.transpose().array();
                }
            } else {
                mean = layer.run_mean.transpose();
                var = layer.run_var.transpose();
            }
            c.inv_std = (var.array() + kBnEps).rsqrt();
            c.zhat = (c.z.rowwise() - mean).array().rowwise() * c.inv_std.array();
            c.zt = (c.zhat.array().rowwise() * layer.gamma.transpose().array())
                       .matrix()
                       .rowwise() +
                   layer.beta.transpose();
        } else {
            c.zt = c.z;
        }

        if (is_output) {
            switch (output) {
                case OutputKind::Softmax2:
                    c.a = softmax_rows(c.zt);
                    break;
                case OutputKind::SigmoidScalar:
                    c.a = (1.0 + (-c.zt.array()).exp()).inverse().matrix();
                    break;
                case OutputKind::Linear:
                    c.a = c.zt;
                    break;
            }
        } else {
            c.a = activate(layer.act, c.zt, layer.leaky_slope);
        }
        a = c.a;
        (void)n;
    }
    if (cache) cache->out = a;
    return a;
}

Eigen::MatrixXd MlpNetwork::forward_inference(const Eigen::MatrixXd& x_raw) const {
    return const_cast<MlpNetwork*>(this)->forward(x_raw, /*training=*/false, nullptr,
                                                 /*update_running=*/false);
}

double MlpNetwork::score(const Eigen::VectorXd& x_raw) const {
    if (output != OutputKind::Softmax2) {
        throw shape_error("score: classifier output required");
    }
    Eigen::MatrixXd out = forward_inference(x_raw.transpose());
    return out(0, 1);
}

Eigen::VectorXd MlpNetwork::scores(const Eigen::MatrixXd& x_raw) const {
    Eigen::MatrixXd out = forward_inference(x_raw);
    return out.col(1);
}

Eigen::MatrixXd MlpNetwork::backward(const ForwardCache& cache,
                                     const Eigen::MatrixXd& d_out,
                                     Gradients& grads) const {
    grads.layers.assign(layers.size(), Gradients::LayerGrads{});

    Eigen::MatrixXd d_zt = d_out; // dL/d(post-norm pre-activation)
    for (long l = static_cast<long>(layers.size()) - 1; l >= 0; --l) {
        const Layer& layer = layers[l];
        const LayerCache& c = cache.layers[l];
        const bool is_output = (l + 1 == static_cast<long>(layers.size()));
        auto& g = grads.layers[l];

        if (!is_output) {
            d_zt = d_zt.array() * activate_grad(layer.act, c, layer.leaky_slope).array();
        }

        Eigen::MatrixXd d_z;
        if (!is_output && layer.batch_norm) {
            const double n = static_cast<double>(c.z.rows());
            g.dgamma = (d_zt.array() * c.zhat.array()).colwise().sum().transpose();
            g.dbeta = d_zt.colwise().sum().transpose();
            Eigen::MatrixXd d_zhat =
                d_zt.array().rowwise() * layer.gamma.transpose().array();
            Eigen::RowVectorXd sum_d = d_zhat.colwise().sum();
            Eigen::RowVectorXd sum_dz =
                (d_zhat.array() * c.zhat.array()).colwise().sum();
            d_z = ((d_zhat * n).rowwise() - sum_d).array() -
                  (c.zhat.array().rowwise() * sum_dz.array());
            d_z = (d_z.array().rowwise() * (c.inv_std.array() / n)).matrix();
        } else {
            d_z = d_zt;
        }

        g.dw = d_z.transpose() * c.x_in;
        g.db = d_z.colwise().sum().transpose();
        if (l > 0) {
            d_zt = d_z * layer.w;
        } else {
            return d_z * layer.w; // dL/dX in normalized space
        }
    }
    return {};
}

void Optimizer::step(MlpNetwork& net, const Gradients& grads) {
    if (!initialized_) {
        vel_.layers.resize(grads.layers.size());
        sq_.layers.resize(grads.layers.size());
        for (std::size_t l = 0; l < grads.layers.size(); ++l) {
            auto zero_like = [](const auto& m) {
                return std::decay_t<decltype(m)>::Zero(m.rows(), m.cols());
            };
            vel_.layers[l].dw = zero_like(grads.layers[l].dw);
            vel_.layers[l].db = zero_like(grads.layers[l].db);
            sq_.layers[l].dw = zero_like(grads.layers[l].dw);
            sq_.layers[l].db = zero_like(grads.layers[l].db);
            if (grads.layers[l].dgamma.size() > 0) {
                vel_.layers[l].dgamma = zero_like(grads.layers[l].dgamma);
                vel_.layers[l].dbeta = zero_like(grads.layers[l].dbeta);
                sq_.layers[l].dgamma = zero_like(grads.layers[l].dgamma);
                sq_.layers[l].dbeta = zero_like(grads.layers[l].dbeta);
            }
        }
        initialized_ = true;
    }
    ++t_;

    auto update = [&](auto& param, auto& vel, auto& sq, const auto& grad) {
        if (cfg_.optimizer == TrainConfig::Optimizer::MomentumSgd) {
            vel = cfg_.momentum * vel - cfg_.learning_rate * grad;
            param += vel;
        } else {
            vel = cfg_.adam_beta1 * vel + (1.0 - cfg_.adam_beta1) * grad;
            sq = (cfg_.adam_beta2 * sq.array() +
                  (1.0 - cfg_.adam_beta2) * grad.array().square())
                     .matrix();
            const double bc1 = 1.0 - std::pow(cfg_.adam_beta1, t_);
            const double bc2 = 1.0 - std::pow(cfg_.adam_beta2, t_);
            param -= (cfg_.learning_rate * (vel.array() / bc1) /
                      ((sq.array() / bc2).sqrt() + cfg_.adam_eps))
                         .matrix();
        }
    };

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].w, vel_.layers[l].dw, sq_.layers[l].dw, grads.layers[l].dw);
        update(net.layers[l].b, vel_.layers[l].db, sq_.layers[l].db, grads.layers[l].db);
        if (net.layers[l].batch_norm && grads.layers[l].dgamma.size() > 0) {
            update(net.layers[l].gamma, vel_.layers[l].dgamma, sq_.layers[l].dgamma,
                   grads.layers[l].dgamma);
            update(net.layers[l].beta, vel_.layers[l].dbeta, sq_.layers[l].dbeta,
                   grads.layers[l].dbeta);
        }
    }
}

// Two-term binary cross entropy over both output entries.
double cross_entropy(const Eigen::MatrixXd& probs, const Eigen::VectorXi& y) {
    double loss = 0.0;
    for (long i = 0; i < probs.rows(); ++i) {
        const double p_true = std::max(probs(i, y(i)), 1e-300);
        const double p_wrong = std::min(probs(i, 1 - y(i)), 1.0 - 1e-16);
        loss -= std::log(p_true) + std::log1p(-p_wrong);
    }
    return loss / probs.rows();
}

namespace {

// Plain two-class cross entropy: -log p_true, averaged.
double ce_loss(const Eigen::MatrixXd& probs, const Eigen::VectorXi& y) {
    double loss = 0.0;
    for (long i = 0; i < probs.rows(); ++i) {
        loss -= std::log(std::max(probs(i, y(i)), 1e-300));
    }
    return loss / probs.rows();
}

Eigen::MatrixXd ce_grad(const Eigen::MatrixXd& probs, const Eigen::VectorXi& y) {
    Eigen::MatrixXd d = probs;
    for (long i = 0; i < probs.rows(); ++i) d(i, y(i)) -= 1.0;
    return d / static_cast<double>(probs.rows());
}

}  // namespace

std::vector<double> train(MlpNetwork& net, const Dataset& data, const TrainConfig& cfg,
                          RngStream& rng) {
    if (data.size() == 0) throw degenerate_dataset("train: empty dataset");
    const int n_pos = (data.y.array() == 0).count();
    if (n_pos == 0 || n_pos == data.size()) {
        throw degenerate_dataset("train: training data contains a single class");
    }
    if (!net.normalizer.fitted) {
        net.normalizer.fit(data.x);
    }

    const long n = data.size();
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0);

    Optimizer opt(cfg);
    Gradients grads;
    ForwardCache cache;
    std::vector<double> trace;
    trace.reserve(cfg.epochs);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        double epoch_loss = 0.0;
        long seen = 0;
        for (long start = 0; start < n; start += cfg.minibatch_size) {
            const long bs = std::min<long>(cfg.minibatch_size, n - start);
            Eigen::MatrixXd xb(bs, data.x.cols());
            Eigen::VectorXi yb(bs);
            for (long i = 0; i < bs; ++i) {
                xb.row(i) = data.x.row(order[start + i]);
                yb(i) = data.y(order[start + i]);
            }
            Eigen::MatrixXd probs = net.forward(xb, /*training=*/true, &cache);
            epoch_loss += ce_loss(probs, yb) * bs;
            seen += bs;
            net.backward(cache, ce_grad(probs, yb), grads);
            opt.step(net, grads);
        }
        trace.push_back(epoch_loss / seen);
    }
    return trace;
}

double gradient_check(MlpNetwork& net, const Eigen::MatrixXd& x_raw,
                      const Eigen::VectorXi& y, double eps) {
    if (!net.normalizer.fitted) net.normalizer.fit(x_raw);

    auto loss_fn = [&]() {
        Eigen::MatrixXd probs =
            net.forward(x_raw, /*training=*/true, nullptr, /*update_running=*/false);
        return ce_loss(probs, y);
    };

    ForwardCache cache;
    Gradients grads;
    Eigen::MatrixXd probs =
        net.forward(x_raw, /*training=*/true, &cache, /*update_running=*/false);
    net.backward(cache, ce_grad(probs, y), grads);

    double max_rel = 0.0;
    auto check_block = [&](double* data, long count, const double* analytic) {
        for (long i = 0; i < count; ++i) {
            const double saved = data[i];
            data[i] = saved + eps;
            const double lp = loss_fn();
            data[i] = saved - eps;
            const double lm = loss_fn();
            data[i] = saved;
            const double numeric = (lp - lm) / (2.0 * eps);
            const double diff = std::abs(numeric - analytic[i]);
            // Identically-zero gradients (e.g. biases under batch norm, which
            // the mean subtraction cancels) leave only central-difference
            // noise; judge those on an absolute scale.
            if (diff < 1e-9) continue;
            const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
            max_rel = std::max(max_rel, diff / denom);
        }
    };

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        auto& g = grads.layers[l];
        check_block(layer.w.data(), layer.w.size(), g.dw.data());
        check_block(layer.b.data(), layer.b.size(), g.db.data());
        if (layer.batch_norm && g.dgamma.size() > 0) {
            check_block(layer.gamma.data(), layer.gamma.size(), g.dgamma.data());
            check_block(layer.beta.data(), layer.beta.size(), g.dbeta.data());
        }
    }
    return max_rel;
}

ThresholdResult classification_errors(const std::vector<double>& scores,
                                      const std::vector<int>& labels, double threshold) {
    long pos = 0, neg = 0, md = 0, fa = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) {
            ++pos;
            if (scores[i] > threshold) ++md;
        } else {
            ++neg;
            if (scores[i] <= threshold) ++fa;
        }
    }
    ThresholdResult r;
    r.threshold = threshold;
    r.e_md = pos > 0 ? static_cast<double>(md) / pos : 0.0;
    r.e_fa = neg > 0 ? static_cast<double>(fa) / neg : 0.0;
    return r;
}

namespace {

std::vector<double> threshold_candidates(const std::vector<double>& scores,
                                         const std::vector<int>& labels,
                                         const char* op) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw degenerate_dataset(std::string(op) + ": size mismatch or empty input");
    }
    bool has_pos = false, has_neg = false;
    for (int l : labels) (l == 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw degenerate_dataset(std::string(op) + ": both classes required");
    }

    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<double> candidates;
    candidates.reserve(sorted.size());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    if (candidates.empty()) candidates.push_back(sorted.front());
    return candidates;
}

}  // namespace

ThresholdResult select_threshold(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
    const std::vector<double> candidates =
        threshold_candidates(scores, labels, "select_threshold");
    ThresholdResult best = classification_errors(scores, labels, candidates.front());
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        ThresholdResult r = classification_errors(scores, labels, candidates[i]);
        if (r.max_error() < best.max_error()) best = r;
    }
    return best;
}

ThresholdResult select_threshold_balanced(const std::vector<double>& scores,
                                          const std::vector<int>& labels) {
    const std::vector<double> candidates =
        threshold_candidates(scores, labels, "select_threshold_balanced");
    auto total = [](const ThresholdResult& r) { return r.e_md + r.e_fa; };
    ThresholdResult best = classification_errors(scores, labels, candidates.front());
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        ThresholdResult r = classification_errors(scores, labels, candidates[i]);
        if (total(r) < total(best)) best = r;
    }
    return best;
}

std::vector<HyperConfig> default_grid() {
    std::vector<HyperConfig> grid;
    for (int layers : {1, 2}) {
        for (int neurons = 20; neurons <= 100; neurons += 10) {
            for (Activation act : {Activation::Sigmoid, Activation::Tanh}) {
                grid.push_back({layers, neurons, act});
            }
        }
    }
    return grid;
}

TuneResult tune_hyperparameters(const Dataset& train_split, const Dataset& valid_split,
                                const std::vector<HyperConfig>& grid,
                                const TrainConfig& cfg, RngStream& rng) {
    if (grid.empty()) throw config_error("tune_hyperparameters: empty grid");

    TuneResult best;
    long best_params = 0;
    bool first = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const HyperConfig& hc = grid[i];
        RngStream sub = rng.fork("candidate-" + std::to_string(i));
        std::vector<int> sizes;
        sizes.push_back(static_cast<int>(train_split.x.cols()));
        for (int l = 0; l < hc.hidden_layers; ++l) sizes.push_back(hc.neurons);
        sizes.push_back(2);
        std::vector<Activation> acts(hc.hidden_layers, hc.act);

        MlpNetwork net = MlpNetwork::init(sizes, acts, sub);
        train(net, train_split, cfg, sub);

        Eigen::VectorXd vs = net.scores(valid_split.x);
        std::vector<double> scores(vs.data(), vs.data() + vs.size());
        std::vector<int> labels(valid_split.y.data(),
                                valid_split.y.data() + valid_split.y.size());
        ThresholdResult r = select_threshold(scores, labels);
        net.threshold = r.threshold;

        const long params = net.param_count();
        const bool better =
            first || r.max_error() < best.errors.max_error() ||
            (r.max_error() == best.errors.max_error() && params < best_params);
        if (better) {
            best.net = std::move(net);
            best.config = hc;
            best.errors = r;
            best_params = params;
            first = false;
        }
    }
    return best;
}

void save_network(const MlpNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_network: cannot open " + path);
    out.precision(17);
    out << "jamsim-net 1\n";
    out << "output " << static_cast<int>(net.output) << "\n";
    out << "sizes";
    for (int s : net.layer_sizes) out << " " << s;
    out << "\n";
    out << "activations";
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
        out << " " << to_string(net.layers[l].act);
    }
    out << "\n";
    out << "batch_norm " << (net.layers.front().batch_norm ? 1 : 0) << "\n";
    out << "threshold " << net.threshold << "\n";
    out << "normalizer " << (net.normalizer.fitted ? 1 : 0) << "\n";
    if (net.normalizer.fitted) {
        for (long i = 0; i < net.normalizer.shift.size(); ++i) {
            out << net.normalizer.shift(i) << (i + 1 < net.normalizer.shift.size() ? " " : "\n");
        }
        for (long i = 0; i < net.normalizer.scale.size(); ++i) {
            out << net.normalizer.scale(i) << (i + 1 < net.normalizer.scale.size() ? " " : "\n");
        }
    }
    out << "params\n";
    auto dump = [&](const double* d, long n) {
        for (long i = 0; i < n; ++i) out << d[i] << (i + 1 < n ? " " : "\n");
    };
    for (const auto& l : net.layers) {
        // Row-major weight order.
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr = l.w;
        dump(wr.data(), wr.size());
        dump(l.b.data(), l.b.size());
        if (l.batch_norm) {
            dump(l.gamma.data(), l.gamma.size());
            dump(l.beta.data(), l.beta.size());
            dump(l.run_mean.data(), l.run_mean.size());
            dump(l.run_var.data(), l.run_var.size());
        }
    }
}

MlpNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_network: cannot open " + path);
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "jamsim-net" || version != 1) {
        throw std::runtime_error("load_network: unsupported format in " + path);
    }

    MlpNetwork net;
    std::string key;
    int output_kind = 0;
    in >> key >> output_kind;
    net.output = static_cast<OutputKind>(output_kind);

    in >> key; // sizes
    std::string line;
    std::getline(in, line);
    {
        std::istringstream ss(line);
        int v;
        while (ss >> v) net.layer_sizes.push_back(v);
    }
    in >> key; // activations
    std::getline(in, line);
    std::vector<Activation> acts;
    {
        std::istringstream ss(line);
        std::string a;
        while (ss >> a) acts.push_back(activation_from_string(a));
    }
    int bn = 0;
    in >> key >> bn;
    in >> key >> net.threshold;
    int has_norm = 0;
    in >> key >> has_norm;

    const long d = net.layer_sizes.front();
    if (has_norm) {
        net.normalizer.shift.resize(d);
        net.normalizer.scale.resize(d);
        for (long i = 0; i < d; ++i) in >> net.normalizer.shift(i);
        for (long i = 0; i < d; ++i) in >> net.normalizer.scale(i);
        net.normalizer.fitted = true;
    }
    in >> key; // params
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        Layer layer;
        const int nin = net.layer_sizes[l];
        const int nout = net.layer_sizes[l + 1];
        layer.w.resize(nout, nin);
        for (int r = 0; r < nout; ++r) {
            for (int c = 0; c < nin; ++c) in >> layer.w(r, c);
        }
        layer.b.resize(nout);
        for (int r = 0; r < nout; ++r) in >> layer.b(r);
        const bool hidden = l + 2 < net.layer_sizes.size();
        if (hidden) {
            layer.act = acts.at(l);
            layer.batch_norm = bn != 0;
            if (layer.batch_norm) {
                layer.gamma.resize(nout);
                layer.beta.resize(nout);
                layer.run_mean.resize(nout);
                layer.run_var.resize(nout);
                for (int r = 0; r < nout; ++r) in >> layer.gamma(r);
                for (int r = 0; r < nout; ++r) in >> layer.beta(r);
                for (int r = 0; r < nout; ++r) in >> layer.run_mean(r);
                for (int r = 0; r < nout; ++r) in >> layer.run_var(r);
            }
        }
        net.layers.push_back(std::move(layer));
    }
    if (!in) throw std::runtime_error("load_network: truncated file " + path);
    return net;
}

}  // namespace jamsim::nn
