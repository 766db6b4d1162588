#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "jamsim/rng.hpp"

namespace jamsim::nn {

class shape_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class degenerate_dataset : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { Sigmoid, Tanh, LeakyRelu };
enum class OutputKind { Softmax2, SigmoidScalar, Linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Per-feature shift/scale, fitted once on the first training pass and fixed
// afterwards. Identity until fitted.
struct Normalizer {
    Eigen::VectorXd shift;
    Eigen::VectorXd scale;
    bool fitted = false;

    void fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& x) const;
};

struct TrainConfig {
    int minibatch_size = 25;
    double momentum = 0.9;
    int epochs = 200;
    int epochs_per_round = 10;
    double learning_rate = 0.1;
    enum class Optimizer { MomentumSgd, Adam } optimizer = Optimizer::MomentumSgd;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

// Binary dataset; label 0 is the positive class (idle / ACK), label 1 the
// negative class (busy / no ACK). Classifier scores are the softmax
// probability of the negative class, so a score near 0 means a confident
// positive and the decision rule is "score <= threshold => positive".
struct Dataset {
    Eigen::MatrixXd x; // n x d
    Eigen::VectorXi y; // n
    long size() const { return x.rows(); }
};

struct SplitDataset {
    Dataset train;
    Dataset test;
};

// Splits in collection order: first half train, second half test.
SplitDataset split_half(const Dataset& all);

struct Layer {
    Eigen::MatrixXd w; // out x in
    Eigen::VectorXd b;
    Activation act = Activation::Sigmoid; // unused on the output layer
    double leaky_slope = 0.01;
    bool batch_norm = false;
    Eigen::VectorXd gamma, beta, run_mean, run_var;
};

struct LayerCache {
    Eigen::MatrixXd x_in;    // input to the layer (n x in)
    Eigen::MatrixXd z;       // affine output
    Eigen::MatrixXd zhat;    // normalized (batch norm only)
    Eigen::MatrixXd zt;      // post-norm pre-activation
    Eigen::MatrixXd a;       // post-activation
    Eigen::RowVectorXd inv_std;
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    Eigen::MatrixXd out; // network output after the output transform
};

struct Gradients {
    struct LayerGrads {
        Eigen::MatrixXd dw;
        Eigen::VectorXd db;
        Eigen::VectorXd dgamma;
        Eigen::VectorXd dbeta;
    };
    std::vector<LayerGrads> layers;
};

class MlpNetwork {
public:
    std::vector<int> layer_sizes; // input, hidden..., output width
    std::vector<Layer> layers;    // hidden layers then output layer
    OutputKind output = OutputKind::Softmax2;
    Normalizer normalizer;
    double threshold = 0.5;

    static MlpNetwork init(const std::vector<int>& sizes,
                           const std::vector<Activation>& hidden_acts, RngStream& rng,
                           OutputKind output = OutputKind::Softmax2,
                           bool batch_norm = false);

    bool trained() const { return normalizer.fitted; }
    long param_count() const;

    // Forward pass on raw (unnormalized) inputs. In training mode batch-norm
    // layers use minibatch statistics (optionally updating the running
    // averages); in inference mode they use the running averages.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x_raw, bool training,
                            ForwardCache* cache = nullptr, bool update_running = true);
    Eigen::MatrixXd forward_inference(const Eigen::MatrixXd& x_raw) const;

    // Score of the negative class for one sample; requires Softmax2 output.
    double score(const Eigen::VectorXd& x_raw) const;
    Eigen::VectorXd scores(const Eigen::MatrixXd& x_raw) const;

    // d_out is dL/d(pre-activation of the output layer). Returns dL/dX in the
    // normalized input space.
    Eigen::MatrixXd backward(const ForwardCache& cache, const Eigen::MatrixXd& d_out,
                             Gradients& grads) const;
};

// Momentum-SGD / Adam over a network's parameter set.
class Optimizer {
public:
    explicit Optimizer(const TrainConfig& cfg) : cfg_(cfg) {}
    void step(MlpNetwork& net, const Gradients& grads);

private:
    TrainConfig cfg_;
    bool initialized_ = false;
    long t_ = 0;
    Gradients vel_; // momentum / Adam first moment
    Gradients sq_;  // Adam second moment
};

double cross_entropy(const Eigen::MatrixXd& probs, const Eigen::VectorXi& y);

// Minibatched gradient descent on the cross-entropy loss. Fits the input
// normalizer on the first call only. Returns the per-epoch mean loss trace.
std::vector<double> train(MlpNetwork& net, const Dataset& data, const TrainConfig& cfg,
                          RngStream& rng);

// Max relative error between analytic and central-difference gradients.
double gradient_check(MlpNetwork& net, const Eigen::MatrixXd& x_raw,
                      const Eigen::VectorXi& y, double eps = 1e-5);

struct ThresholdResult {
    double threshold = 0.5;
    double e_md = 0.0; // positives classified negative
    double e_fa = 0.0; // negatives classified positive
    double max_error() const { return e_md > e_fa ? e_md : e_fa; }
};

// Errors at a fixed threshold with the "score <= threshold => positive" rule.
ThresholdResult classification_errors(const std::vector<double>& scores,
                                      const std::vector<int>& labels, double threshold);

// Minimizes max{e_MD, e_FA} over midpoints of sorted distinct scores;
// smallest threshold among minimizers.
ThresholdResult select_threshold(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

// Minimizes e_MD + e_FA (the balanced error) over the same candidate set;
// smallest threshold among minimizers. A better-behaved operating point than
// min-max when one class carries one-sided label noise: min-max chases the
// noise floor and equalizes both errors on it, while the balanced sum stays
// at the cluster boundary.
ThresholdResult select_threshold_balanced(const std::vector<double>& scores,
                                          const std::vector<int>& labels);

struct HyperConfig {
    int hidden_layers = 1;
    int neurons = 100;
    Activation act = Activation::Sigmoid;
};

// {1,2} layers x {20,...,100} neurons x {sigmoid, tanh}
std::vector<HyperConfig> default_grid();

struct TuneResult {
    MlpNetwork net;
    HyperConfig config;
    ThresholdResult errors; // on the validation split
};

// Trains one candidate per grid entry and returns the argmin of the
// validation max{e_MD, e_FA}; ties broken by parameter count then grid order.
TuneResult tune_hyperparameters(const Dataset& train_split, const Dataset& valid_split,
                                const std::vector<HyperConfig>& grid,
                                const TrainConfig& cfg, RngStream& rng);

void save_network(const MlpNetwork& net, const std::string& path);
MlpNetwork load_network(const std::string& path);

}  // namespace jamsim::nn
