#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jamsim/nn.hpp"
#include "jamsim/rng.hpp"

namespace jamsim::gan {

struct CGanConfig {
    int noise_dim = 16;
    int hidden1 = 128;
    int hidden2 = 128;
    double leaky_slope = 0.2;
    int epochs = 3500;
    int batch_size = 10; // effective batch is min(batch_size, |real|)
    double learning_rate = 2e-3;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
};

struct SyntheticSample {
    Eigen::VectorXd features;
    int label = 0;
    bool synthetic = true;
};

// Conditional GAN over sensing windows; labels enter both networks as a
// one-hot condition appended to the input.
struct CGan {
    nn::MlpNetwork generator;     // (noise + one-hot) -> normalized features
    nn::MlpNetwork discriminator; // (features + one-hot) -> real probability
    nn::Normalizer normalizer;    // fitted on the real features
    int noise_dim = 16;
    int feature_dim = 10;
    std::vector<double> d_loss; // one entry per epoch
    std::vector<double> g_loss;
};

CGan train_cgan(const nn::Dataset& real, const CGanConfig& cfg, RngStream& rng);

// Draws n samples conditioned on label; features de-normalized back to the
// RSSI scale and clamped at zero.
std::vector<SyntheticSample> generate_synthetic(const CGan& gan, int label, int n,
                                                RngStream& rng);

// Per-label synthetic counts proportional to the real label ratio.
std::pair<int, int> proportional_counts(const nn::Dataset& real, int n_synthetic);

nn::Dataset augment_dataset(const nn::Dataset& real,
                            const std::vector<SyntheticSample>& synthetic);

// CSV: epoch, d_loss, g_loss.
void write_loss_csv(const CGan& gan, const std::string& path);

}  // namespace jamsim::gan
