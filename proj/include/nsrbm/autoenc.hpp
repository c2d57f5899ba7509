#pragma once

#include <cstdint>
#include <vector>

namespace nsrbm::autoenc {

struct TrainConfig {
    double learning_rate = 0.1;
    double momentum = 0.0;  // classical momentum on the batch gradient
    int epochs = 1000;
    int batch_size = 8;
    int hidden_size = 24;
    std::uint64_t seed = 0;
    bool tie_weights = false;
    // Optional per-dimension loss weights (empty means uniform). Dimensions
    // with weight > 1 cost more to misreconstruct.
    std::vector<double> loss_weights;
};

/// One-hidden-layer autoencoder, logistic activations on both layers,
/// trained with mean cross-entropy reconstruction loss.
struct AutoEncoder {
    int d_in = 0;
    int d_hidden = 0;
    std::vector<double> enc_w;  // d_hidden x d_in, row-major
    std::vector<double> enc_b;  // d_hidden
    std::vector<double> dec_w;  // d_in x d_hidden, row-major
    std::vector<double> dec_b;  // d_in

    std::vector<double> encode(const std::vector<double>& x) const;
    std::vector<double> reconstruct(const std::vector<double>& x) const;
};

AutoEncoder init_autoencoder(int d_in, const TrainConfig& cfg);

AutoEncoder train(const std::vector<std::vector<double>>& data, const TrainConfig& cfg);

/// Denoising form: reconstruct targets[k] from inputs[k]. The plain overloads
/// are the special case targets == inputs.
AutoEncoder train(const std::vector<std::vector<double>>& inputs,
                  const std::vector<std::vector<double>>& targets, const TrainConfig& cfg);

double loss(const AutoEncoder& ae, const std::vector<std::vector<double>>& data);
double loss(const AutoEncoder& ae, const std::vector<std::vector<double>>& inputs,
            const std::vector<std::vector<double>>& targets);

/// Mean cross-entropy loss over `data` plus its gradient in parameter order
/// (enc_w, enc_b, dec_w, dec_b). Exposed for finite-difference checks.
struct Gradients {
    double loss = 0.0;
    std::vector<double> enc_w, enc_b, dec_w, dec_b;
};
Gradients loss_and_gradients(const AutoEncoder& ae, const std::vector<std::vector<double>>& data);
Gradients loss_and_gradients(const AutoEncoder& ae, const std::vector<std::vector<double>>& inputs,
                             const std::vector<std::vector<double>>& targets);

}  // namespace nsrbm::autoenc
