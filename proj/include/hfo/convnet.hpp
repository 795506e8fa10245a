#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hfo::cnn {

struct LayerSpec {
    enum class Kind { conv, relu, maxpool, residual, flatten, fully_connected, softmax_head };
    Kind kind = Kind::relu;
    int kernel = 0;   // conv
    int channels = 0; // conv out channels / residual channels
    int stride = 1;   // conv
    int window = 0;   // maxpool
    int width = 0;    // fully_connected
    int classes = 0;  // softmax_head

    static LayerSpec conv(int kernel, int out_channels, int stride = 1);
    static LayerSpec relu();
    static LayerSpec maxpool(int window);
    static LayerSpec residual_block(int channels);
    static LayerSpec flatten();
    static LayerSpec fully_connected(int width);
    static LayerSpec softmax_head(int classes);
};

struct ConvNetArch {
    int input_size = 64;
    int input_channels = 1;
    std::vector<LayerSpec> stages;

    // conv(3,8) -> relu -> maxpool(2) -> residual(8) -> maxpool(2) -> flatten
    // -> fc(32) -> relu -> softmax_head(classes)
    static ConvNetArch compact(int classes, int input_size = 64);
};

struct Shape {
    int c = 0, h = 0, w = 0;
    int count() const { return c * h * w; }
};

struct ParamGroup {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
};

struct StagePlan {
    LayerSpec spec;
    Shape in, out;
    int w1 = -1, b1 = -1, w2 = -1, b2 = -1; // group indices, -1 = absent
};

struct ConvNet {
    ConvNetArch arch;
    int class_count = 0;
    int feature_dim = 0;         // softmax head input width
    std::vector<double> theta;   // all parameters, flat
    std::vector<ParamGroup> groups;
    std::vector<StagePlan> plan;
};

// Validates the stage list (single trailing softmax head, one flatten before
// the dense layers, residual blocks preserve shape) and initializes weights
// with fan-in-scaled uniform draws from the seed.
ConvNet build_convnet(const ConvNetArch& arch, std::uint64_t seed);

struct TrainHyper {
    double lr = 0.001;
    int batch_size = 128;
    int epochs = 30;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
};

// One image = input_channels * S * S doubles, channel-major rows.
using Image = std::vector<double>;

struct Forward {
    std::vector<std::vector<double>> logits;        // [n][classes]
    std::vector<std::vector<double>> probabilities; // [n][classes]
    std::vector<std::vector<double>> features;      // softmax head inputs
    std::vector<std::vector<std::vector<double>>> activations; // [n][stage][...]
};

Forward forward(const ConvNet& net, const std::vector<Image>& batch);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grads;    // flat, aligned with net.theta
    std::vector<int> predictions; // argmax class per batch example
};

// Mean cross-entropy over the batch, gradients for every parameter by
// reverse-mode accumulation.
LossGrad loss_and_grad(const ConvNet& net, const std::vector<Image>& batch,
                       const std::vector<int>& labels);

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
};

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, const TrainHyper& hyper);

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    ConvNet net;
    std::vector<EpochStats> history;
};

TrainResult train_convnet(const std::vector<Image>& images, const std::vector<int>& labels,
                          const ConvNetArch& arch, const TrainHyper& hyper);

// Post-ReLU activations of the penultimate fully connected layer (the
// softmax head input).
std::vector<double> extract_features(const ConvNet& net, const Image& image);

std::vector<double> softmax(const std::vector<double>& logits);

} // namespace hfo::cnn
