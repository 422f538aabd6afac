#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avdb/dataset.hpp"
#include "avdb/image.hpp"

namespace avdb {

/// Channel-major, row-major activation tensor.
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    static Tensor3 zeros(int c, int h, int w) {
        return Tensor3{c, h, w,
                       std::vector<double>(static_cast<std::size_t>(c) * h * w, 0.0)};
    }
    const double& at(int c, int y, int x) const {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double& at(int c, int y, int x) {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    std::size_t size() const { return values.size(); }
};

/// Square odd kernels, stride 1, zero "same" padding.
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    int ksize = 3;
    std::vector<double> kernels;  // [out][in][ky][kx]
    std::vector<double> bias;     // [out]

    double kernel(int o, int c, int ky, int kx) const {
        return kernels[((static_cast<std::size_t>(o) * in_channels + c) * ksize + ky) *
                           ksize +
                       kx];
    }
};

struct FcLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights;  // [out][in]
    std::vector<double> bias;     // [out]
};

/// Conv stages (conv + relu + 2x2 max-pool each), then fc1 + relu, then a
/// two-way fc head read through softmax. Class index 0 is Drone, 1 is Bird.
struct CnnModel {
    int input_size = 0;
    std::vector<ConvLayer> conv;
    FcLayer fc1;
    FcLayer fc2;

    int depth() const { return static_cast<int>(conv.size()); }
};

struct CnnTrainConfig {
    std::uint32_t epochs = 80;
    std::uint32_t batch = 32;
    double lr = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 0;
    std::vector<int> conv_channels = {8, 16, 32};
    int fc_hidden = 128;
};

/// Parameter gradients, mirroring the model's shapes.
struct CnnGradients {
    std::vector<ConvLayer> conv;
    FcLayer fc1;
    FcLayer fc2;
};

struct ForwardCache {
    std::vector<Tensor3> stage_in;  // input to conv stage i
    std::vector<Tensor3> conv_z;    // conv pre-activations
    std::vector<Tensor3> conv_a;    // relu outputs
    std::vector<std::vector<std::size_t>> pool_argmax;  // flat index into conv_a
    Tensor3 pooled_last;
    std::vector<double> fc1_z;
    std::vector<double> fc1_a;
    std::vector<double> logits;
    std::vector<double> probs;
};

struct EpochStats {
    double mean_loss = 0.0;
    double accuracy = 0.0;
};

// --- layer primitives -------------------------------------------------------

Tensor3 conv2d_forward(const Tensor3& x, const ConvLayer& layer);

/// Non-overlapping 2x2 max per channel; argmax (first occurrence row-major
/// on ties) is returned as flat indices into the input for the backward pass.
std::pair<Tensor3, std::vector<std::size_t>> maxpool2x2(const Tensor3& x);

Tensor3 relu(const Tensor3& x);
std::vector<double> relu(const std::vector<double>& x);

std::vector<double> fc_forward(const std::vector<double>& x, const FcLayer& layer);

std::vector<double> softmax(const std::vector<double>& z);

/// -ln(max(p[target], 1e-12)).
double cross_entropy(const std::vector<double>& p, int target);

// --- whole-network operations ------------------------------------------------

/// He-initialized model with zero biases; input_size must be divisible by
/// 2^depth.
CnnModel make_cnn(int input_size, const std::vector<int>& conv_channels,
                  int fc_hidden, std::uint64_t seed);

std::pair<std::vector<double>, ForwardCache> cnn_forward(const CnnModel& m,
                                                         const GrayTensor& x);

/// Analytic gradients of cross-entropy(softmax(.), target) w.r.t. every
/// parameter, from a matching forward cache.
CnnGradients cnn_backward(const CnnModel& m, const ForwardCache& cache, int target);

CnnGradients cnn_gradients(const CnnModel& m, const GrayTensor& x, int target);

Label cnn_predict(const CnnModel& m, const GrayTensor& x);

inline int class_index(Label l) { return l == Label::Drone ? 0 : 1; }
inline Label label_from_index(int i) { return i == 0 ? Label::Drone : Label::Bird; }

/// SGD with momentum over seeded-shuffled minibatches; logs one entry per
/// epoch and stops early once the mean epoch loss moves by < 1e-5 for five
/// consecutive epochs.
std::pair<CnnModel, std::vector<EpochStats>> cnn_train(const Dataset& ds,
                                                       const CnnTrainConfig& cfg = {});

/// Channel progression used for the depth sweep.
std::vector<int> default_conv_channels(int depth);

// --- gradient checking --------------------------------------------------------

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_param;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// Compares supplied gradients against central differences of the forward
/// loss, parameter by parameter. Relative error is guarded at 1e-4 so
/// near-zero gradients compare in absolute terms.
GradCheckResult compare_to_numeric(CnnModel& m, const GrayTensor& x, int target,
                                   double h, const CnnGradients& grads);

GradCheckResult gradient_check(CnnModel& m, const GrayTensor& x, int target,
                               double h = 1e-5);

/// The fixed tiny-network check behind the gradcheck command: 8x8 input, one
/// two-channel conv stage, four hidden units, seeded input and weights.
GradCheckResult reference_gradient_check();

/// Visits every parameter array in declaration order (conv kernels and bias
/// per stage, then fc1 and fc2 weights and bias).
template <typename Model, typename F>
void visit_params(Model& m, F&& f) {
    for (std::size_t i = 0; i < m.conv.size(); ++i) {
        f("conv" + std::to_string(i) + ".kernels", m.conv[i].kernels);
        f("conv" + std::to_string(i) + ".bias", m.conv[i].bias);
    }
    f("fc1.weights", m.fc1.weights);
    f("fc1.bias", m.fc1.bias);
    f("fc2.weights", m.fc2.weights);
    f("fc2.bias", m.fc2.bias);
}

}  // namespace avdb
