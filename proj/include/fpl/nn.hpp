#ifndef FPL_NN_HPP
#define FPL_NN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpl/common.hpp"

namespace fpl::nn {

enum class Activation { Tanh, Relu };
enum class OutputHead { Linear, Softmax };
enum class LossKind { Mse, CrossEntropySoftmax };
enum class OptimizerKind { Gd, Sgd, Adam };

// Fully-connected network parameters. weights[l] has shape
// (widths[l+1] x widths[l]); biases[l] has length widths[l+1].
struct NetworkParams {
    std::vector<std::size_t> widths;
    std::vector<Mat> weights;
    std::vector<Vec> biases;
    Activation activation = Activation::Tanh;
    OutputHead head = OutputHead::Linear;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_dim() const { return widths.front(); }
    std::size_t output_dim() const { return widths.back(); }
    std::size_t param_count() const;
};

struct TrainConfig {
    LossKind loss = LossKind::Mse;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    std::size_t batch_size = 0;  // 0 = full batch
    std::size_t epochs = 0;
    double init_std = 0.1;
    std::uint64_t seed = 0;
    std::size_t record_every = 1;
};

struct Dataset {
    Mat inputs;  // n x d
    Mat labels;  // n x c (one-hot for cross-entropy)
};

struct TraceRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    Mat probe_outputs;  // empty when no probe set was given
};

struct TrainingTrace {
    std::vector<TraceRecord> records;
};

// Adam moment estimates, flat over all parameters in layer order (W then b).
struct AdamState {
    Vec m, v;
    std::uint64_t step = 0;
};

NetworkParams init_network(const std::vector<std::size_t>& widths, Activation act, OutputHead head,
                           double init_std, std::uint64_t seed);

// batch forward: inputs (B x d) -> outputs (B x c)
Mat forward(const NetworkParams& params, const Mat& inputs);

struct LossGrad {
    double loss = 0.0;
    std::vector<Mat> dW;
    std::vector<Vec> db;
};

LossGrad loss_and_grad(const NetworkParams& params, const Mat& inputs, const Mat& labels,
                       LossKind kind);

void gd_step(NetworkParams& params, const LossGrad& grad, double lr);
void adam_step(NetworkParams& params, AdamState& state, const LossGrad& grad, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

AdamState make_adam_state(const NetworkParams& params);

// Probe callback sees the epoch index and the network outputs on the probe
// inputs; it runs at epoch 0, every record_every epochs, and at the end.
using ProbeFn = std::function<void(std::size_t epoch, const Mat& probe_outputs)>;

TrainingTrace train(NetworkParams& params, const Dataset& data, const TrainConfig& config,
                    const Mat* probe_inputs = nullptr, const ProbeFn& probe = {});

// Flat little-endian f64 array prefixed by a one-line JSON header.
void save_network(const NetworkParams& params, const std::string& path);
NetworkParams load_network(const std::string& path);

const char* to_string(Activation a);
const char* to_string(OutputHead h);
Activation activation_from_string(const std::string& s);
OutputHead head_from_string(const std::string& s);
LossKind loss_from_string(const std::string& s);
OptimizerKind optimizer_from_string(const std::string& s);

}  // namespace fpl::nn

#endif
