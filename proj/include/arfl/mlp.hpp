#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arfl/autodiff.hpp"

namespace arfl {

enum class Activation { Tanh, Relu };

// Feedforward binary classifier. The final layer emits one raw logit (no
// output nonlinearity); the activations after the last hidden layer are the
// feature vector consumed by the robust loss.
struct MlpModel {
    struct Layer {
        ad::TensorPtr weights;  // (out x in)
        ad::TensorPtr biases;   // (out x 1)
    };

    std::vector<int> layer_sizes;
    Activation hidden_activation = Activation::Tanh;
    std::vector<Layer> layers;

    int input_dim() const { return layer_sizes.front(); }
    int feature_dim() const { return layer_sizes[layer_sizes.size() - 2]; }
};

struct ForwardResult {
    ad::TensorPtr logit;     // (1 x 1)
    ad::TensorPtr features;  // penultimate-layer activations
};

// Glorot-uniform weights, zero biases, fully determined by seed.
// layer_sizes must have >= 2 entries and end in 1.
MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed,
                  Activation hidden = Activation::Tanh);

// Differentiable forward pass; x joins the graph as given (so callers control
// whether input gradients are tracked).
ForwardResult forward(ad::Graph& g, const MlpModel& model, const ad::TensorPtr& x);

// Convenience wrapper creating the input leaf from raw coordinates.
ForwardResult forward_point(ad::Graph& g, const MlpModel& model,
                            std::span<const double> x, bool x_requires_grad = false);

// Graph-free forward pass with the same operation order as forward(); used on
// hot evaluation paths. Returns the raw logit.
double raw_logit(const MlpModel& model, std::span<const double> x);

// +1 if sigmoid(logit) >= 0.5 (logit >= 0), else -1.
int predict(const MlpModel& model, std::span<const double> x);

std::vector<ad::TensorPtr> parameters(const MlpModel& model);
long parameter_count(const MlpModel& model);
MlpModel clone(const MlpModel& model);

// Plain-text checkpoint, one line per tensor: name rows cols v11 v12 ...
// Values are written in shortest round-trip decimal form, so a loaded model
// reproduces bitwise-equal forward results.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace arfl
