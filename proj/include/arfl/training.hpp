#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arfl/attacks.hpp"
#include "arfl/dataset.hpp"
#include "arfl/losses.hpp"
#include "arfl/mlp.hpp"

namespace arfl {

enum class Scheme { Standard, Adversarial, Dual, Trades };

// Sign of the feature-correlation term on the adversarial branch.
// Consistent adds +lambda * L_robust on both branches; LiteralEq5 subtracts it
// on the adversarial branch.
enum class ArflMode { Consistent, LiteralEq5 };

struct OptimizerSpec {
    enum class Kind { Adam, Sgd };
    Kind kind = Kind::Adam;
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double momentum = 0.0;  // SGD only
};

struct TrainConfig {
    Scheme scheme = Scheme::Standard;
    bool use_arfl = false;
    ArflMode arfl_mode = ArflMode::Consistent;
    double r = 1.0;       // fraction of each batch kept standard
    double lambda = 0.5;
    double trades_beta = 6.0;
    AttackSpec attack;    // training-time generation, budget epsilon_1
    int epochs = 200;
    int batch_size = 128;
    std::vector<int> layer_sizes = {2, 10, 10, 1};
    Activation hidden_activation = Activation::Tanh;
    OptimizerSpec optimizer;
    std::uint64_t seed = 1;
};

// Throws ConfigError unless r matches the scheme (1 for standard, 0 for
// adversarial, (0,1) for dual) and all counts/weights are legal.
void validate_train_config(const TrainConfig& cfg);

struct AdvSample {
    std::vector<double> x;
    int y = 0;
};

struct BatchSplit {
    std::vector<int> standard;        // indices into the dataset
    std::vector<AdvSample> adversarial;
};

// First ceil(r * |batch|) samples stay standard; the rest are replaced by
// adversarial counterparts generated against the current model.
BatchSplit compose_batch(const MlpModel& model, const Dataset& data,
                         const std::vector<int>& batch, const TrainConfig& cfg);

// Mean per-sample loss over both subsets: standard samples contribute
// L_overall (or plain BCE without ARFL), adversarial samples BCE plus the
// configured ARFL term. The Trades scheme pairs every sample with a
// KL-adversary instead.
ad::TensorPtr batch_objective(ad::Graph& g, const MlpModel& model, const Dataset& data,
                              const BatchSplit& split, const TrainConfig& cfg);

struct OptimizerState {
    long step = 0;
    std::vector<std::vector<double>> m;  // Adam first moment / SGD velocity
    std::vector<std::vector<double>> v;  // Adam second moment
};

// In-place parameter update from the gradients currently stored on params.
void optimizer_step(std::vector<ad::TensorPtr>& params, OptimizerState& state,
                    const OptimizerSpec& spec);

struct EpochLog {
    int epoch = 0;
    double objective = 0.0;
    double clean_train_acc = 0.0;
};

struct TrainResult {
    MlpModel model;
    std::vector<EpochLog> curve;
};

// Full training run; deterministic in (cfg, train_set). Throws TrainingError
// with epoch/batch diagnostics if the objective stops being finite.
TrainResult train(const TrainConfig& cfg, const Dataset& train_set);

// epoch,objective,clean_train_acc at 6-decimal fixed precision.
void write_train_log(const std::string& path, const std::vector<EpochLog>& curve);

}  // namespace arfl
