#include "arfl/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "arfl/errors.hpp"
#include "arfl/rng.hpp"

namespace arfl {

void validate_train_config(const TrainConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::Standard:
            if (cfg.r != 1.0) throw ConfigError("standard scheme requires r = 1");
            break;
        case Scheme::Adversarial:
            if (cfg.r != 0.0) throw ConfigError("adversarial scheme requires r = 0");
            break;
        case Scheme::Dual:
            if (!(cfg.r > 0.0 && cfg.r < 1.0)) {
                throw ConfigError("dual scheme requires r in (0,1), got " + std::to_string(cfg.r));
            }
            break;
        case Scheme::Trades:
            break;
    }
    if (cfg.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (cfg.trades_beta < 0.0) throw ConfigError("trades beta must be >= 0");
    if (cfg.attack.epsilon < 0.0) throw ConfigError("attack epsilon must be >= 0");
    if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (cfg.optimizer.learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
}

BatchSplit compose_batch(const MlpModel& model, const Dataset& data,
                         const std::vector<int>& batch, const TrainConfig& cfg) {
    if (batch.empty()) throw ContractViolation("compose_batch: empty batch");

    BatchSplit split;
    if (cfg.scheme == Scheme::Trades) {
        split.standard = batch;
        return split;
    }

    const std::size_t n_standard =
        static_cast<std::size_t>(std::ceil(cfg.r * static_cast<double>(batch.size())));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const int idx = batch[i];
        if (i < n_standard) {
            split.standard.push_back(idx);
        } else {
            split.adversarial.push_back(
                AdvSample{attack(model, data.xs[idx], data.ys[idx], cfg.attack), data.ys[idx]});
        }
    }
    return split;
}

ad::TensorPtr batch_objective(ad::Graph& g, const MlpModel& model, const Dataset& data,
                              const BatchSplit& split, const TrainConfig& cfg) {
    if (split.standard.empty() && split.adversarial.empty()) {
        throw ContractViolation("batch_objective: both subsets empty");
    }
    const ArflConfig arfl{cfg.lambda};

    ad::TensorPtr total;
    const auto accumulate = [&](const ad::TensorPtr& term) {
        total = total ? g.add(total, term) : term;
    };

    for (int idx : split.standard) {
        if (cfg.scheme == Scheme::Trades) {
            accumulate(trades_objective(g, model, data.xs[idx], data.ys[idx], cfg.trades_beta,
                                        cfg.attack));
            continue;
        }
        auto fwd = forward_point(g, model, data.xs[idx]);
        if (cfg.use_arfl) {
            accumulate(overall_loss(g, fwd.logit, fwd.features, data.ys[idx], arfl));
        } else {
            accumulate(bce_loss(g, fwd.logit, data.ys[idx]));
        }
    }
    for (const AdvSample& sample : split.adversarial) {
        auto fwd = forward_point(g, model, sample.x);
        auto term = bce_loss(g, fwd.logit, sample.y);
        if (cfg.use_arfl) {
            const double weight =
                cfg.arfl_mode == ArflMode::Consistent ? cfg.lambda : -cfg.lambda;
            term = g.add(term, g.scale(robust_loss(g, fwd.features, sample.y), weight));
        }
        accumulate(term);
    }

    const double count =
        static_cast<double>(split.standard.size() + split.adversarial.size());
    return g.scale(total, 1.0 / count);
}

void optimizer_step(std::vector<ad::TensorPtr>& params, OptimizerState& state,
                    const OptimizerSpec& spec) {
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            state.m[i].assign(params[i]->values.size(), 0.0);
            state.v[i].assign(params[i]->values.size(), 0.0);
        }
    }
    ++state.step;

    if (spec.kind == OptimizerSpec::Kind::Sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            ad::Tensor& p = *params[i];
            for (std::size_t k = 0; k < p.values.size(); ++k) {
                state.m[i][k] = spec.momentum * state.m[i][k] + p.grad[k];
                p.values[k] -= spec.learning_rate * state.m[i][k];
            }
        }
        return;
    }

    const double bias1 = 1.0 - std::pow(spec.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(spec.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        ad::Tensor& p = *params[i];
        for (std::size_t k = 0; k < p.values.size(); ++k) {
            const double grad = p.grad[k];
            state.m[i][k] = spec.beta1 * state.m[i][k] + (1.0 - spec.beta1) * grad;
            state.v[i][k] = spec.beta2 * state.v[i][k] + (1.0 - spec.beta2) * grad * grad;
            const double m_hat = state.m[i][k] / bias1;
            const double v_hat = state.v[i][k] / bias2;
            p.values[k] -= spec.learning_rate * m_hat / (std::sqrt(v_hat) + spec.epsilon);
        }
    }
}

namespace {

double clean_accuracy(const MlpModel& model, const Dataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (predict(model, data.xs[i]) == data.ys[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const Dataset& train_set) {
    validate_train_config(cfg);
    if (train_set.size() == 0) throw ContractViolation("train: empty training set");

    TrainResult result;
    result.model = init_mlp(cfg.layer_sizes, cfg.seed, cfg.hidden_activation);
    std::vector<ad::TensorPtr> params = parameters(result.model);
    OptimizerState opt_state;

    const std::uint64_t order_seed = mix64(cfg.seed, 0x0bae5u);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double objective_sum = 0.0;
        int batch_index = 0;
        for (const std::vector<int>& batch :
             batches(train_set.size(), cfg.batch_size, order_seed, epoch)) {
            const BatchSplit split = compose_batch(result.model, train_set, batch, cfg);
            ad::Graph g;
            auto objective = batch_objective(g, result.model, train_set, split, cfg);
            const double value = objective->scalar();
            if (!std::isfinite(value)) {
                throw TrainingError("non-finite objective " + std::to_string(value) +
                                    " at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_index));
            }
            objective_sum += value;
            g.backward(objective);
            optimizer_step(params, opt_state, cfg.optimizer);
            ++batch_index;
        }
        result.curve.push_back(EpochLog{epoch, objective_sum / batch_index,
                                        clean_accuracy(result.model, train_set)});
    }
    return result;
}

void write_train_log(const std::string& path, const std::vector<EpochLog>& curve) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_train_log: cannot open " + path);
    out << "epoch,objective,clean_train_acc\n";
    char buf[96];
    for (const EpochLog& row : curve) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", row.epoch, row.objective,
                      row.clean_train_acc);
        out << buf;
    }
}

}  // namespace arfl
