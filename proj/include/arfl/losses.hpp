#pragma once

#include <span>

#include "arfl/attacks.hpp"
#include "arfl/autodiff.hpp"
#include "arfl/mlp.hpp"

namespace arfl {

// Weight of the feature-correlation term in the overall loss.
struct ArflConfig {
    double lambda = 0.5;
};

// Binary cross entropy against sigmoid(logit) for labels in {+1,-1}, in the
// numerically stable softplus form log(1 + exp(-y * logit)).
ad::TensorPtr bce_loss(ad::Graph& g, const ad::TensorPtr& logit, int y);

// Feature-label correlation loss: -(1/n) * sum_i sigmoid(abs(f_i * y)).
// Always in (-1, -0.5]; lower means stronger correlation.
ad::TensorPtr robust_loss(ad::Graph& g, const ad::TensorPtr& features, int y);

// bce_loss + lambda * robust_loss.
ad::TensorPtr overall_loss(ad::Graph& g, const ad::TensorPtr& logit,
                           const ad::TensorPtr& features, int y, const ArflConfig& cfg);

// KL divergence between Bernoulli(p) and Bernoulli(q); both probabilities are
// clamped to [1e-7, 1 - 1e-7] first.
double kl_bernoulli(double p, double q);
ad::TensorPtr kl_bernoulli(ad::Graph& g, const ad::TensorPtr& p, const ad::TensorPtr& q);

// bce(f(x), y) + beta * KL(sigmoid(logit(x)) || sigmoid(logit(x_adv))) with
// x_adv held fixed; differentiable in the model parameters and in x.
ad::TensorPtr trades_surrogate(ad::Graph& g, const MlpModel& model,
                               const ad::TensorPtr& x, std::span<const double> x_adv,
                               int y, double beta);

// Full TRADES objective: generates x_adv by maximizing the KL term within the
// attack ball, then evaluates the surrogate.
ad::TensorPtr trades_objective(ad::Graph& g, const MlpModel& model,
                               std::span<const double> x, int y, double beta,
                               const AttackSpec& attack_spec);

}  // namespace arfl
