#include "arfl/losses.hpp"

#include <algorithm>
#include <cmath>

#include "arfl/errors.hpp"

namespace arfl {

namespace {

constexpr double kProbFloor = 1e-7;
constexpr double kProbCeil = 1.0 - 1e-7;

void require_label(int y) {
    if (y != 1 && y != -1) {
        throw ContractViolation("label must be +1 or -1, got " + std::to_string(y));
    }
}

}  // namespace

ad::TensorPtr bce_loss(ad::Graph& g, const ad::TensorPtr& logit, int y) {
    require_label(y);
    if (!logit->is_scalar()) {
        throw ContractViolation("bce_loss: logit must be scalar");
    }
    return g.softplus(g.scale(logit, -static_cast<double>(y)));
}

ad::TensorPtr robust_loss(ad::Graph& g, const ad::TensorPtr& features, int y) {
    require_label(y);
    if (features->size() == 0) {
        throw ContractViolation("robust_loss: empty feature vector");
    }
    auto correlation = g.abs(g.scale(features, static_cast<double>(y)));
    return g.neg(g.mean(g.sigmoid(correlation)));
}

ad::TensorPtr overall_loss(ad::Graph& g, const ad::TensorPtr& logit,
                           const ad::TensorPtr& features, int y, const ArflConfig& cfg) {
    if (cfg.lambda < 0.0) {
        throw ContractViolation("overall_loss: lambda must be >= 0");
    }
    return g.add(bce_loss(g, logit, y), g.scale(robust_loss(g, features, y), cfg.lambda));
}

double kl_bernoulli(double p, double q) {
    p = std::clamp(p, kProbFloor, kProbCeil);
    q = std::clamp(q, kProbFloor, kProbCeil);
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

ad::TensorPtr kl_bernoulli(ad::Graph& g, const ad::TensorPtr& p, const ad::TensorPtr& q) {
    auto pc = g.clamp(p, kProbFloor, kProbCeil);
    auto qc = g.clamp(q, kProbFloor, kProbCeil);
    auto one_minus_p = g.shift(g.neg(pc), 1.0);
    auto one_minus_q = g.shift(g.neg(qc), 1.0);
    auto positive_term = g.mul(pc, g.sub(g.log(pc), g.log(qc)));
    auto negative_term = g.mul(one_minus_p, g.sub(g.log(one_minus_p), g.log(one_minus_q)));
    return g.add(positive_term, negative_term);
}

ad::TensorPtr trades_surrogate(ad::Graph& g, const MlpModel& model,
                               const ad::TensorPtr& x, std::span<const double> x_adv,
                               int y, double beta) {
    if (beta < 0.0) {
        throw ContractViolation("trades_surrogate: beta must be >= 0");
    }
    auto clean = forward(g, model, x);
    auto loss = bce_loss(g, clean.logit, y);
    if (beta > 0.0) {
        auto adv = forward_point(g, model, x_adv);
        auto kl = kl_bernoulli(g, g.sigmoid(clean.logit), g.sigmoid(adv.logit));
        loss = g.add(loss, g.scale(kl, beta));
    }
    return loss;
}

ad::TensorPtr trades_objective(ad::Graph& g, const MlpModel& model,
                               std::span<const double> x, int y, double beta,
                               const AttackSpec& attack_spec) {
    AttackSpec spec = attack_spec;
    spec.objective = AttackObjectiveKind::Kl;
    std::vector<double> x_adv = attack(model, x, y, spec);
    return trades_surrogate(g, model, g.vec(x), x_adv, y, beta);
}

}  // namespace arfl
