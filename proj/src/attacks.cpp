#include "arfl/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "arfl/errors.hpp"
#include "arfl/losses.hpp"
#include "arfl/rng.hpp"

namespace arfl {

namespace {

double sign(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

// one ascent step direction: sign of the input gradient of the objective
std::vector<double> input_gradient_sign(const MlpModel& model, const AttackObjective& objective,
                                        std::span<const double> x, int y) {
    ad::Graph g;
    auto xt = g.vec(x, /*requires_grad=*/true);
    auto root = objective(g, model, xt, y);
    g.backward(root);
    std::vector<double> s(x.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = sign(xt->grad[i]);
    return s;
}

}  // namespace

AttackObjective bce_attack_objective() {
    return [](ad::Graph& g, const MlpModel& model, const ad::TensorPtr& x, int y) {
        return bce_loss(g, forward(g, model, x).logit, y);
    };
}

AttackObjective kl_attack_objective(double p_clean) {
    return [p_clean](ad::Graph& g, const MlpModel& model, const ad::TensorPtr& x, int y) {
        (void)y;
        auto q = g.sigmoid(forward(g, model, x).logit);
        return kl_bernoulli(g, g.scalar(p_clean), q);
    };
}

std::vector<double> project_linf(std::span<const double> candidate,
                                 std::span<const double> center, double epsilon) {
    if (candidate.size() != center.size()) {
        throw DimensionError("project_linf: candidate length " + std::to_string(candidate.size()) +
                             " vs center length " + std::to_string(center.size()));
    }
    std::vector<double> out(candidate.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::clamp(candidate[i], center[i] - epsilon, center[i] + epsilon);
    }
    return out;
}

std::vector<double> fgsm(const MlpModel& model, const AttackObjective& objective,
                         std::span<const double> x, int y, double epsilon) {
    if (epsilon < 0.0) throw ContractViolation("fgsm: epsilon must be >= 0");
    std::vector<double> x_adv(x.begin(), x.end());
    if (epsilon == 0.0) return x_adv;
    const std::vector<double> s = input_gradient_sign(model, objective, x, y);
    for (std::size_t i = 0; i < x_adv.size(); ++i) x_adv[i] += epsilon * s[i];
    return x_adv;
}

std::vector<double> pgd(const MlpModel& model, const AttackObjective& objective,
                        std::span<const double> x, int y, const AttackSpec& spec) {
    if (spec.epsilon < 0.0) throw ContractViolation("pgd: epsilon must be >= 0");
    if (spec.steps < 1) throw ContractViolation("pgd: steps must be >= 1");

    std::vector<double> current(x.begin(), x.end());
    if (spec.epsilon == 0.0) return current;

    if (spec.random_start) {
        Rng rng(spec.random_start_seed);
        for (double& v : current) v += rng.uniform(-spec.epsilon, spec.epsilon);
    }
    const double step = spec.effective_step_size();
    for (int k = 0; k < spec.steps; ++k) {
        const std::vector<double> s = input_gradient_sign(model, objective, current, y);
        for (std::size_t i = 0; i < current.size(); ++i) current[i] += step * s[i];
        current = project_linf(current, x, spec.epsilon);
    }
    return current;
}

std::vector<double> attack(const MlpModel& model, std::span<const double> x, int y,
                           const AttackSpec& spec) {
    AttackObjective objective;
    if (spec.objective == AttackObjectiveKind::Bce) {
        objective = bce_attack_objective();
    } else {
        ad::Graph g;
        const double logit = forward_point(g, model, x).logit->scalar();
        objective = kl_attack_objective(1.0 / (1.0 + std::exp(-logit)));
    }
    if (spec.family == AttackFamily::Fgsm) {
        return fgsm(model, objective, x, y, spec.epsilon);
    }
    return pgd(model, objective, x, y, spec);
}

}  // namespace arfl
