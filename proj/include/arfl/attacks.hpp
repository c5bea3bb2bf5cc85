#pragma once

#include <functional>
#include <span>
#include <vector>

#include "arfl/autodiff.hpp"
#include "arfl/mlp.hpp"

namespace arfl {

enum class AttackFamily { Fgsm, Pgd };
enum class AttackObjectiveKind { Bce, Kl };

// L-infinity bounded white-box attack description. epsilon is the ball
// radius; steps/step_size apply to PGD only. A step_size of 0 selects the
// 2.5 * epsilon / steps default.
struct AttackSpec {
    AttackFamily family = AttackFamily::Fgsm;
    double epsilon = 0.0;
    int steps = 7;
    double step_size = 0.0;
    AttackObjectiveKind objective = AttackObjectiveKind::Bce;
    bool random_start = false;
    std::uint64_t random_start_seed = 0;

    double effective_step_size() const {
        return step_size > 0.0 ? step_size : 2.5 * epsilon / steps;
    }
};

// Builds the scalar objective the attack ascends at input tensor x.
using AttackObjective = std::function<ad::TensorPtr(ad::Graph&, const MlpModel&,
                                                    const ad::TensorPtr& x, int y)>;

// Maximizes the classification loss.
AttackObjective bce_attack_objective();

// Maximizes KL(p_clean || sigmoid(logit(x'))) with the clean probability held
// fixed; this is the inner maximization used by the TRADES baseline.
AttackObjective kl_attack_objective(double p_clean);

// Single step: x + epsilon * sign(grad_x objective); sign(0) contributes 0.
std::vector<double> fgsm(const MlpModel& model, const AttackObjective& objective,
                         std::span<const double> x, int y, double epsilon);

// Iterated sign-gradient ascent with per-step projection back into the ball.
// Starts at x itself unless spec.random_start is set.
std::vector<double> pgd(const MlpModel& model, const AttackObjective& objective,
                        std::span<const double> x, int y, const AttackSpec& spec);

// Coordinatewise clamp of candidate into [center - epsilon, center + epsilon].
std::vector<double> project_linf(std::span<const double> candidate,
                                 std::span<const double> center, double epsilon);

// Dispatch on spec.family and spec.objective.
std::vector<double> attack(const MlpModel& model, std::span<const double> x, int y,
                           const AttackSpec& spec);

}  // namespace arfl
