#include "arfl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "arfl/errors.hpp"
#include "arfl/losses.hpp"

namespace arfl {

double accuracy(const MlpModel& model, const Dataset& data) {
    if (data.size() == 0) throw ContractViolation("accuracy: empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (predict(model, data.xs[i]) == data.ys[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double adversarial_accuracy(const MlpModel& model, const Dataset& data,
                            const AttackSpec& spec) {
    if (data.size() == 0) throw ContractViolation("adversarial_accuracy: empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::vector<double> x_adv = attack(model, data.xs[i], data.ys[i], spec);
        if (predict(model, x_adv) == data.ys[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

// midranks of the pooled sample, 1-based
std::vector<double> midranks(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double normal_sf(double z) {  // P(Z > z)
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw ContractViolation("auc: scores and labels differ in length");
    }
    std::size_t positives = 0;
    for (int y : labels) positives += (y == 1);
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw MetricError("auc: both classes must be present");
    }

    // rank-sum form: U = R_pos - P(P+1)/2, AUC = U / (P*N)
    const std::vector<double> ranks = midranks(scores);
    double rank_sum_pos = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) rank_sum_pos += ranks[i];
    }
    const double p = static_cast<double>(positives);
    const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw ContractViolation("mann_whitney_u: both samples must be non-empty");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> ranks = midranks(pooled);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += ranks[i];
    const double u = rank_sum_a - na * (na + 1.0) / 2.0;

    // tie-corrected variance of U under H0
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double mean = na * nb / 2.0;
    const double variance =
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));

    MannWhitneyResult result;
    result.u = u;
    if (variance <= 0.0 || u == mean) {
        result.p_two_sided = 1.0;
        return result;
    }
    const double shift = u > mean ? -0.5 : 0.5;  // continuity correction
    const double z = (u - mean + shift) / std::sqrt(variance);
    result.p_two_sided = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    return result;
}

BoundaryGrid decision_boundary_grid(const MlpModel& model, double xmin, double xmax,
                                    double ymin, double ymax, int nx, int ny) {
    if (xmin >= xmax || ymin >= ymax) {
        throw ConfigError("decision_boundary_grid: degenerate bounds");
    }
    if (nx < 2 || ny < 2) {
        throw ConfigError("decision_boundary_grid: resolution must be at least 2x2");
    }
    BoundaryGrid grid;
    grid.xmin = xmin;
    grid.xmax = xmax;
    grid.ymin = ymin;
    grid.ymax = ymax;
    grid.nx = nx;
    grid.ny = ny;
    grid.probs.resize(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double point[2] = {grid.x_at(ix), grid.y_at(iy)};
            const double logit = raw_logit(model, point);
            grid.probs[static_cast<std::size_t>(iy) * nx + ix] = 1.0 / (1.0 + std::exp(-logit));
        }
    }
    return grid;
}

void write_grid_csv(const BoundaryGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_grid_csv: cannot open " + path);
    out << "x,y,prob\n";
    char buf[96];
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", grid.x_at(ix), grid.y_at(iy),
                          grid.probs[static_cast<std::size_t>(iy) * grid.nx + ix]);
            out << buf;
        }
    }
}

SaliencyMap saliency(const MlpModel& model, std::span<const double> x, int y,
                     const AttackObjective& objective) {
    const AttackObjective& obj = objective ? objective : bce_attack_objective();
    ad::Graph g;
    auto xt = g.vec(x, /*requires_grad=*/true);
    auto root = obj(g, model, xt, y);
    g.backward(root);

    SaliencyMap map;
    map.grad = xt->grad;
    const auto [lo, hi] = std::minmax_element(map.grad.begin(), map.grad.end());
    if (*hi == *lo) {
        map.degenerate = true;
        map.scaled.assign(map.grad.size(), 0.5);
    } else {
        map.scaled.resize(map.grad.size());
        for (std::size_t i = 0; i < map.grad.size(); ++i) {
            map.scaled[i] = (map.grad[i] - *lo) / (*hi - *lo);
        }
    }
    return map;
}

void write_saliency_csv(const SaliencyMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_saliency_csv: cannot open " + path);
    out << "dim,grad,scaled\n";
    char buf[96];
    for (std::size_t i = 0; i < map.grad.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", i, map.grad[i], map.scaled[i]);
        out << buf;
    }
}

double mean_of(std::span<const double> values) {
    if (values.empty()) throw ContractViolation("mean_of: empty input");
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double stddev_of(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mu = mean_of(values);
    double acc = 0.0;
    for (double v : values) acc += (v - mu) * (v - mu);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace arfl
