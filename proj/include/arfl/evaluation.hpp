#pragma once

#include <span>
#include <string>
#include <vector>

#include "arfl/attacks.hpp"
#include "arfl/dataset.hpp"
#include "arfl/mlp.hpp"

namespace arfl {

// Aggregated outcome of one scheme over the seed list; the mean metric is
// exactly the average of the standard and adversarial means.
struct EvalReport {
    double standard_metric = 0.0;
    double adversarial_metric = 0.0;
    double mean_metric = 0.0;
    std::vector<double> per_seed_standard;
    std::vector<double> per_seed_adversarial;
    double standard_std = 0.0;
    double adversarial_std = 0.0;
};

double accuracy(const MlpModel& model, const Dataset& data);

// Accuracy over white-box attacked samples, attacks generated against the
// evaluated model itself.
double adversarial_accuracy(const MlpModel& model, const Dataset& data,
                            const AttackSpec& spec);

// Probability a random positive outranks a random negative; ties count 1/2.
// Throws MetricError when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct MannWhitneyResult {
    double u = 0.0;           // U statistic for sample a
    double p_two_sided = 1.0; // normal approximation, tie-corrected
};

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

struct BoundaryGrid {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    int nx = 0, ny = 0;
    std::vector<double> probs;  // row-major, probs[iy * nx + ix]

    double x_at(int ix) const { return xmin + (xmax - xmin) * ix / (nx - 1); }
    double y_at(int iy) const { return ymin + (ymax - ymin) * iy / (ny - 1); }
};

inline constexpr double kDefaultGridBounds[4] = {-1.5, 2.5, -1.25, 1.75};

// sigmoid(logit) sampled over an evenly spaced nx-by-ny mesh.
BoundaryGrid decision_boundary_grid(const MlpModel& model, double xmin, double xmax,
                                    double ymin, double ymax, int nx, int ny);

// Header x,y,prob; one row per cell, 6-decimal fixed precision.
void write_grid_csv(const BoundaryGrid& grid, const std::string& path);

struct SaliencyMap {
    std::vector<double> grad;    // d(loss)/d(x_i)
    std::vector<double> scaled;  // min-max scaled to [0,1]; all 0.5 when degenerate
    bool degenerate = false;     // constant gradient, scaling impossible
};

// Gradient of the objective with respect to the input coordinates. Defaults
// to the classification loss when no objective is supplied.
SaliencyMap saliency(const MlpModel& model, std::span<const double> x, int y,
                     const AttackObjective& objective = {});

// Columns dim,grad,scaled.
void write_saliency_csv(const SaliencyMap& map, const std::string& path);

double mean_of(std::span<const double> values);
double stddev_of(std::span<const double> values);  // population std over seeds

}  // namespace arfl
