#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arfl/evaluation.hpp"
#include "arfl/training.hpp"

namespace arfl {

struct DatasetSpec {
    enum class Kind { TwoMoons, Csv };
    Kind kind = Kind::TwoMoons;
    int n_train = 10000;
    int n_test = 1000;
    double noise = 0.2;
    std::uint64_t seed = 7;  // base data seed, mixed with each replication seed
    std::string csv_path;
    bool csv_header = false;
    double csv_test_fraction = 0.2;
};

// One results-table row key.
struct SchemeId {
    Scheme scheme = Scheme::Standard;
    bool use_arfl = false;

    bool operator==(const SchemeId&) const = default;
};

// Token forms: letters A..G or names standard, standard+arfl, adversarial,
// adversarial+arfl, dual, dual+arfl, trades.
SchemeId parse_scheme_token(const std::string& token);
std::string scheme_name(const SchemeId& id);   // e.g. "dual+arfl"
std::string scheme_dir_name(const SchemeId& id);  // e.g. "F_dual_arfl"

struct ExperimentConfig {
    std::string run_name = "run";
    std::string out_dir = "out";
    DatasetSpec dataset;
    TrainConfig train;          // template; scheme/use_arfl/r filled per row
    AttackSpec eval_attack;     // evaluation-time attack, budget epsilon_2
    std::vector<SchemeId> schemes = {{Scheme::Standard, false}};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    bool emit_boundary = false;
    bool emit_saliency = false;
    bool emit_svg = false;
    int grid_resolution = 121;
    int threads = 0;  // 0 = hardware concurrency

    bool operator==(const ExperimentConfig&) const;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool ok = false;
    double standard_metric = 0.0;
    double adversarial_metric = 0.0;
    std::string error;
};

struct SchemeResult {
    SchemeId id;
    EvalReport report;
    std::vector<SeedOutcome> outcomes;

    bool all_ok() const;
};

struct ResultsTable {
    std::vector<SchemeResult> rows;

    bool all_ok() const;
    const SchemeResult* find(const SchemeId& id) const;
};

// Trains and evaluates every scheme x seed cell, writes
// <out>/<run-name>/{results.csv, per_seed.csv, <scheme>/seed_<k>/...} and
// returns the aggregated table. Individual seed failures are recorded and do
// not abort the remaining cells.
ResultsTable run_experiment(const ExperimentConfig& cfg);

struct SweepPoint {
    double value = 0.0;
    double std_metric_mean = 0.0;
    double std_metric_std = 0.0;
    double adv_metric_mean = 0.0;
    double adv_metric_std = 0.0;
};

enum class SweepParam { R, Lambda, Epsilon1 };

SweepParam parse_sweep_param(const std::string& name);

// One run_experiment per value over the config's scheme list; emits
// sweep_<param>.csv under <out>/<run-name>/.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, SweepParam param,
                                  const std::vector<double>& values);

struct ComparisonReport {
    double u = 0.0;
    double p = 1.0;
    bool significant = false;  // p < 0.05
    double mean_a = 0.0;
    double mean_b = 0.0;
};

// Mann-Whitney U over per-seed metric lists; both runs must use the same
// number of seeds.
ComparisonReport compare_runs(std::span<const double> metrics_a,
                              std::span<const double> metrics_b);

// Reads the named scheme's per-seed metric column from a run directory's
// per_seed.csv. metric is one of standard, adversarial, mean.
std::vector<double> read_per_seed_metric(const std::string& run_dir,
                                         const SchemeId& scheme, const std::string& metric);

// Plain-text key = value config grammar; parse(emit(cfg)) == cfg.
std::string emit_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Probability heat grid with a scatter of sample points, emitted as
// standalone SVG markup.
void write_boundary_svg(const BoundaryGrid& grid, const Dataset& scatter,
                        std::size_t max_points, std::uint64_t pick_seed,
                        const std::string& path);

// Derived per-replication dataset pair.
std::pair<Dataset, Dataset> make_experiment_data(const DatasetSpec& spec,
                                                 std::uint64_t replication_seed);

}  // namespace arfl
