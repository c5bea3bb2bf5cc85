#include "arfl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "arfl/errors.hpp"
#include "arfl/rng.hpp"

namespace fs = std::filesystem;

namespace arfl {

namespace {

const struct SchemeEntry {
    SchemeId id;
    const char* letter;
    const char* name;
    const char* dir;
} kSchemeTable[] = {
    {{Scheme::Standard, false}, "A", "standard", "A_standard"},
    {{Scheme::Standard, true}, "B", "standard+arfl", "B_standard_arfl"},
    {{Scheme::Adversarial, false}, "C", "adversarial", "C_adversarial"},
    {{Scheme::Adversarial, true}, "D", "adversarial+arfl", "D_adversarial_arfl"},
    {{Scheme::Dual, false}, "E", "dual", "E_dual"},
    {{Scheme::Dual, true}, "F", "dual+arfl", "F_dual_arfl"},
    {{Scheme::Trades, false}, "G", "trades", "G_trades"},
};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

SchemeId parse_scheme_token(const std::string& token) {
    for (const auto& entry : kSchemeTable) {
        if (token == entry.letter || token == entry.name || token == entry.dir) {
            return entry.id;
        }
    }
    throw ConfigError("unknown scheme token '" + token + "'");
}

std::string scheme_name(const SchemeId& id) {
    for (const auto& entry : kSchemeTable) {
        if (entry.id == id) return entry.name;
    }
    throw ConfigError("unnamed scheme combination");
}

std::string scheme_dir_name(const SchemeId& id) {
    for (const auto& entry : kSchemeTable) {
        if (entry.id == id) return entry.dir;
    }
    throw ConfigError("unnamed scheme combination");
}

bool SchemeResult::all_ok() const {
    return std::all_of(outcomes.begin(), outcomes.end(),
                       [](const SeedOutcome& o) { return o.ok; });
}

bool ResultsTable::all_ok() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const SchemeResult& r) { return r.all_ok(); });
}

const SchemeResult* ResultsTable::find(const SchemeId& id) const {
    for (const auto& row : rows) {
        if (row.id == id) return &row;
    }
    return nullptr;
}

std::pair<Dataset, Dataset> make_experiment_data(const DatasetSpec& spec,
                                                 std::uint64_t replication_seed) {
    if (spec.kind == DatasetSpec::Kind::TwoMoons) {
        const std::uint64_t base = mix64(spec.seed, replication_seed);
        Dataset train = make_moons(spec.n_train, spec.noise, mix64(base, 1));
        Dataset test = make_moons(spec.n_test, spec.noise, mix64(base, 2));
        return {std::move(train), std::move(test)};
    }
    Dataset full = load_csv(spec.csv_path, spec.csv_header);
    return split(full, spec.csv_test_fraction, mix64(spec.seed, replication_seed));
}

namespace {

TrainConfig scheme_train_config(const ExperimentConfig& cfg, const SchemeId& id,
                                std::uint64_t seed) {
    TrainConfig tc = cfg.train;
    tc.scheme = id.scheme;
    tc.use_arfl = id.use_arfl;
    tc.seed = seed;
    switch (id.scheme) {
        case Scheme::Standard:
            tc.r = 1.0;
            break;
        case Scheme::Adversarial:
            tc.r = 0.0;
            break;
        case Scheme::Dual:
            // keep the configured mixing ratio (0.5 unless overridden)
            break;
        case Scheme::Trades:
            tc.r = 1.0;
            tc.use_arfl = false;
            break;
    }
    return tc;
}

struct CellTask {
    std::size_t row;
    std::size_t slot;
    SchemeId id;
    std::uint64_t seed;
};

void run_cell(const ExperimentConfig& cfg, const CellTask& task, SeedOutcome& outcome,
              const fs::path& run_dir) {
    outcome.seed = task.seed;
    try {
        auto [train_set, test_set] = make_experiment_data(cfg.dataset, task.seed);
        const TrainConfig tc = scheme_train_config(cfg, task.id, task.seed);
        TrainResult trained = train(tc, train_set);

        outcome.standard_metric = accuracy(trained.model, test_set);
        outcome.adversarial_metric =
            adversarial_accuracy(trained.model, test_set, cfg.eval_attack);

        const fs::path seed_dir =
            run_dir / scheme_dir_name(task.id) / ("seed_" + std::to_string(task.seed));
        fs::create_directories(seed_dir);
        save_model(trained.model, (seed_dir / "model.txt").string());
        write_train_log((seed_dir / "train_log.csv").string(), trained.curve);

        if (cfg.emit_boundary || cfg.emit_svg) {
            const BoundaryGrid grid = decision_boundary_grid(
                trained.model, kDefaultGridBounds[0], kDefaultGridBounds[1],
                kDefaultGridBounds[2], kDefaultGridBounds[3], cfg.grid_resolution,
                cfg.grid_resolution);
            if (cfg.emit_boundary) {
                write_grid_csv(grid, (seed_dir / "boundary.csv").string());
            }
            if (cfg.emit_svg) {
                write_boundary_svg(grid, test_set, 50, mix64(task.seed, 0x5c477),
                                   (seed_dir / "boundary.svg").string());
            }
        }
        if (cfg.emit_saliency) {
            const SaliencyMap map =
                saliency(trained.model, test_set.xs.front(), test_set.ys.front());
            write_saliency_csv(map, (seed_dir / "saliency.csv").string());
        }
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
    }
}

void write_results_csv(const ResultsTable& table, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string());
    out << "scheme,arfl,standard_mean,standard_std,adversarial_mean,adversarial_std,"
           "mean_metric\n";
    for (const SchemeResult& row : table.rows) {
        out << scheme_name({row.id.scheme, false}) << ','
            << (row.id.use_arfl ? "yes" : "no") << ','
            << fixed6(row.report.standard_metric) << ',' << fixed6(row.report.standard_std)
            << ',' << fixed6(row.report.adversarial_metric) << ','
            << fixed6(row.report.adversarial_std) << ',' << fixed6(row.report.mean_metric)
            << '\n';
    }
}

void write_per_seed_csv(const ResultsTable& table, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string());
    out << "scheme,arfl,seed,status,standard,adversarial,mean\n";
    for (const SchemeResult& row : table.rows) {
        for (const SeedOutcome& o : row.outcomes) {
            out << scheme_name({row.id.scheme, false}) << ','
                << (row.id.use_arfl ? "yes" : "no") << ',' << o.seed << ','
                << (o.ok ? "ok" : "failed") << ',';
            if (o.ok) {
                out << fixed6(o.standard_metric) << ',' << fixed6(o.adversarial_metric) << ','
                    << fixed6(0.5 * (o.standard_metric + o.adversarial_metric));
            } else {
                out << ",,";
            }
            out << '\n';
        }
    }
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("run_experiment: seeds list is empty");
    if (cfg.schemes.empty()) throw ConfigError("run_experiment: schemes list is empty");
    for (const SchemeId& id : cfg.schemes) {
        validate_train_config(scheme_train_config(cfg, id, cfg.seeds.front()));
    }

    const fs::path run_dir = fs::path(cfg.out_dir) / cfg.run_name;
    fs::create_directories(run_dir);

    ResultsTable table;
    table.rows.resize(cfg.schemes.size());
    std::vector<CellTask> tasks;
    for (std::size_t r = 0; r < cfg.schemes.size(); ++r) {
        table.rows[r].id = cfg.schemes[r];
        table.rows[r].outcomes.resize(cfg.seeds.size());
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            tasks.push_back(CellTask{r, s, cfg.schemes[r], cfg.seeds[s]});
        }
    }

    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));

    std::mutex next_mutex;
    std::size_t next_task = 0;
    const auto worker = [&] {
        for (;;) {
            std::size_t mine;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next_task >= tasks.size()) return;
                mine = next_task++;
            }
            const CellTask& task = tasks[mine];
            run_cell(cfg, task, table.rows[task.row].outcomes[task.slot], run_dir);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (SchemeResult& row : table.rows) {
        EvalReport& rep = row.report;
        for (const SeedOutcome& o : row.outcomes) {
            if (!o.ok) continue;
            rep.per_seed_standard.push_back(o.standard_metric);
            rep.per_seed_adversarial.push_back(o.adversarial_metric);
        }
        if (!rep.per_seed_standard.empty()) {
            rep.standard_metric = mean_of(rep.per_seed_standard);
            rep.adversarial_metric = mean_of(rep.per_seed_adversarial);
            rep.standard_std = stddev_of(rep.per_seed_standard);
            rep.adversarial_std = stddev_of(rep.per_seed_adversarial);
            rep.mean_metric = 0.5 * (rep.standard_metric + rep.adversarial_metric);
        }
    }

    write_results_csv(table, run_dir / "results.csv");
    write_per_seed_csv(table, run_dir / "per_seed.csv");
    return table;
}

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "r") return SweepParam::R;
    if (name == "lambda") return SweepParam::Lambda;
    if (name == "epsilon1" || name == "eps1") return SweepParam::Epsilon1;
    throw ConfigError("unknown sweep parameter '" + name + "' (expected r, lambda, epsilon1)");
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, SweepParam param,
                                  const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("run_sweep: values list is empty");
    for (double v : values) {
        switch (param) {
            case SweepParam::R:
                if (!(v > 0.0 && v < 1.0)) {
                    throw ConfigError("sweep r: value " + std::to_string(v) +
                                      " outside (0,1)");
                }
                break;
            case SweepParam::Lambda:
                if (v < 0.0) throw ConfigError("sweep lambda: value must be >= 0");
                break;
            case SweepParam::Epsilon1:
                if (v < 0.0) throw ConfigError("sweep epsilon1: value must be >= 0");
                break;
        }
    }

    const char* param_name = param == SweepParam::R        ? "r"
                             : param == SweepParam::Lambda ? "lambda"
                                                           : "epsilon1";
    std::vector<SweepPoint> points;
    for (double v : values) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.run_name =
            cfg.run_name + "/sweep_" + param_name + "_" + fixed6(v);
        switch (param) {
            case SweepParam::R:
                point_cfg.train.r = v;
                break;
            case SweepParam::Lambda:
                point_cfg.train.lambda = v;
                break;
            case SweepParam::Epsilon1:
                point_cfg.train.attack.epsilon = v;
                break;
        }
        const ResultsTable table = run_experiment(point_cfg);
        if (!table.all_ok()) {
            throw TrainingError("sweep point " + std::to_string(v) + " had failing seeds");
        }
        // aggregate over all schemes in the run (typically a single row)
        std::vector<double> std_vals, adv_vals;
        for (const SchemeResult& row : table.rows) {
            for (const SeedOutcome& o : row.outcomes) {
                std_vals.push_back(o.standard_metric);
                adv_vals.push_back(o.adversarial_metric);
            }
        }
        points.push_back(SweepPoint{v, mean_of(std_vals), stddev_of(std_vals),
                                    mean_of(adv_vals), stddev_of(adv_vals)});
    }

    const fs::path run_dir = fs::path(cfg.out_dir) / cfg.run_name;
    fs::create_directories(run_dir);
    std::ofstream out(run_dir / ("sweep_" + std::string(param_name) + ".csv"));
    if (!out) throw ConfigError("cannot write sweep csv");
    out << "value,std_metric_mean,std_metric_std,adv_metric_mean,adv_metric_std\n";
    for (const SweepPoint& p : points) {
        out << fixed6(p.value) << ',' << fixed6(p.std_metric_mean) << ','
            << fixed6(p.std_metric_std) << ',' << fixed6(p.adv_metric_mean) << ','
            << fixed6(p.adv_metric_std) << '\n';
    }
    return points;
}

ComparisonReport compare_runs(std::span<const double> metrics_a,
                              std::span<const double> metrics_b) {
    if (metrics_a.size() != metrics_b.size()) {
        throw ComparisonError("compare_runs: per-seed lists have different sizes (" +
                              std::to_string(metrics_a.size()) + " vs " +
                              std::to_string(metrics_b.size()) + ")");
    }
    if (metrics_a.empty()) throw ComparisonError("compare_runs: empty metric lists");
    const MannWhitneyResult mw = mann_whitney_u(metrics_a, metrics_b);
    ComparisonReport report;
    report.u = mw.u;
    report.p = mw.p_two_sided;
    report.significant = mw.p_two_sided < 0.05;
    report.mean_a = mean_of(metrics_a);
    report.mean_b = mean_of(metrics_b);
    return report;
}

std::vector<double> read_per_seed_metric(const std::string& run_dir,
                                         const SchemeId& scheme, const std::string& metric) {
    int column;
    if (metric == "standard") {
        column = 4;
    } else if (metric == "adversarial") {
        column = 5;
    } else if (metric == "mean") {
        column = 6;
    } else {
        throw ConfigError("unknown metric '" + metric +
                          "' (expected standard, adversarial, mean)");
    }

    const std::string path = run_dir + "/per_seed.csv";
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 7) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 7 columns");
        }
        if (fields[0] != scheme_name({scheme.scheme, false})) continue;
        if ((fields[1] == "yes") != scheme.use_arfl) continue;
        if (fields[3] != "ok") {
            throw ComparisonError(path + ": seed " + fields[2] + " failed; cannot compare");
        }
        values.push_back(std::stod(fields[column]));
    }
    if (values.empty()) {
        throw ComparisonError("no per-seed rows for scheme " + scheme_name(scheme) + " in " +
                              path);
    }
    return values;
}

// -- config text format ------------------------------------------------------

namespace {

std::string join_u64(const std::vector<std::uint64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_int(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string format_shortest(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        std::string item = s.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

AttackFamily parse_family(const std::string& key, const std::string& value) {
    if (value == "fgsm") return AttackFamily::Fgsm;
    if (value == "pgd") return AttackFamily::Pgd;
    throw ConfigError(key + ": expected fgsm or pgd, got '" + value + "'");
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    const auto attack_eq = [](const AttackSpec& a, const AttackSpec& b) {
        return a.family == b.family && a.epsilon == b.epsilon && a.steps == b.steps &&
               a.step_size == b.step_size && a.objective == b.objective &&
               a.random_start == b.random_start;
    };
    return run_name == o.run_name && out_dir == o.out_dir &&
           dataset.kind == o.dataset.kind && dataset.n_train == o.dataset.n_train &&
           dataset.n_test == o.dataset.n_test && dataset.noise == o.dataset.noise &&
           dataset.seed == o.dataset.seed && dataset.csv_path == o.dataset.csv_path &&
           dataset.csv_header == o.dataset.csv_header &&
           dataset.csv_test_fraction == o.dataset.csv_test_fraction &&
           train.arfl_mode == o.train.arfl_mode && train.r == o.train.r &&
           train.lambda == o.train.lambda && train.trades_beta == o.train.trades_beta &&
           attack_eq(train.attack, o.train.attack) && train.epochs == o.train.epochs &&
           train.batch_size == o.train.batch_size &&
           train.layer_sizes == o.train.layer_sizes &&
           train.hidden_activation == o.train.hidden_activation &&
           train.optimizer.kind == o.train.optimizer.kind &&
           train.optimizer.learning_rate == o.train.optimizer.learning_rate &&
           train.optimizer.momentum == o.train.optimizer.momentum &&
           attack_eq(eval_attack, o.eval_attack) && schemes == o.schemes &&
           seeds == o.seeds && emit_boundary == o.emit_boundary &&
           emit_saliency == o.emit_saliency && emit_svg == o.emit_svg &&
           grid_resolution == o.grid_resolution && threads == o.threads;
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "run-name = " << cfg.run_name << '\n';
    out << "out-dir = " << cfg.out_dir << '\n';
    out << "dataset = " << (cfg.dataset.kind == DatasetSpec::Kind::TwoMoons ? "two-moons" : "csv")
        << '\n';
    out << "n-train = " << cfg.dataset.n_train << '\n';
    out << "n-test = " << cfg.dataset.n_test << '\n';
    out << "noise = " << format_shortest(cfg.dataset.noise) << '\n';
    out << "data-seed = " << cfg.dataset.seed << '\n';
    out << "csv-path = " << cfg.dataset.csv_path << '\n';
    out << "csv-header = " << (cfg.dataset.csv_header ? "true" : "false") << '\n';
    out << "csv-test-fraction = " << format_shortest(cfg.dataset.csv_test_fraction) << '\n';
    std::string scheme_list;
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
        if (i) scheme_list += ',';
        scheme_list += scheme_name(cfg.schemes[i]);
    }
    out << "schemes = " << scheme_list << '\n';
    out << "seeds = " << join_u64(cfg.seeds) << '\n';
    out << "epochs = " << cfg.train.epochs << '\n';
    out << "batch-size = " << cfg.train.batch_size << '\n';
    out << "layer-sizes = " << join_int(cfg.train.layer_sizes) << '\n';
    out << "hidden-activation = "
        << (cfg.train.hidden_activation == Activation::Tanh ? "tanh" : "relu") << '\n';
    out << "lambda = " << format_shortest(cfg.train.lambda) << '\n';
    out << "r = " << format_shortest(cfg.train.r) << '\n';
    out << "arfl-mode = "
        << (cfg.train.arfl_mode == ArflMode::Consistent ? "consistent" : "literal-eq5") << '\n';
    out << "trades-beta = " << format_shortest(cfg.train.trades_beta) << '\n';
    out << "optimizer = "
        << (cfg.train.optimizer.kind == OptimizerSpec::Kind::Adam ? "adam" : "sgd") << '\n';
    out << "learning-rate = " << format_shortest(cfg.train.optimizer.learning_rate) << '\n';
    out << "momentum = " << format_shortest(cfg.train.optimizer.momentum) << '\n';
    out << "train-attack = " << (cfg.train.attack.family == AttackFamily::Fgsm ? "fgsm" : "pgd")
        << '\n';
    out << "epsilon1 = " << format_shortest(cfg.train.attack.epsilon) << '\n';
    out << "train-steps = " << cfg.train.attack.steps << '\n';
    out << "train-step-size = " << format_shortest(cfg.train.attack.step_size) << '\n';
    out << "eval-attack = " << (cfg.eval_attack.family == AttackFamily::Fgsm ? "fgsm" : "pgd")
        << '\n';
    out << "epsilon2 = " << format_shortest(cfg.eval_attack.epsilon) << '\n';
    out << "eval-steps = " << cfg.eval_attack.steps << '\n';
    out << "eval-step-size = " << format_shortest(cfg.eval_attack.step_size) << '\n';
    out << "pgd-random-start = " << (cfg.train.attack.random_start ? "true" : "false") << '\n';
    out << "emit-boundary = " << (cfg.emit_boundary ? "true" : "false") << '\n';
    out << "emit-saliency = " << (cfg.emit_saliency ? "true" : "false") << '\n';
    out << "emit-svg = " << (cfg.emit_svg ? "true" : "false") << '\n';
    out << "grid-resolution = " << cfg.grid_resolution << '\n';
    out << "threads = " << cfg.threads << '\n';
    return out.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.schemes.clear();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        std::size_t begin = line.find_first_not_of(' ');
        if (begin == std::string::npos) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config:" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = line.substr(begin, eq - begin);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        std::string value = line.substr(eq + 1);
        const std::size_t vbegin = value.find_first_not_of(' ');
        value = vbegin == std::string::npos ? "" : value.substr(vbegin);

        try {
            if (key == "run-name") {
                cfg.run_name = value;
            } else if (key == "out-dir") {
                cfg.out_dir = value;
            } else if (key == "dataset") {
                if (value == "two-moons") {
                    cfg.dataset.kind = DatasetSpec::Kind::TwoMoons;
                } else if (value == "csv") {
                    cfg.dataset.kind = DatasetSpec::Kind::Csv;
                } else {
                    throw ConfigError("dataset: expected two-moons or csv");
                }
            } else if (key == "n-train") {
                cfg.dataset.n_train = std::stoi(value);
            } else if (key == "n-test") {
                cfg.dataset.n_test = std::stoi(value);
            } else if (key == "noise") {
                cfg.dataset.noise = std::stod(value);
            } else if (key == "data-seed") {
                cfg.dataset.seed = std::stoull(value);
            } else if (key == "csv-path") {
                cfg.dataset.csv_path = value;
            } else if (key == "csv-header") {
                cfg.dataset.csv_header = parse_bool(key, value);
            } else if (key == "csv-test-fraction") {
                cfg.dataset.csv_test_fraction = std::stod(value);
            } else if (key == "schemes") {
                for (const std::string& token : split_list(value)) {
                    cfg.schemes.push_back(parse_scheme_token(token));
                }
            } else if (key == "seeds") {
                cfg.seeds.clear();
                for (const std::string& token : split_list(value)) {
                    cfg.seeds.push_back(std::stoull(token));
                }
            } else if (key == "epochs") {
                cfg.train.epochs = std::stoi(value);
            } else if (key == "batch-size") {
                cfg.train.batch_size = std::stoi(value);
            } else if (key == "layer-sizes") {
                cfg.train.layer_sizes.clear();
                for (const std::string& token : split_list(value)) {
                    cfg.train.layer_sizes.push_back(std::stoi(token));
                }
            } else if (key == "hidden-activation") {
                if (value == "tanh") {
                    cfg.train.hidden_activation = Activation::Tanh;
                } else if (value == "relu") {
                    cfg.train.hidden_activation = Activation::Relu;
                } else {
                    throw ConfigError("hidden-activation: expected tanh or relu");
                }
            } else if (key == "lambda") {
                cfg.train.lambda = std::stod(value);
            } else if (key == "r") {
                cfg.train.r = std::stod(value);
            } else if (key == "arfl-mode") {
                if (value == "consistent") {
                    cfg.train.arfl_mode = ArflMode::Consistent;
                } else if (value == "literal-eq5") {
                    cfg.train.arfl_mode = ArflMode::LiteralEq5;
                } else {
                    throw ConfigError("arfl-mode: expected consistent or literal-eq5");
                }
            } else if (key == "trades-beta") {
                cfg.train.trades_beta = std::stod(value);
            } else if (key == "optimizer") {
                if (value == "adam") {
                    cfg.train.optimizer.kind = OptimizerSpec::Kind::Adam;
                } else if (value == "sgd") {
                    cfg.train.optimizer.kind = OptimizerSpec::Kind::Sgd;
                } else {
                    throw ConfigError("optimizer: expected adam or sgd");
                }
            } else if (key == "learning-rate") {
                cfg.train.optimizer.learning_rate = std::stod(value);
            } else if (key == "momentum") {
                cfg.train.optimizer.momentum = std::stod(value);
            } else if (key == "train-attack") {
                cfg.train.attack.family = parse_family(key, value);
            } else if (key == "epsilon1") {
                cfg.train.attack.epsilon = std::stod(value);
            } else if (key == "train-steps") {
                cfg.train.attack.steps = std::stoi(value);
            } else if (key == "train-step-size") {
                cfg.train.attack.step_size = std::stod(value);
            } else if (key == "eval-attack") {
                cfg.eval_attack.family = parse_family(key, value);
            } else if (key == "epsilon2") {
                cfg.eval_attack.epsilon = std::stod(value);
            } else if (key == "eval-steps") {
                cfg.eval_attack.steps = std::stoi(value);
            } else if (key == "eval-step-size") {
                cfg.eval_attack.step_size = std::stod(value);
            } else if (key == "pgd-random-start") {
                cfg.train.attack.random_start = parse_bool(key, value);
            } else if (key == "emit-boundary") {
                cfg.emit_boundary = parse_bool(key, value);
            } else if (key == "emit-saliency") {
                cfg.emit_saliency = parse_bool(key, value);
            } else if (key == "emit-svg") {
                cfg.emit_svg = parse_bool(key, value);
            } else if (key == "grid-resolution") {
                cfg.grid_resolution = std::stoi(value);
            } else if (key == "threads") {
                cfg.threads = std::stoi(value);
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("config:" + std::to_string(line_no) + ": bad value for " + key);
        } catch (const std::out_of_range&) {
            throw ConfigError("config:" + std::to_string(line_no) + ": value out of range for " +
                              key);
        }
    }
    if (cfg.schemes.empty()) cfg.schemes.push_back({Scheme::Standard, false});
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// -- SVG export ---------------------------------------------------------------

namespace {

struct Rgb {
    int r, g, b;
};

// blue (prob 0) through white to red (prob 1)
Rgb heat_color(double p) {
    const auto lerp = [](double a, double b, double t) {
        return static_cast<int>(std::lround(a + (b - a) * t));
    };
    if (p < 0.5) {
        const double t = p / 0.5;
        return {lerp(59, 255, t), lerp(111, 255, t), lerp(182, 255, t)};
    }
    const double t = (p - 0.5) / 0.5;
    return {lerp(255, 214, t), lerp(255, 82, t), lerp(255, 68, t)};
}

}  // namespace

void write_boundary_svg(const BoundaryGrid& grid, const Dataset& scatter,
                        std::size_t max_points, std::uint64_t pick_seed,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_boundary_svg: cannot open " + path);

    const int width = 640, height = 480;
    const auto sx = [&](double x) {
        return (x - grid.xmin) / (grid.xmax - grid.xmin) * width;
    };
    const auto sy = [&](double y) {
        return height - (y - grid.ymin) / (grid.ymax - grid.ymin) * height;
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";

    const double cell_w = static_cast<double>(width) / (grid.nx - 1);
    const double cell_h = static_cast<double>(height) / (grid.ny - 1);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Rgb c = heat_color(grid.probs[static_cast<std::size_t>(iy) * grid.nx + ix]);
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                          "fill=\"rgb(%d,%d,%d)\"/>\n",
                          sx(grid.x_at(ix)) - cell_w / 2, sy(grid.y_at(iy)) - cell_h / 2,
                          cell_w + 0.5, cell_h + 0.5, c.r, c.g, c.b);
            out << buf;
        }
    }

    std::vector<std::size_t> order(scatter.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(pick_seed);
    rng.shuffle(order);
    const std::size_t n_points = std::min(max_points, order.size());
    for (std::size_t k = 0; k < n_points; ++k) {
        const std::size_t i = order[k];
        const char* fill = scatter.ys[i] == 1 ? "#18305e" : "#7a1313";
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\" "
                      "stroke=\"white\" stroke-width=\"1\"/>\n",
                      sx(scatter.xs[i][0]), sy(scatter.xs[i][1]), fill);
        out << buf;
    }
    out << "</svg>\n";
}

}  // namespace arfl
