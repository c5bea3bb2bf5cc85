#include "arfl/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <utility>

#include "arfl/errors.hpp"
#include "arfl/rng.hpp"

namespace arfl {

Dataset make_moons(int n, double noise, std::uint64_t seed) {
    if (n < 2) throw ConfigError("make_moons: need n >= 2, got " + std::to_string(n));
    if (noise < 0.0) throw ConfigError("make_moons: noise must be >= 0");

    const int n_upper = (n + 1) / 2;
    const int n_lower = n / 2;

    Dataset data;
    data.name = "two_moons";
    data.xs.reserve(n);
    data.ys.reserve(n);

    const auto grid = [](int k, int count) {
        return count > 1 ? std::numbers::pi * k / (count - 1) : 0.0;
    };
    for (int k = 0; k < n_upper; ++k) {
        const double t = grid(k, n_upper);
        data.xs.push_back({std::cos(t), std::sin(t)});
        data.ys.push_back(+1);
    }
    for (int k = 0; k < n_lower; ++k) {
        const double t = grid(k, n_lower);
        data.xs.push_back({1.0 - std::cos(t), 0.5 - std::sin(t)});
        data.ys.push_back(-1);
    }

    Rng rng(seed);
    if (noise > 0.0) {
        for (auto& p : data.xs) {
            p[0] += rng.gaussian(0.0, noise);
            p[1] += rng.gaussian(0.0, noise);
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    Dataset shuffled;
    shuffled.name = data.name;
    shuffled.xs.reserve(n);
    shuffled.ys.reserve(n);
    for (int i : order) {
        shuffled.xs.push_back(std::move(data.xs[i]));
        shuffled.ys.push_back(data.ys[i]);
    }
    return shuffled;
}

namespace {

double parse_field(const std::string& path, int line_no, const std::string& field) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad numeric field '" +
                         field + "'");
    }
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_csv: cannot open " + path);

    Dataset data;
    data.name = path;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && skip_header) continue;
        if (line.empty() || line == "\r") continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": need at least one feature and a label");
        }

        std::vector<double> x;
        x.reserve(fields.size() - 1);
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            x.push_back(parse_field(path, line_no, fields[i]));
        }
        const double raw_label = parse_field(path, line_no, fields.back());
        int y = 0;
        if (raw_label == 1.0) {
            y = +1;
        } else if (raw_label == -1.0 || raw_label == 0.0) {
            y = -1;
        } else {
            throw ParseError(path + ":" + std::to_string(line_no) + ": label must be in {+1,-1} or {0,1}, got " +
                             fields.back());
        }

        if (!data.xs.empty() && x.size() != data.xs.front().size()) {
            throw SchemaError(path + ":" + std::to_string(line_no) + ": row has " +
                              std::to_string(x.size()) + " features, expected " +
                              std::to_string(data.xs.front().size()));
        }
        data.xs.push_back(std::move(x));
        data.ys.push_back(y);
    }
    return data;
}

std::vector<std::vector<int>> batches(std::size_t n, int batch_size,
                                      std::uint64_t seed, int epoch) {
    if (batch_size < 1) throw ConfigError("batches: batch_size must be >= 1");

    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    Rng rng(mix64(seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    std::vector<std::vector<int>> result;
    result.reserve((n + batch_size - 1) / batch_size);
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t stop = std::min(n, start + batch_size);
        result.emplace_back(order.begin() + start, order.begin() + stop);
    }
    return result;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction > 1.0) {
        throw ConfigError("split: test_fraction must be in [0,1]");
    }
    std::vector<int> order(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t n_test = static_cast<std::size_t>(std::lround(test_fraction * data.size()));
    Dataset train, test;
    train.name = data.name + ":train";
    test.name = data.name + ":test";
    for (std::size_t i = 0; i < order.size(); ++i) {
        Dataset& dst = i < n_test ? test : train;
        dst.xs.push_back(data.xs[order[i]]);
        dst.ys.push_back(data.ys[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace arfl
