#include "arfl/mlp.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "arfl/errors.hpp"
#include "arfl/rng.hpp"

namespace arfl {

namespace {

ad::TensorPtr make_param(int rows, int cols) {
    auto t = std::make_shared<ad::Tensor>();
    t->rows = rows;
    t->cols = cols;
    t->values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    t->grad.assign(t->values.size(), 0.0);
    t->requires_grad = true;
    return t;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed, Activation hidden) {
    if (layer_sizes.size() < 2) {
        throw ConfigError("init_mlp: need at least 2 layer sizes, got " +
                          std::to_string(layer_sizes.size()));
    }
    for (int s : layer_sizes) {
        if (s < 1) throw ConfigError("init_mlp: layer size must be >= 1, got " + std::to_string(s));
    }
    if (layer_sizes.back() != 1) {
        throw ConfigError("init_mlp: final layer must have exactly 1 output, got " +
                          std::to_string(layer_sizes.back()));
    }

    MlpModel model;
    model.layer_sizes = layer_sizes;
    model.hidden_activation = hidden;

    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        MlpModel::Layer layer;
        layer.weights = make_param(fan_out, fan_in);
        layer.biases = make_param(fan_out, 1);
        for (double& w : layer.weights->values) {
            w = rng.uniform(-limit, limit);
        }
        model.layers.push_back(std::move(layer));
    }
    return model;
}

ForwardResult forward(ad::Graph& g, const MlpModel& model, const ad::TensorPtr& x) {
    if (x->rows != model.input_dim() || x->cols != 1) {
        throw DimensionError("forward: input (" + std::to_string(x->rows) + "x" +
                             std::to_string(x->cols) + ") does not match first layer size " +
                             std::to_string(model.input_dim()));
    }
    ad::TensorPtr h = x;
    ad::TensorPtr features;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        h = g.affine(model.layers[l].weights, model.layers[l].biases, h);
        if (l + 1 < model.layers.size()) {
            h = model.hidden_activation == Activation::Tanh ? g.tanh(h) : g.relu(h);
            features = h;
        }
    }
    return ForwardResult{h, features};
}

ForwardResult forward_point(ad::Graph& g, const MlpModel& model,
                            std::span<const double> x, bool x_requires_grad) {
    return forward(g, model, g.vec(x, x_requires_grad));
}

double raw_logit(const MlpModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.input_dim()) {
        throw DimensionError("raw_logit: input length " + std::to_string(x.size()) +
                             " does not match first layer size " +
                             std::to_string(model.input_dim()));
    }
    std::vector<double> h(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const ad::Tensor& W = *model.layers[l].weights;
        const ad::Tensor& b = *model.layers[l].biases;
        next.assign(W.rows, 0.0);
        for (int i = 0; i < W.rows; ++i) {
            double acc = b.values[i];
            const double* wrow = &W.values[static_cast<std::size_t>(i) * W.cols];
            for (int j = 0; j < W.cols; ++j) {
                acc += wrow[j] * h[j];
            }
            next[i] = acc;
        }
        if (l + 1 < model.layers.size()) {
            if (model.hidden_activation == Activation::Tanh) {
                for (double& v : next) v = std::tanh(v);
            } else {
                for (double& v : next) v = v > 0.0 ? v : 0.0;
            }
        }
        h.swap(next);
    }
    return h[0];
}

int predict(const MlpModel& model, std::span<const double> x) {
    return raw_logit(model, x) >= 0.0 ? +1 : -1;
}

std::vector<ad::TensorPtr> parameters(const MlpModel& model) {
    std::vector<ad::TensorPtr> params;
    params.reserve(model.layers.size() * 2);
    for (const auto& layer : model.layers) {
        params.push_back(layer.weights);
        params.push_back(layer.biases);
    }
    return params;
}

long parameter_count(const MlpModel& model) {
    long n = 0;
    for (const auto& layer : model.layers) {
        n += layer.weights->size() + layer.biases->size();
    }
    return n;
}

MlpModel clone(const MlpModel& model) {
    MlpModel copy;
    copy.layer_sizes = model.layer_sizes;
    copy.hidden_activation = model.hidden_activation;
    for (const auto& layer : model.layers) {
        MlpModel::Layer c;
        c.weights = std::make_shared<ad::Tensor>(*layer.weights);
        c.biases = std::make_shared<ad::Tensor>(*layer.biases);
        copy.layers.push_back(std::move(c));
    }
    return copy;
}

void save_model(const MlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("save_model: cannot open " + path);
    out << "arfl-mlp sizes";
    for (int s : model.layer_sizes) out << ' ' << s;
    out << " activation " << (model.hidden_activation == Activation::Tanh ? "tanh" : "relu")
        << '\n';
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto write_tensor = [&](const std::string& name, const ad::Tensor& t) {
            out << name << ' ' << t.rows << ' ' << t.cols;
            for (double v : t.values) out << ' ' << format_double(v);
            out << '\n';
        };
        write_tensor("layer" + std::to_string(l) + ".W", *model.layers[l].weights);
        write_tensor("layer" + std::to_string(l) + ".b", *model.layers[l].biases);
    }
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_model: cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw ParseError(path + ":1: empty checkpoint");
    std::istringstream hs(header);
    std::string magic, token;
    hs >> magic >> token;
    if (magic != "arfl-mlp" || token != "sizes") {
        throw ParseError(path + ":1: not an arfl-mlp checkpoint");
    }
    std::vector<int> sizes;
    while (hs >> token) {
        if (token == "activation") break;
        sizes.push_back(std::stoi(token));
    }
    std::string act;
    hs >> act;

    MlpModel model = init_mlp(sizes, 0, act == "relu" ? Activation::Relu : Activation::Tanh);

    int line_no = 1;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        for (int part = 0; part < 2; ++part) {
            std::string line;
            ++line_no;
            if (!std::getline(in, line)) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": truncated checkpoint");
            }
            std::istringstream ls(line);
            std::string name;
            int rows = 0, cols = 0;
            ls >> name >> rows >> cols;
            ad::Tensor& t = part == 0 ? *model.layers[l].weights : *model.layers[l].biases;
            if (rows != t.rows || cols != t.cols) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": tensor " + name +
                                 " has shape (" + std::to_string(rows) + "x" +
                                 std::to_string(cols) + "), expected (" + std::to_string(t.rows) +
                                 "x" + std::to_string(t.cols) + ")");
            }
            for (double& v : t.values) {
                std::string word;
                if (!(ls >> word)) {
                    throw ParseError(path + ":" + std::to_string(line_no) + ": tensor " + name +
                                     " is missing values");
                }
                const char* first = word.data();
                const char* last = word.data() + word.size();
                auto [ptr, ec] = std::from_chars(first, last, v);
                if (ec != std::errc() || ptr != last) {
                    throw ParseError(path + ":" + std::to_string(line_no) +
                                     ": bad numeric value '" + word + "'");
                }
            }
        }
    }
    return model;
}

}  // namespace arfl
