#include "arfl/autodiff.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "arfl/errors.hpp"

namespace arfl::ad {

namespace {

std::string shape_str(const Tensor& t) {
    return "(" + std::to_string(t.rows) + "x" + std::to_string(t.cols) + ")";
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a) +
                             " vs " + shape_str(b));
    }
}

double sigmoid_val(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow for large |t|
double softplus_val(double t) {
    return std::fmax(t, 0.0) + std::log1p(std::exp(-std::fabs(t)));
}

}  // namespace

TensorPtr Graph::make(int rows, int cols, bool requires_grad) {
    auto t = std::make_shared<Tensor>();
    t->rows = rows;
    t->cols = cols;
    t->values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    t->grad.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Graph::tensor(int rows, int cols, std::vector<double> values, bool requires_grad) {
    if (rows < 1 || cols < 1 || values.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionError("tensor: " + std::to_string(values.size()) +
                             " values for shape (" + std::to_string(rows) + "x" +
                             std::to_string(cols) + ")");
    }
    auto t = std::make_shared<Tensor>();
    t->rows = rows;
    t->cols = cols;
    t->values = std::move(values);
    t->grad.assign(t->values.size(), 0.0);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Graph::vec(std::span<const double> values, bool requires_grad) {
    return tensor(static_cast<int>(values.size()), 1,
                  std::vector<double>(values.begin(), values.end()), requires_grad);
}

TensorPtr Graph::scalar(double value, bool requires_grad) {
    return tensor(1, 1, {value}, requires_grad);
}

void Graph::record(OpKind kind, std::vector<TensorPtr> in, TensorPtr out,
                   double aux0, double aux1) {
    nodes_.push_back(Node{kind, std::move(in), std::move(out), aux0, aux1});
}

TensorPtr Graph::affine(const TensorPtr& W, const TensorPtr& b, const TensorPtr& x) {
    if (x->cols != 1 || b->cols != 1 || W->cols != x->rows || W->rows != b->rows) {
        throw DimensionError("affine: W" + shape_str(*W) + " b" + shape_str(*b) +
                             " x" + shape_str(*x) + " do not conform");
    }
    const int m = W->rows;
    const int n = W->cols;
    auto out = make(m, 1, W->requires_grad || b->requires_grad || x->requires_grad);
    for (int i = 0; i < m; ++i) {
        double acc = b->values[i];
        const double* wrow = &W->values[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            acc += wrow[j] * x->values[j];
        }
        out->values[i] = acc;
    }
    record(OpKind::Affine, {W, b, x}, out);
    return out;
}

TensorPtr Graph::apply(Elementwise kind, const TensorPtr& x) {
    auto out = make(x->rows, x->cols, x->requires_grad);
    const int n = x->size();
    OpKind op = OpKind::Tanh;
    switch (kind) {
        case Elementwise::Tanh:
            op = OpKind::Tanh;
            for (int i = 0; i < n; ++i) out->values[i] = std::tanh(x->values[i]);
            break;
        case Elementwise::Relu:
            op = OpKind::Relu;
            for (int i = 0; i < n; ++i) out->values[i] = x->values[i] > 0.0 ? x->values[i] : 0.0;
            break;
        case Elementwise::Sigmoid:
            op = OpKind::Sigmoid;
            for (int i = 0; i < n; ++i) out->values[i] = sigmoid_val(x->values[i]);
            break;
        case Elementwise::Abs:
            op = OpKind::Abs;
            for (int i = 0; i < n; ++i) out->values[i] = std::fabs(x->values[i]);
            break;
        case Elementwise::Softplus:
            op = OpKind::Softplus;
            for (int i = 0; i < n; ++i) out->values[i] = softplus_val(x->values[i]);
            break;
        case Elementwise::Log:
            op = OpKind::Log;
            for (int i = 0; i < n; ++i) out->values[i] = std::log(x->values[i]);
            break;
        case Elementwise::Exp:
            op = OpKind::Exp;
            for (int i = 0; i < n; ++i) out->values[i] = std::exp(x->values[i]);
            break;
    }
    record(op, {x}, out);
    return out;
}

TensorPtr Graph::add(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape("add", *a, *b);
    auto out = make(a->rows, a->cols, a->requires_grad || b->requires_grad);
    for (int i = 0; i < a->size(); ++i) out->values[i] = a->values[i] + b->values[i];
    record(OpKind::Add, {a, b}, out);
    return out;
}

TensorPtr Graph::sub(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape("sub", *a, *b);
    auto out = make(a->rows, a->cols, a->requires_grad || b->requires_grad);
    for (int i = 0; i < a->size(); ++i) out->values[i] = a->values[i] - b->values[i];
    record(OpKind::Sub, {a, b}, out);
    return out;
}

TensorPtr Graph::mul(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape("mul", *a, *b);
    auto out = make(a->rows, a->cols, a->requires_grad || b->requires_grad);
    for (int i = 0; i < a->size(); ++i) out->values[i] = a->values[i] * b->values[i];
    record(OpKind::Mul, {a, b}, out);
    return out;
}

TensorPtr Graph::scale(const TensorPtr& x, double c) {
    auto out = make(x->rows, x->cols, x->requires_grad);
    for (int i = 0; i < x->size(); ++i) out->values[i] = c * x->values[i];
    record(OpKind::Scale, {x}, out, c);
    return out;
}

TensorPtr Graph::shift(const TensorPtr& x, double c) {
    auto out = make(x->rows, x->cols, x->requires_grad);
    for (int i = 0; i < x->size(); ++i) out->values[i] = x->values[i] + c;
    record(OpKind::Shift, {x}, out, c);
    return out;
}

TensorPtr Graph::clamp(const TensorPtr& x, double lo, double hi) {
    auto out = make(x->rows, x->cols, x->requires_grad);
    for (int i = 0; i < x->size(); ++i) {
        out->values[i] = std::fmin(std::fmax(x->values[i], lo), hi);
    }
    record(OpKind::Clamp, {x}, out, lo, hi);
    return out;
}

TensorPtr Graph::sum(const TensorPtr& x) {
    auto out = make(1, 1, x->requires_grad);
    double acc = 0.0;
    for (int i = 0; i < x->size(); ++i) acc += x->values[i];
    out->values[0] = acc;
    record(OpKind::Sum, {x}, out);
    return out;
}

TensorPtr Graph::mean(const TensorPtr& x) {
    auto out = make(1, 1, x->requires_grad);
    double acc = 0.0;
    for (int i = 0; i < x->size(); ++i) acc += x->values[i];
    out->values[0] = acc / x->size();
    record(OpKind::Mean, {x}, out);
    return out;
}

void Graph::step_backward(const Node& node) {
    const Tensor& out = *node.out;
    switch (node.kind) {
        case OpKind::Affine: {
            Tensor& W = *node.in[0];
            Tensor& b = *node.in[1];
            Tensor& x = *node.in[2];
            const int m = W.rows;
            const int n = W.cols;
            for (int i = 0; i < m; ++i) {
                const double g = out.grad[i];
                if (g == 0.0) continue;
                if (W.requires_grad) {
                    double* wg = &W.grad[static_cast<std::size_t>(i) * n];
                    for (int j = 0; j < n; ++j) wg[j] += g * x.values[j];
                }
                if (b.requires_grad) b.grad[i] += g;
                if (x.requires_grad) {
                    const double* wrow = &W.values[static_cast<std::size_t>(i) * n];
                    for (int j = 0; j < n; ++j) x.grad[j] += g * wrow[j];
                }
            }
            break;
        }
        case OpKind::Tanh: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                x.grad[i] += out.grad[i] * (1.0 - out.values[i] * out.values[i]);
            }
            break;
        }
        case OpKind::Relu: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                if (x.values[i] > 0.0) x.grad[i] += out.grad[i];
            }
            break;
        }
        case OpKind::Sigmoid: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                x.grad[i] += out.grad[i] * out.values[i] * (1.0 - out.values[i]);
            }
            break;
        }
        case OpKind::Abs: {
            // subgradient 0 at exactly 0
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                const double v = x.values[i];
                if (v > 0.0) {
                    x.grad[i] += out.grad[i];
                } else if (v < 0.0) {
                    x.grad[i] -= out.grad[i];
                }
            }
            break;
        }
        case OpKind::Softplus: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                x.grad[i] += out.grad[i] * sigmoid_val(x.values[i]);
            }
            break;
        }
        case OpKind::Log: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                x.grad[i] += out.grad[i] / x.values[i];
            }
            break;
        }
        case OpKind::Exp: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                x.grad[i] += out.grad[i] * out.values[i];
            }
            break;
        }
        case OpKind::Add: {
            Tensor& a = *node.in[0];
            Tensor& b = *node.in[1];
            for (int i = 0; i < a.size(); ++i) {
                if (a.requires_grad) a.grad[i] += out.grad[i];
                if (b.requires_grad) b.grad[i] += out.grad[i];
            }
            break;
        }
        case OpKind::Sub: {
            Tensor& a = *node.in[0];
            Tensor& b = *node.in[1];
            for (int i = 0; i < a.size(); ++i) {
                if (a.requires_grad) a.grad[i] += out.grad[i];
                if (b.requires_grad) b.grad[i] -= out.grad[i];
            }
            break;
        }
        case OpKind::Mul: {
            Tensor& a = *node.in[0];
            Tensor& b = *node.in[1];
            for (int i = 0; i < a.size(); ++i) {
                if (a.requires_grad) a.grad[i] += out.grad[i] * b.values[i];
                if (b.requires_grad) b.grad[i] += out.grad[i] * a.values[i];
            }
            break;
        }
        case OpKind::Scale: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) x.grad[i] += out.grad[i] * node.aux0;
            break;
        }
        case OpKind::Shift: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) x.grad[i] += out.grad[i];
            break;
        }
        case OpKind::Clamp: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) {
                const double v = x.values[i];
                if (v >= node.aux0 && v <= node.aux1) x.grad[i] += out.grad[i];
            }
            break;
        }
        case OpKind::Sum: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            for (int i = 0; i < x.size(); ++i) x.grad[i] += out.grad[0];
            break;
        }
        case OpKind::Mean: {
            Tensor& x = *node.in[0];
            if (!x.requires_grad) break;
            const double g = out.grad[0] / x.size();
            for (int i = 0; i < x.size(); ++i) x.grad[i] += g;
            break;
        }
    }
}

void Graph::backward(const TensorPtr& root, bool accumulate) {
    if (!root->is_scalar()) {
        throw ContractViolation("backward: root must be scalar, got (" +
                                std::to_string(root->rows) + "x" +
                                std::to_string(root->cols) + ")");
    }
    if (!accumulate) {
        for (const Node& node : nodes_) {
            node.out->grad.assign(node.out->grad.size(), 0.0);
            for (const TensorPtr& in : node.in) {
                in->grad.assign(in->grad.size(), 0.0);
            }
        }
    }
    root->grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        step_backward(*it);
    }
}

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h) {
    if (h <= 0.0) {
        throw ContractViolation("finite_diff_grad: h must be positive");
    }
    std::vector<double> point(x.begin(), x.end());
    std::vector<double> grad(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double original = point[i];
        point[i] = original + h;
        const double fp = f(point);
        point[i] = original - h;
        const double fm = f(point);
        point[i] = original;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace arfl::ad
