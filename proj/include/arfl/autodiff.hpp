#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace arfl::ad {

// Dense column-major-free 1-D/2-D tensor of doubles with a gradient slot.
// Vectors are (n x 1); scalars are (1 x 1). Values are fixed once the tensor
// enters a graph; only grad is mutated by backward passes.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;

    int size() const { return rows * cols; }
    bool is_scalar() const { return rows == 1 && cols == 1; }
    double scalar() const { return values[0]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

using TensorPtr = std::shared_ptr<Tensor>;

enum class OpKind {
    Affine,
    Tanh,
    Relu,
    Sigmoid,
    Abs,
    Softplus,
    Log,
    Exp,
    Add,
    Sub,
    Mul,
    Scale,   // c * x         (constant in aux0)
    Shift,   // x + c         (constant in aux0)
    Clamp,   // lo in aux0, hi in aux1
    Sum,
    Mean,
};

enum class Elementwise { Tanh, Relu, Sigmoid, Abs, Softplus, Log, Exp };

// Define-by-run reverse-mode graph. A fresh graph is built per forward pass;
// tensors created outside (parameters, inputs) may participate as leaves.
// One graph and its tensors belong to a single thread.
class Graph {
public:
    // leaf constructors
    TensorPtr tensor(int rows, int cols, std::vector<double> values, bool requires_grad = false);
    TensorPtr vec(std::span<const double> values, bool requires_grad = false);
    TensorPtr scalar(double value, bool requires_grad = false);

    // W (m x n), b (m x 1), x (n x 1) -> W*x + b  (m x 1)
    TensorPtr affine(const TensorPtr& W, const TensorPtr& b, const TensorPtr& x);

    TensorPtr apply(Elementwise kind, const TensorPtr& x);
    TensorPtr tanh(const TensorPtr& x) { return apply(Elementwise::Tanh, x); }
    TensorPtr relu(const TensorPtr& x) { return apply(Elementwise::Relu, x); }
    TensorPtr sigmoid(const TensorPtr& x) { return apply(Elementwise::Sigmoid, x); }
    TensorPtr abs(const TensorPtr& x) { return apply(Elementwise::Abs, x); }
    TensorPtr softplus(const TensorPtr& x) { return apply(Elementwise::Softplus, x); }
    TensorPtr log(const TensorPtr& x) { return apply(Elementwise::Log, x); }
    TensorPtr exp(const TensorPtr& x) { return apply(Elementwise::Exp, x); }

    // elementwise, shapes must match
    TensorPtr add(const TensorPtr& a, const TensorPtr& b);
    TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
    TensorPtr mul(const TensorPtr& a, const TensorPtr& b);

    TensorPtr scale(const TensorPtr& x, double c);
    TensorPtr shift(const TensorPtr& x, double c);
    TensorPtr neg(const TensorPtr& x) { return scale(x, -1.0); }
    TensorPtr clamp(const TensorPtr& x, double lo, double hi);

    TensorPtr sum(const TensorPtr& x);
    TensorPtr mean(const TensorPtr& x);

    // Accumulates d(root)/d(t) into t->grad for every tensor reachable from
    // the graph. Grads are zeroed first unless accumulate is set. root must
    // be scalar.
    void backward(const TensorPtr& root, bool accumulate = false);

    std::size_t node_count() const { return nodes_.size(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

private:
    struct Node {
        OpKind kind;
        std::vector<TensorPtr> in;
        TensorPtr out;
        double aux0 = 0.0;
        double aux1 = 0.0;
    };

    std::vector<Node> nodes_;

    TensorPtr make(int rows, int cols, bool requires_grad);
    void record(OpKind kind, std::vector<TensorPtr> in, TensorPtr out,
                double aux0 = 0.0, double aux1 = 0.0);
    static void step_backward(const Node& node);
};

// Central-difference gradient oracle, independent of the graph machinery:
// g_i = (f(x + h e_i) - f(x - h e_i)) / (2h).
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h = 1e-5);

}  // namespace arfl::ad
