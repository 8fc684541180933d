#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

// Reverse-mode automatic differentiation over dense float64 tensors.
// Graphs are define-by-run: values are computed eagerly when an op node is
// created, backward() replays the tape in reverse. A Graph instance is
// single-writer; distinct graphs share nothing.

namespace gestalt::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& s);

struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<std::shared_ptr<Node>> parents;
    // Distributes this node's gradient into its parents' accumulators.
    std::function<void(Node&)> pull;
    bool needs_grad = false;
    std::string label;

    std::size_t size() const { return value.size(); }
    bool is_scalar() const { return value.size() == 1; }
    double scalar() const { return value[0]; }
};

using NodePtr = std::shared_ptr<Node>;

class Graph {
public:
    // Leaves. Variables receive gradients, constants do not.
    NodePtr variable(std::vector<double> v, Shape shape, std::string label = {});
    NodePtr constant(std::vector<double> v, Shape shape, std::string label = {});
    NodePtr scalar_const(double v);

    // Elementwise arithmetic (shapes must match exactly).
    NodePtr add(const NodePtr& a, const NodePtr& b);
    NodePtr sub(const NodePtr& a, const NodePtr& b);
    NodePtr mul(const NodePtr& a, const NodePtr& b);
    NodePtr scale(const NodePtr& a, double c);

    // Elementwise nonlinearities.
    NodePtr tanh_(const NodePtr& a);
    NodePtr logistic(const NodePtr& a);
    NodePtr softplus(const NodePtr& a);
    NodePtr exp_(const NodePtr& a);
    NodePtr log_(const NodePtr& a);
    NodePtr sqrt_(const NodePtr& a);
    NodePtr square(const NodePtr& a);

    // Linear algebra.
    NodePtr matvec(const NodePtr& m, const NodePtr& x);
    NodePtr affine(const NodePtr& w, const NodePtr& b, const NodePtr& x);
    NodePtr dot(const NodePtr& a, const NodePtr& b);
    NodePtr norm(const NodePtr& a);  // Euclidean; gradient is 0 at the origin
    NodePtr concat(std::span<const NodePtr> parts);

    // Reductions and losses.
    NodePtr sum(const NodePtr& a);
    NodePtr sum_squared_error(const NodePtr& a, const NodePtr& b);
    NodePtr mean_squared_error(const NodePtr& a, const NodePtr& b);
    // Binary cross-entropy of prediction p against target t; gradients flow
    // into both sides. p is clamped to [eps, 1-eps] inside the log terms.
    NodePtr binary_cross_entropy(const NodePtr& p, const NodePtr& t, bool mean = true);
    // KL(N(mean, exp(logvar)) || N(0, I)), summed over components.
    NodePtr kl_standard_normal(const NodePtr& mean, const NodePtr& logvar);
    // mean + exp(0.5*logvar) * noise, noise treated as a constant draw.
    NodePtr reparameterize(const NodePtr& mean, const NodePtr& logvar,
                           std::span<const double> noise);

    // Escape hatch for domain modules that define their own primitives
    // (population encoding, Euler rotations, binding mix). The pull closure
    // must only touch parents listed here.
    NodePtr custom(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
                   std::function<void(Node&)> pull, std::string label = {});

    // Value at the root (computed eagerly when the node was built).
    const std::vector<double>& forward(const NodePtr& root) const;

    // Accumulates d(root)/d(leaf) into every variable's grad. Root must be
    // scalar. Throws if a non-finite gradient is produced, naming the node.
    void backward(const NodePtr& root);

    std::size_t tape_size() const { return tape_.size(); }

private:
    NodePtr make(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
                 std::function<void(Node&)> pull, std::string label);
    std::vector<NodePtr> tape_;
};

// Standard Adam with bias correction on flat parameter vectors.
struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
    std::uint64_t step = 0;
    AdamConfig cfg;

    explicit AdamState(std::size_t n, AdamConfig c = {})
        : m(n, 0.0), v(n, 0.0), cfg(c) {}
};

// In-place update. Throws on non-finite gradients without touching state.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace gestalt::ad
