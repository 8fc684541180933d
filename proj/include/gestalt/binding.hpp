#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gestalt/diffcore.hpp"
#include "gestalt/momentum.hpp"

// The gated N x M assignment matrix routing observed features to bodily
// feature slots, sub-modal Gestalt vector construction, and the Feature
// Binding Error.

namespace gestalt::binding {

enum class InitMode { training, inference };

struct BindingState {
    std::size_t n = 0;  // observed features
    std::size_t m = 0;  // bodily slots
    std::vector<double> bias;  // n*m, row-major (bias[i*m + j])
    MomentumHistory hist;
    bool adaptable = false;

    // Elementwise logistic of the biases.
    std::vector<double> weights() const;
};

// Training mode: +1000 on the diagonal, -1000 off it, adaptation frozen.
// Inference mode: all biases at init_bias (default -5), adaptation enabled.
BindingState init_binding(InitMode mode, std::size_t n, std::size_t m,
                          double inference_init_bias = -5.0);

// Slot j's block = sum_i w[i][j] * features[i]; returns the M*block_len
// Gestalt vector (slot-major).
std::vector<double> bind(std::span<const double> weights, std::size_t n, std::size_t m,
                         const std::vector<std::vector<double>>& features);

// Momentum update of the biases; weights are re-derived lazily via weights().
void adapt_binding(BindingState& state, std::span<const double> bias_grads, double eta,
                   double gamma);

// FBE = sum_j sqrt((w[target_j][j] - 1)^2 + sum_{i != target_j} w[i][j]^2),
// the distance between the soft assignment and the target permutation
// (identity by default). literal_formula reproduces the printed variant that
// sums the diagonal entries w_ii instead of column j's off-target entries.
double fbe(const BindingState& state, std::span<const std::size_t> target = {},
           bool literal_formula = false);

// --- differentiable pieces -----------------------------------------------

// Logistic weight node from a bias variable node shaped {n, m}.
ad::NodePtr weights_node(ad::Graph& g, const ad::NodePtr& bias);

// Gestalt vector node: slot-major mix of the per-feature block nodes.
// Feature blocks may be nullptr (absent direction) and contribute zeros.
ad::NodePtr bind_node(ad::Graph& g, const ad::NodePtr& weights, std::size_t n, std::size_t m,
                      const std::vector<ad::NodePtr>& features, std::size_t block_len);

}  // namespace gestalt::binding
