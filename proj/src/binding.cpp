#include "gestalt/binding.hpp"

#include <cmath>
#include <stdexcept>

namespace gestalt::binding {

namespace {
double logistic(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
}  // namespace

std::vector<double> BindingState::weights() const {
    std::vector<double> w(bias.size());
    for (std::size_t k = 0; k < bias.size(); ++k) w[k] = logistic(bias[k]);
    return w;
}

BindingState init_binding(InitMode mode, std::size_t n, std::size_t m,
                          double inference_init_bias) {
    if (n == 0 || m == 0) throw std::invalid_argument("init_binding: n and m must be positive");
    BindingState s;
    s.n = n;
    s.m = m;
    if (mode == InitMode::training) {
        s.bias.assign(n * m, -1000.0);
        for (std::size_t i = 0; i < std::min(n, m); ++i) s.bias[i * m + i] = 1000.0;
        s.adaptable = false;
    } else {
        s.bias.assign(n * m, inference_init_bias);
        s.adaptable = true;
    }
    return s;
}

std::vector<double> bind(std::span<const double> weights, std::size_t n, std::size_t m,
                         const std::vector<std::vector<double>>& features) {
    if (weights.size() != n * m || features.size() != n)
        throw std::invalid_argument("bind: dimension mismatch");
    const std::size_t block = features.empty() ? 0 : features[0].size();
    for (const auto& f : features)
        if (f.size() != block) throw std::invalid_argument("bind: ragged feature blocks");
    std::vector<double> out(m * block, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double w = weights[i * m + j];
            for (std::size_t k = 0; k < block; ++k) out[j * block + k] += w * features[i][k];
        }
    return out;
}

void adapt_binding(BindingState& state, std::span<const double> bias_grads, double eta,
                   double gamma) {
    if (!state.adaptable)
        throw std::logic_error("adapt_binding: state is frozen (training mode)");
    if (bias_grads.size() != state.bias.size())
        throw std::invalid_argument("adapt_binding: gradient size mismatch");
    state.hist.apply(state.bias, bias_grads, eta, gamma);
}

double fbe(const BindingState& state, std::span<const std::size_t> target,
           bool literal_formula) {
    if (!target.empty() && target.size() != state.m)
        throw std::invalid_argument("fbe: target permutation length mismatch");
    if (target.empty() && state.n != state.m)
        throw std::invalid_argument("fbe: implicit diagonal target requires n == m");
    const auto w = state.weights();
    double total = 0.0;
    for (std::size_t j = 0; j < state.m; ++j) {
        const std::size_t tj = target.empty() ? j : target[j];
        double term = (w[tj * state.m + j] - 1.0) * (w[tj * state.m + j] - 1.0);
        if (literal_formula) {
            // Printed variant: sums squared diagonal entries w_ii over i != j.
            for (std::size_t i = 0; i < state.n; ++i)
                if (i != j) term += w[i * state.m + i] * w[i * state.m + i];
        } else {
            for (std::size_t i = 0; i < state.n; ++i)
                if (i != tj) term += w[i * state.m + j] * w[i * state.m + j];
        }
        total += std::sqrt(term);
    }
    return total;
}

ad::NodePtr weights_node(ad::Graph& g, const ad::NodePtr& bias) { return g.logistic(bias); }

ad::NodePtr bind_node(ad::Graph& g, const ad::NodePtr& weights, std::size_t n, std::size_t m,
                      const std::vector<ad::NodePtr>& features, std::size_t block_len) {
    if (weights->size() != n * m || features.size() != n)
        throw std::invalid_argument("bind_node: dimension mismatch");
    for (const auto& f : features)
        if (f && f->size() != block_len)
            throw std::invalid_argument("bind_node: feature block length mismatch");
    std::vector<double> value(m * block_len, 0.0);
    std::vector<ad::NodePtr> parents{weights};
    std::vector<std::size_t> idx;  // observed index of each non-null feature parent
    for (std::size_t i = 0; i < n; ++i) {
        if (!features[i]) continue;
        parents.push_back(features[i]);
        idx.push_back(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double w = weights->value[i * m + j];
            for (std::size_t k = 0; k < block_len; ++k)
                value[j * block_len + k] += w * features[i]->value[k];
        }
    }
    return g.custom({m * block_len}, std::move(value), std::move(parents),
                    [n, m, block_len, idx = std::move(idx)](ad::Node& node) {
        auto& pw = *node.parents[0];
        for (std::size_t p = 0; p < idx.size(); ++p) {
            auto& pf = *node.parents[p + 1];
            const std::size_t i = idx[p];
            for (std::size_t j = 0; j < m; ++j) {
                const double w = pw.value[i * m + j];
                const double* gblock = node.grad.data() + j * block_len;
                double dw = 0.0;
                for (std::size_t k = 0; k < block_len; ++k) {
                    if (pf.needs_grad) pf.grad[k] += w * gblock[k];
                    dw += pf.value[k] * gblock[k];
                }
                if (pw.needs_grad) pw.grad[i * m + j] += dw;
            }
        }
        (void)n;
    }, "bind");
}

}  // namespace gestalt::binding
