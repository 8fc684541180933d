#include "gestalt/diffcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gestalt::ad {

namespace {

const char* name_of(const Node& n) { return n.label.empty() ? "<unnamed>" : n.label.c_str(); }

void check_same_shape(const NodePtr& a, const NodePtr& b, const char* op) {
    if (a->shape != b->shape) {
        throw std::invalid_argument(std::string("ad::") + op + ": shape mismatch between '" +
                                    name_of(*a) + "' and '" + name_of(*b) + "'");
    }
}

bool any_needs_grad(const std::vector<NodePtr>& parents) {
    return std::any_of(parents.begin(), parents.end(),
                       [](const NodePtr& p) { return p->needs_grad; });
}

constexpr double kBceEps = 1e-12;

}  // namespace

std::size_t numel(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

NodePtr Graph::make(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
                    std::function<void(Node&)> pull, std::string label) {
    if (numel(shape) != value.size()) {
        throw std::invalid_argument("ad: value size does not match shape for '" + label + "'");
    }
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->grad.assign(value.size(), 0.0);
    n->value = std::move(value);
    n->parents = std::move(parents);
    n->pull = std::move(pull);
    n->needs_grad = any_needs_grad(n->parents);
    n->label = std::move(label);
    tape_.push_back(n);
    return n;
}

NodePtr Graph::variable(std::vector<double> v, Shape shape, std::string label) {
    auto n = make(std::move(shape), std::move(v), {}, nullptr, std::move(label));
    n->needs_grad = true;
    return n;
}

NodePtr Graph::constant(std::vector<double> v, Shape shape, std::string label) {
    return make(std::move(shape), std::move(v), {}, nullptr, std::move(label));
}

NodePtr Graph::scalar_const(double v) { return constant({v}, {1}); }

NodePtr Graph::custom(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
                      std::function<void(Node&)> pull, std::string label) {
    return make(std::move(shape), std::move(value), std::move(parents), std::move(pull),
                std::move(label));
}

NodePtr Graph::add(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "add");
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] + b->value[i];
    return make(a->shape, std::move(v), {a, b}, [](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (pa.needs_grad) pa.grad[i] += n.grad[i];
            if (pb.needs_grad) pb.grad[i] += n.grad[i];
        }
    }, "add");
}

NodePtr Graph::sub(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] - b->value[i];
    return make(a->shape, std::move(v), {a, b}, [](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (pa.needs_grad) pa.grad[i] += n.grad[i];
            if (pb.needs_grad) pb.grad[i] -= n.grad[i];
        }
    }, "sub");
}

NodePtr Graph::mul(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] * b->value[i];
    return make(a->shape, std::move(v), {a, b}, [](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (pa.needs_grad) pa.grad[i] += n.grad[i] * pb.value[i];
            if (pb.needs_grad) pb.grad[i] += n.grad[i] * pa.value[i];
        }
    }, "mul");
}

NodePtr Graph::scale(const NodePtr& a, double c) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] * c;
    return make(a->shape, std::move(v), {a}, [c](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i) pa.grad[i] += n.grad[i] * c;
    }, "scale");
}

NodePtr Graph::tanh_(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(a->value[i]);
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i)
            pa.grad[i] += n.grad[i] * (1.0 - n.value[i] * n.value[i]);
    }, "tanh");
}

NodePtr Graph::logistic(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = a->value[i];
        v[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                        : std::exp(x) / (1.0 + std::exp(x));
    }
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i)
            pa.grad[i] += n.grad[i] * n.value[i] * (1.0 - n.value[i]);
    }, "logistic");
}

NodePtr Graph::softplus(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = a->value[i];
        v[i] = x > 30.0 ? x : std::log1p(std::exp(x));
    }
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i) {
            double x = pa.value[i];
            double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                : std::exp(x) / (1.0 + std::exp(x));
            pa.grad[i] += n.grad[i] * s;
        }
    }, "softplus");
}

NodePtr Graph::exp_(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(a->value[i]);
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i) pa.grad[i] += n.grad[i] * n.value[i];
    }, "exp");
}

NodePtr Graph::log_(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (a->value[i] <= 0.0)
            throw std::domain_error("ad::log: non-positive input at '" + a->label + "'");
        v[i] = std::log(a->value[i]);
    }
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i) pa.grad[i] += n.grad[i] / pa.value[i];
    }, "log");
}

NodePtr Graph::sqrt_(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (a->value[i] < 0.0)
            throw std::domain_error("ad::sqrt: negative input at '" + a->label + "'");
        v[i] = std::sqrt(a->value[i]);
    }
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i)
            pa.grad[i] += n.grad[i] * 0.5 / std::max(n.value[i], 1e-300);
    }, "sqrt");
}

NodePtr Graph::square(const NodePtr& a) {
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] * a->value[i];
    return make(a->shape, std::move(v), {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (std::size_t i = 0; i < n.size(); ++i)
            pa.grad[i] += n.grad[i] * 2.0 * pa.value[i];
    }, "square");
}

NodePtr Graph::matvec(const NodePtr& m, const NodePtr& x) {
    if (m->shape.size() != 2 || x->shape.size() != 1 || m->shape[1] != x->shape[0]) {
        throw std::invalid_argument("ad::matvec: incompatible shapes between '" +
                                    std::string(name_of(*m)) + "' and '" + name_of(*x) + "'");
    }
    const std::size_t rows = m->shape[0], cols = m->shape[1];
    std::vector<double> v(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* row = m->value.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x->value[c];
        v[r] = acc;
    }
    return make({rows}, std::move(v), {m, x}, [rows, cols](Node& n) {
        auto& pm = *n.parents[0];
        auto& px = *n.parents[1];
        for (std::size_t r = 0; r < rows; ++r) {
            const double g = n.grad[r];
            const double* row = pm.value.data() + r * cols;
            double* mrow = pm.grad.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) {
                if (pm.needs_grad) mrow[c] += g * px.value[c];
                if (px.needs_grad) px.grad[c] += g * row[c];
            }
        }
    }, "matvec");
}

NodePtr Graph::affine(const NodePtr& w, const NodePtr& b, const NodePtr& x) {
    return add(matvec(w, x), b);
}

NodePtr Graph::dot(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a->size(); ++i) acc += a->value[i] * b->value[i];
    return make({1}, {acc}, {a, b}, [](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        const double g = n.grad[0];
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (pa.needs_grad) pa.grad[i] += g * pb.value[i];
            if (pb.needs_grad) pb.grad[i] += g * pa.value[i];
        }
    }, "dot");
}

NodePtr Graph::norm(const NodePtr& a) {
    double acc = 0.0;
    for (double x : a->value) acc += x * x;
    const double nv = std::sqrt(acc);
    return make({1}, {nv}, {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        if (n.value[0] < 1e-12) return;  // gradient undefined at the origin
        const double g = n.grad[0] / n.value[0];
        for (std::size_t i = 0; i < pa.size(); ++i) pa.grad[i] += g * pa.value[i];
    }, "norm");
}

NodePtr Graph::concat(std::span<const NodePtr> parts) {
    if (parts.empty()) throw std::invalid_argument("ad::concat: no parts");
    std::vector<double> v;
    std::vector<NodePtr> parents(parts.begin(), parts.end());
    for (const auto& p : parts) v.insert(v.end(), p->value.begin(), p->value.end());
    const std::size_t total = v.size();
    return make({total}, std::move(v), std::move(parents), [](Node& n) {
        std::size_t off = 0;
        for (auto& p : n.parents) {
            if (p->needs_grad)
                for (std::size_t i = 0; i < p->size(); ++i) p->grad[i] += n.grad[off + i];
            off += p->size();
        }
    }, "concat");
}

NodePtr Graph::sum(const NodePtr& a) {
    double acc = std::accumulate(a->value.begin(), a->value.end(), 0.0);
    return make({1}, {acc}, {a}, [](Node& n) {
        auto& pa = *n.parents[0];
        if (!pa.needs_grad) return;
        for (auto& g : pa.grad) g += n.grad[0];
    }, "sum");
}

NodePtr Graph::sum_squared_error(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "sum_squared_error");
    double acc = 0.0;
    for (std::size_t i = 0; i < a->size(); ++i) {
        double d = a->value[i] - b->value[i];
        acc += d * d;
    }
    return make({1}, {acc}, {a, b}, [](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        const double g = 2.0 * n.grad[0];
        for (std::size_t i = 0; i < pa.size(); ++i) {
            double d = pa.value[i] - pb.value[i];
            if (pa.needs_grad) pa.grad[i] += g * d;
            if (pb.needs_grad) pb.grad[i] -= g * d;
        }
    }, "sum_squared_error");
}

NodePtr Graph::mean_squared_error(const NodePtr& a, const NodePtr& b) {
    return scale(sum_squared_error(a, b), 1.0 / static_cast<double>(a->size()));
}

NodePtr Graph::binary_cross_entropy(const NodePtr& p, const NodePtr& t, bool mean) {
    check_same_shape(p, t, "binary_cross_entropy");
    const double w = mean ? 1.0 / static_cast<double>(p->size()) : 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < p->size(); ++i) {
        double pi = std::clamp(p->value[i], kBceEps, 1.0 - kBceEps);
        acc += -t->value[i] * std::log(pi) - (1.0 - t->value[i]) * std::log(1.0 - pi);
    }
    return make({1}, {acc * w}, {p, t}, [w](Node& n) {
        auto& pp = *n.parents[0];
        auto& pt = *n.parents[1];
        const double g = n.grad[0] * w;
        for (std::size_t i = 0; i < pp.size(); ++i) {
            double pi = std::clamp(pp.value[i], kBceEps, 1.0 - kBceEps);
            if (pp.needs_grad)
                pp.grad[i] += g * ((1.0 - pt.value[i]) / (1.0 - pi) - pt.value[i] / pi);
            if (pt.needs_grad)
                pt.grad[i] += g * (std::log(1.0 - pi) - std::log(pi));
        }
    }, "bce");
}

NodePtr Graph::kl_standard_normal(const NodePtr& mean, const NodePtr& logvar) {
    check_same_shape(mean, logvar, "kl_standard_normal");
    double acc = 0.0;
    for (std::size_t i = 0; i < mean->size(); ++i) {
        acc += -0.5 * (1.0 + logvar->value[i] - mean->value[i] * mean->value[i] -
                       std::exp(logvar->value[i]));
    }
    return make({1}, {acc}, {mean, logvar}, [](Node& n) {
        auto& pm = *n.parents[0];
        auto& pl = *n.parents[1];
        const double g = n.grad[0];
        for (std::size_t i = 0; i < pm.size(); ++i) {
            if (pm.needs_grad) pm.grad[i] += g * pm.value[i];
            if (pl.needs_grad) pl.grad[i] += g * 0.5 * (std::exp(pl.value[i]) - 1.0);
        }
    }, "kl");
}

NodePtr Graph::reparameterize(const NodePtr& mean, const NodePtr& logvar,
                              std::span<const double> noise) {
    check_same_shape(mean, logvar, "reparameterize");
    if (noise.size() != mean->size())
        throw std::invalid_argument("ad::reparameterize: noise length mismatch");
    std::vector<double> eps(noise.begin(), noise.end());
    std::vector<double> v(mean->size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = mean->value[i] + std::exp(0.5 * logvar->value[i]) * eps[i];
    return make(mean->shape, std::move(v), {mean, logvar},
                [eps = std::move(eps)](Node& n) {
        auto& pm = *n.parents[0];
        auto& pl = *n.parents[1];
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (pm.needs_grad) pm.grad[i] += n.grad[i];
            if (pl.needs_grad)
                pl.grad[i] += n.grad[i] * 0.5 * std::exp(0.5 * pl.value[i]) * eps[i];
        }
    }, "reparameterize");
}

const std::vector<double>& Graph::forward(const NodePtr& root) const {
    if (!root) throw std::invalid_argument("ad::forward: null root");
    return root->value;
}

void Graph::backward(const NodePtr& root) {
    if (!root) throw std::invalid_argument("ad::backward: null root");
    if (!root->is_scalar())
        throw std::invalid_argument("ad::backward: root '" + root->label + "' is not scalar");
    if (tape_.empty()) throw std::logic_error("ad::backward: backward before forward");
    for (auto& n : tape_) std::fill(n->grad.begin(), n->grad.end(), 0.0);
    root->grad[0] = 1.0;
    for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
        Node& n = **it;
        if (!n.needs_grad || !n.pull) continue;
        for (double g : n.grad) {
            if (!std::isfinite(g))
                throw std::runtime_error("ad::backward: non-finite gradient at node '" +
                                         std::string(name_of(n)) + "'");
        }
        n.pull(n);
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: size mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
    const auto& c = state.cfg;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

}  // namespace gestalt::ad
