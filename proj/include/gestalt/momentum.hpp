#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gestalt {

// Gradient descent with momentum on bias values, where the momentum term is
// the difference between the previous two values:
//   delta = -eta * grad + gamma * (x(t-1) - x(t-2))
// The history difference is defined as 0 until two updates have occurred.
struct MomentumHistory {
    std::vector<double> prev1;  // x(t-1)
    std::vector<double> prev2;  // x(t-2)
    int updates = 0;

    void apply(std::span<double> values, std::span<const double> grads,
               double eta, double gamma) {
        if (values.size() != grads.size())
            throw std::invalid_argument("MomentumHistory: size mismatch");
        for (double g : grads)
            if (!std::isfinite(g))
                throw std::runtime_error("MomentumHistory: non-finite gradient");
        if (prev1.size() != values.size()) {
            prev1.assign(values.begin(), values.end());
            prev2.assign(values.begin(), values.end());
        }
        // When updating x(t-1) -> x(t), values holds x(t-1) and prev1 x(t-2).
        std::vector<double> cur(values.begin(), values.end());
        for (std::size_t i = 0; i < values.size(); ++i) {
            double hist = (updates >= 2) ? (cur[i] - prev1[i]) : 0.0;
            values[i] += -eta * grads[i] + gamma * hist;
        }
        prev2 = prev1;
        prev1 = cur;
        ++updates;
    }
};

}  // namespace gestalt
