#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gestalt/diffcore.hpp"
#include "gestalt/perspective.hpp"

// Gaussian-tuned topological population coding of the three sub-modalities.
// Posture lattices live on a regular grid, direction lattices on a unit
// circle/sphere, magnitude lattices on a line segment.

namespace gestalt::popcode {

enum class LatticeKind { posture, direction, magnitude };

struct Lattice {
    LatticeKind kind = LatticeKind::posture;
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<double> centers;  // count*dim, center-major
    double spacing = 0.0;         // nearest-neighbor center distance r
    double zeta = 0.85;           // tuning factor in (0, 1]
    double sigma = 0.0;           // zeta * spacing^2

    // Peak activation (stimulus exactly at a center): r^D * (2*pi*sigma)^(-D/2).
    double peak() const;
    const double* center(std::size_t a) const { return centers.data() + a * dim; }
};

// Axis-aligned stimulus range; posture uses all dim axes, magnitude axis 0.
struct Range {
    std::vector<double> lo, hi;
};

// Grid on the range for posture (count must be g^dim), near-uniform points on
// the circle/sphere for direction (range ignored), even spacing on [lo, hi]
// for magnitude. Throws with the admissible counts when no layout exists.
Lattice build_lattice(LatticeKind kind, std::size_t count, std::size_t dim, const Range& range,
                      double zeta);

// activation_a = r^D * N(stimulus; c_a, sigma*I). With normalized=true the
// vector is divided by peak() so values lie in [0, 1].
std::vector<double> encode(const Lattice& lattice, std::span<const double> stimulus,
                           bool normalized = false);

// Differentiable version of encode(); gradient flows into the stimulus node.
ad::NodePtr encode_node(ad::Graph& g, const Lattice& lattice, const ad::NodePtr& stimulus,
                        bool normalized = false);

// Per-feature concatenated activations for one sub-modal frame, feature-major.
// Absent directions encode to the all-zeros vector.
struct EncodedFrame {
    std::vector<double> posture;    // n * posture.count
    std::vector<double> direction;  // n * direction.count
    std::vector<double> magnitude;  // n * magnitude.count
};

EncodedFrame encode_frame(const Lattice& posture, const Lattice& direction,
                          const Lattice& magnitude, const perspective::SubmodalFrame& frame,
                          bool normalized = false);

// JSON (de)serialization so experiments are exactly reproducible.
std::string to_json(const Lattice& lattice);
Lattice lattice_from_json(const std::string& text);

}  // namespace gestalt::popcode
