#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gestalt/diffcore.hpp"
#include "gestalt/momentum.hpp"

// Rigid-transform front end: Euler-angle rotation composition, extraction of
// the three sub-modalities (relative position, motion direction, motion
// magnitude), and the adaptable pose bias parameters.
//
// Convention: right-handed axes, counterclockwise-positive angles, rotation
// applied as the matrix product Rx(ax) * Ry(ay) * Rz(az). In 2D mode a single
// angle rotates about the out-of-plane axis.

namespace gestalt::perspective {

using Mat3 = std::array<double, 9>;  // row-major

struct Pose {
    std::size_t dim = 3;                          // 2 or 3
    std::array<double, 3> angles{0.0, 0.0, 0.0};  // radians; 2D uses angles[2] only
    std::array<double, 3> translation{0.0, 0.0, 0.0};
    MomentumHistory angle_hist;
    MomentumHistory translation_hist;

    std::size_t num_angles() const { return dim == 2 ? 1 : 3; }
};

// Product Rx(ax)*Ry(ay)*Rz(az); orthonormal with det +1.
Mat3 rotation_from_euler(double ax, double ay, double az);
Mat3 rotation_from_euler(const Pose& pose);
Mat3 transpose(const Mat3& r);
std::array<double, 3> apply(const Mat3& r, std::span<const double> x);

// Per feature: relative position, unit motion direction (absent when the
// motion magnitude falls below epsilon), and motion magnitude.
struct SubmodalFeature {
    std::vector<double> position;            // D entries
    std::optional<std::vector<double>> direction;  // unit D-vector
    double magnitude = 0.0;
};

struct SubmodalFrame {
    std::vector<SubmodalFeature> features;
};

inline constexpr double kVelocityEpsilon = 1e-8;

// P_i = R*X_i + b, m_i = ||V_i||, d_i = R*V_i / m_i (absent when m_i < eps).
// frame/velocity are feature-major flat arrays of n*dim entries.
SubmodalFrame extract_submodal(std::span<const double> frame, std::span<const double> velocity,
                               std::size_t n, const Pose& pose);

// Momentum updates per bias group; throws on non-finite gradients without
// touching the pose.
void adapt_pose(Pose& pose, std::span<const double> angle_grads,
                std::span<const double> translation_grads, double eta_rot, double gamma_rot,
                double eta_trans, double gamma_trans);

// --- differentiable pipeline pieces -------------------------------------
//
// The magnitude stimulus is taken as ||V_i|| (a constant w.r.t. the pose:
// rotations are isometries), so magnitude losses carry no pose gradient and
// direction/position losses carry no gradient into each other's invariant
// parameters. Translation enters only the position path.

// 3x3 rotation node from an angle-3 variable node (2D: 2x2 from angle-1).
ad::NodePtr rotation_node(ad::Graph& g, const ad::NodePtr& angles, std::size_t dim);

struct SubmodalNodes {
    std::vector<ad::NodePtr> positions;   // D-vector nodes, one per feature
    std::vector<ad::NodePtr> directions;  // D-vector nodes; nullptr when absent
    std::vector<ad::NodePtr> magnitudes;  // scalar nodes (constant w.r.t. pose)
};

SubmodalNodes submodal_nodes(ad::Graph& g, std::span<const double> frame,
                             std::span<const double> velocity, std::size_t n, std::size_t dim,
                             const ad::NodePtr& rotation, const ad::NodePtr& translation);

}  // namespace gestalt::perspective
