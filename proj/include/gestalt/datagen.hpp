#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

// Motion data: double-pendulum simulation, a synthetic cyclic 3D walker,
// CSV ingestion/export, velocity derivation, and the rigid test-time
// disturbances used by the perspective experiments.

namespace gestalt::data {

// Time-ordered frames of N feature points of dimension D (2 or 3).
struct FeatureSequence {
    std::size_t num_features = 0;
    std::size_t dim = 0;
    double dt = 0.0;  // seconds per frame
    std::vector<std::string> labels;
    // frames[t] has num_features*dim entries, feature-major.
    std::vector<std::vector<double>> frames;

    std::size_t num_frames() const { return frames.size(); }
    const double* point(std::size_t t, std::size_t i) const {
        return frames[t].data() + i * dim;
    }
    void validate() const;  // throws on inconsistent shape, dt <= 0, < 2 frames
};

struct PendulumParams {
    double l1 = 0.8, l2 = 0.6;    // meters
    double m1 = 1.25, m2 = 1.0;   // kilograms
    double gravity = 9.81;
    // Moderate release angles keep the motion quasi-periodic (near-harmonic
    // swinging) and the two bob trajectories in distinct spatial bands.
    double theta1 = 0.6, theta2 = 0.3;  // radians from vertical-down
    double omega1 = 0.0, omega2 = 0.0;
    double dt = 0.01;
    std::size_t steps = 1000;
};

struct WalkerParams {
    double period = 148.0;        // frames per gait cycle
    std::size_t frames = 1036;    // 7 cycles at the default period
    double dt = 1.0 / 120.0;
    double hip_height = 0.95;     // meters
    double leg_swing = 0.45;      // radians, hip swing amplitude
    double knee_flex = 0.7;       // radians
    double arm_swing = 0.35;      // radians
    double bob = 0.02;            // vertical pelvis bob, meters
    double scale = 1.0;           // global size multiplier
    std::uint64_t seed = 0;       // reserved for per-trial variation; 0 = canonical gait
};

// One constant rigid transform per trial: rotation (degrees, applied as
// Rx*Ry*Rz) followed by a translation.
struct DisturbanceSpec {
    std::array<double, 3> rotation_deg{0.0, 0.0, 0.0};  // 2D sequences use only [2] (in-plane)
    std::array<double, 3> translation{0.0, 0.0, 0.0};
};

// Integrates the standard double-pendulum equations of motion with RK4.
// Output frames hold the two joint endpoints (N=2, D=2).
FeatureSequence simulate_pendulum(const PendulumParams& params);

// Total mechanical energy of the pendulum state; test oracle for drift.
double pendulum_energy(const PendulumParams& params, double th1, double w1,
                       double th2, double w2);

// Internal angular state per frame (theta1, omega1, theta2, omega2);
// used by tests to cross-check finite-difference velocities.
std::vector<std::array<double, 4>> simulate_pendulum_states(const PendulumParams& params);

// Cyclic kinematic 15-feature 3D walker in a canonical egocentric frame
// (pelvis near origin, facing +x).
FeatureSequence generate_walker(const WalkerParams& params);

// V_i(t) = X_i(t) - X_i(t-1) for t >= 1; result has num_frames()-1 entries.
std::vector<std::vector<double>> velocities(const FeatureSequence& seq);

FeatureSequence apply_disturbance(const FeatureSequence& seq, const DisturbanceSpec& spec);

// Reorders feature columns (and labels); permutation[i] = source index for slot i.
FeatureSequence permute_features(const FeatureSequence& seq,
                                 const std::vector<std::size_t>& permutation);

// Splices the last k frames onto the first k with a linear crossfade so an
// almost-cyclic capture becomes exactly continuous at the wrap point.
FeatureSequence crossfade_cycle(const FeatureSequence& seq, std::size_t k = 20);

// CSV layout: header "t,<label>_x,<label>_y[,<label>_z]...", float64 text.
// A JSON sidecar (<path>.meta.json) carries dt, labels and units.
void save_csv(const FeatureSequence& seq, const std::string& path);
FeatureSequence load_csv(const std::string& path);

}  // namespace gestalt::data
