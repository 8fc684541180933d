#include "gestalt/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gestalt/perspective.hpp"

namespace gestalt::data {

using json = nlohmann::json;

void FeatureSequence::validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("FeatureSequence: dim must be 2 or 3");
    if (dt <= 0.0) throw std::invalid_argument("FeatureSequence: dt must be positive");
    if (frames.size() < 2) throw std::invalid_argument("FeatureSequence: need at least 2 frames");
    for (const auto& f : frames)
        if (f.size() != num_features * dim)
            throw std::invalid_argument("FeatureSequence: ragged frame");
    if (!labels.empty() && labels.size() != num_features)
        throw std::invalid_argument("FeatureSequence: label count mismatch");
}

namespace {

struct PendState {
    double th1, w1, th2, w2;
};

PendState derivs(const PendulumParams& p, const PendState& s) {
    const double delta = s.th2 - s.th1;
    const double sd = std::sin(delta), cd = std::cos(delta);
    const double den1 = (p.m1 + p.m2) * p.l1 - p.m2 * p.l1 * cd * cd;
    const double dw1 = (p.m2 * p.l1 * s.w1 * s.w1 * sd * cd
                        + p.m2 * p.gravity * std::sin(s.th2) * cd
                        + p.m2 * p.l2 * s.w2 * s.w2 * sd
                        - (p.m1 + p.m2) * p.gravity * std::sin(s.th1)) / den1;
    const double den2 = (p.l2 / p.l1) * den1;
    const double dw2 = (-p.m2 * p.l2 * s.w2 * s.w2 * sd * cd
                        + (p.m1 + p.m2) * p.gravity * std::sin(s.th1) * cd
                        - (p.m1 + p.m2) * p.l1 * s.w1 * s.w1 * sd
                        - (p.m1 + p.m2) * p.gravity * std::sin(s.th2)) / den2;
    return {s.w1, dw1, s.w2, dw2};
}

PendState rk4_step(const PendulumParams& p, const PendState& s, double dt) {
    auto axpy = [](const PendState& a, const PendState& b, double h) {
        return PendState{a.th1 + h * b.th1, a.w1 + h * b.w1, a.th2 + h * b.th2, a.w2 + h * b.w2};
    };
    const PendState k1 = derivs(p, s);
    const PendState k2 = derivs(p, axpy(s, k1, dt / 2));
    const PendState k3 = derivs(p, axpy(s, k2, dt / 2));
    const PendState k4 = derivs(p, axpy(s, k3, dt));
    return PendState{
        s.th1 + dt / 6 * (k1.th1 + 2 * k2.th1 + 2 * k3.th1 + k4.th1),
        s.w1 + dt / 6 * (k1.w1 + 2 * k2.w1 + 2 * k3.w1 + k4.w1),
        s.th2 + dt / 6 * (k1.th2 + 2 * k2.th2 + 2 * k3.th2 + k4.th2),
        s.w2 + dt / 6 * (k1.w2 + 2 * k2.w2 + 2 * k3.w2 + k4.w2),
    };
}

void check_pendulum(const PendulumParams& p) {
    if (p.l1 <= 0 || p.l2 <= 0 || p.m1 <= 0 || p.m2 <= 0 || p.dt <= 0 || p.steps < 2)
        throw std::invalid_argument("simulate_pendulum: invalid parameters");
}

}  // namespace

std::vector<std::array<double, 4>> simulate_pendulum_states(const PendulumParams& p) {
    check_pendulum(p);
    std::vector<std::array<double, 4>> out;
    out.reserve(p.steps);
    PendState s{p.theta1, p.omega1, p.theta2, p.omega2};
    for (std::size_t t = 0; t < p.steps; ++t) {
        out.push_back({s.th1, s.w1, s.th2, s.w2});
        s = rk4_step(p, s, p.dt);
    }
    return out;
}

FeatureSequence simulate_pendulum(const PendulumParams& p) {
    const auto states = simulate_pendulum_states(p);
    FeatureSequence seq;
    seq.num_features = 2;
    seq.dim = 2;
    seq.dt = p.dt;
    seq.labels = {"joint1", "joint2"};
    seq.frames.reserve(states.size());
    for (const auto& s : states) {
        const double x1 = p.l1 * std::sin(s[0]);
        const double y1 = -p.l1 * std::cos(s[0]);
        seq.frames.push_back({x1, y1, x1 + p.l2 * std::sin(s[2]), y1 - p.l2 * std::cos(s[2])});
    }
    return seq;
}

double pendulum_energy(const PendulumParams& p, double th1, double w1, double th2, double w2) {
    const double kin = 0.5 * (p.m1 + p.m2) * p.l1 * p.l1 * w1 * w1
                     + 0.5 * p.m2 * p.l2 * p.l2 * w2 * w2
                     + p.m2 * p.l1 * p.l2 * w1 * w2 * std::cos(th1 - th2);
    const double pot = -(p.m1 + p.m2) * p.gravity * p.l1 * std::cos(th1)
                     - p.m2 * p.gravity * p.l2 * std::cos(th2);
    return kin + pot;
}

FeatureSequence generate_walker(const WalkerParams& p) {
    if (p.period <= 0 || p.frames < 2 || p.dt <= 0)
        throw std::invalid_argument("generate_walker: invalid parameters");
    double leg_swing = p.leg_swing, knee_flex = p.knee_flex, arm_swing = p.arm_swing;
    if (p.seed != 0) {
        std::mt19937_64 rng(p.seed);
        std::uniform_real_distribution<double> jitter(0.95, 1.05);
        leg_swing *= jitter(rng);
        knee_flex *= jitter(rng);
        arm_swing *= jitter(rng);
    }
    const double s = p.scale;
    const double hip_w = 0.12 * s, thigh = 0.45 * s, shank = 0.45 * s;
    const double chest_up = 0.45 * s, head_up = 0.25 * s, shoulder_w = 0.20 * s;
    const double upper_arm = 0.28 * s, forearm = 0.25 * s;

    FeatureSequence seq;
    seq.num_features = 15;
    seq.dim = 3;
    seq.dt = p.dt;
    seq.labels = {"pelvis", "chest", "head",
                  "l_hip", "l_knee", "l_ankle", "r_hip", "r_knee", "r_ankle",
                  "l_shoulder", "l_elbow", "l_wrist", "r_shoulder", "r_elbow", "r_wrist"};
    seq.frames.reserve(p.frames);

    auto leg = [&](double px, double py, double pz, double phase, std::vector<double>& f) {
        const double hp = leg_swing * std::sin(phase);
        const double kf = knee_flex * 0.5 * (1.0 - std::cos(phase));
        const double kx = px + thigh * std::sin(hp), kz = pz - thigh * std::cos(hp);
        const double la = hp - kf;  // shank pitch, knee bends backward
        f.insert(f.end(), {px, py, pz});
        f.insert(f.end(), {kx, py, kz});
        f.insert(f.end(), {kx + shank * std::sin(la), py, kz - shank * std::cos(la)});
    };
    auto arm = [&](double px, double py, double pz, double phase, std::vector<double>& f) {
        const double ap = arm_swing * std::sin(phase);
        const double ex = px + upper_arm * std::sin(ap), ez = pz - upper_arm * std::cos(ap);
        const double wa = ap + 0.4;  // constant elbow flexion, forward
        f.insert(f.end(), {px, py, pz});
        f.insert(f.end(), {ex, py, ez});
        f.insert(f.end(), {ex + forearm * std::sin(wa), py, ez - forearm * std::cos(wa)});
    };

    for (std::size_t t = 0; t < p.frames; ++t) {
        const double phi = 2.0 * M_PI * static_cast<double>(t) / p.period;
        const double pelvis_z = (p.hip_height + p.bob * std::cos(2.0 * phi)) * s;
        const double sway = 0.01 * s * std::sin(phi);
        std::vector<double> f;
        f.reserve(45);
        f.insert(f.end(), {0.0, sway, pelvis_z});                       // pelvis
        f.insert(f.end(), {0.0, sway, pelvis_z + chest_up});            // chest
        f.insert(f.end(), {0.0, sway, pelvis_z + chest_up + head_up});  // head
        leg(0.0, sway + hip_w, pelvis_z, phi, f);                       // left leg
        leg(0.0, sway - hip_w, pelvis_z, phi + M_PI, f);                // right leg
        arm(0.0, sway + shoulder_w, pelvis_z + chest_up, phi + M_PI, f);  // left arm counter-swings
        arm(0.0, sway - shoulder_w, pelvis_z + chest_up, phi, f);         // right arm
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

std::vector<std::vector<double>> velocities(const FeatureSequence& seq) {
    if (seq.num_frames() < 2)
        throw std::invalid_argument("velocities: need at least 2 frames");
    std::vector<std::vector<double>> out;
    out.reserve(seq.num_frames() - 1);
    for (std::size_t t = 1; t < seq.num_frames(); ++t) {
        std::vector<double> v(seq.frames[t].size());
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] = seq.frames[t][k] - seq.frames[t - 1][k];
        out.push_back(std::move(v));
    }
    return out;
}

FeatureSequence apply_disturbance(const FeatureSequence& seq, const DisturbanceSpec& spec) {
    const double deg = M_PI / 180.0;
    FeatureSequence out = seq;
    if (seq.dim == 3) {
        const auto r = perspective::rotation_from_euler(
            spec.rotation_deg[0] * deg, spec.rotation_deg[1] * deg, spec.rotation_deg[2] * deg);
        for (auto& frame : out.frames) {
            for (std::size_t i = 0; i < seq.num_features; ++i) {
                const auto y = perspective::apply(r, std::span(frame).subspan(i * 3, 3));
                for (std::size_t k = 0; k < 3; ++k)
                    frame[i * 3 + k] = y[k] + spec.translation[k];
            }
        }
    } else {
        const double a = spec.rotation_deg[2] * deg;
        const double c = std::cos(a), sn = std::sin(a);
        for (auto& frame : out.frames) {
            for (std::size_t i = 0; i < seq.num_features; ++i) {
                const double x = frame[i * 2], y = frame[i * 2 + 1];
                frame[i * 2] = c * x - sn * y + spec.translation[0];
                frame[i * 2 + 1] = sn * x + c * y + spec.translation[1];
            }
        }
    }
    return out;
}

FeatureSequence permute_features(const FeatureSequence& seq,
                                 const std::vector<std::size_t>& permutation) {
    if (permutation.size() != seq.num_features)
        throw std::invalid_argument("permute_features: wrong permutation length");
    std::vector<bool> seen(seq.num_features, false);
    for (std::size_t i : permutation) {
        if (i >= seq.num_features || seen[i])
            throw std::invalid_argument("permute_features: not a bijection");
        seen[i] = true;
    }
    FeatureSequence out = seq;
    if (!seq.labels.empty())
        for (std::size_t i = 0; i < permutation.size(); ++i)
            out.labels[i] = seq.labels[permutation[i]];
    for (std::size_t t = 0; t < seq.num_frames(); ++t)
        for (std::size_t i = 0; i < permutation.size(); ++i)
            for (std::size_t k = 0; k < seq.dim; ++k)
                out.frames[t][i * seq.dim + k] = seq.frames[t][permutation[i] * seq.dim + k];
    return out;
}

FeatureSequence crossfade_cycle(const FeatureSequence& seq, std::size_t k) {
    seq.validate();
    if (k == 0 || 2 * k > seq.num_frames())
        throw std::invalid_argument("crossfade_cycle: k out of range");
    FeatureSequence out = seq;
    const std::size_t n = seq.num_frames();
    for (std::size_t j = 0; j < k; ++j) {
        // Blend the j-th leading frame with the matching trailing frame.
        const double w = (static_cast<double>(j) + 1.0) / (static_cast<double>(k) + 1.0);
        const auto& tail = seq.frames[n - k + j];
        auto& head = out.frames[j];
        for (std::size_t c = 0; c < head.size(); ++c)
            head[c] = w * head[c] + (1.0 - w) * tail[c];
    }
    out.frames.resize(n - k);
    return out;
}

void save_csv(const FeatureSequence& seq, const std::string& path) {
    seq.validate();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_csv: cannot open " + path);
    const char* axes[3] = {"x", "y", "z"};
    os << "t";
    for (std::size_t i = 0; i < seq.num_features; ++i) {
        const std::string label = seq.labels.empty() ? "f" + std::to_string(i) : seq.labels[i];
        for (std::size_t k = 0; k < seq.dim; ++k) os << "," << label << "_" << axes[k];
    }
    os << "\n";
    char buf[32];
    for (std::size_t t = 0; t < seq.num_frames(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(t) * seq.dt);
        os << buf;
        for (double v : seq.frames[t]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << "," << buf;
        }
        os << "\n";
    }
    json meta{{"dt", seq.dt},
              {"dim", seq.dim},
              {"num_features", seq.num_features},
              {"labels", seq.labels},
              {"units", "meters"}};
    std::ofstream ms(path + ".meta.json");
    ms << meta.dump(2) << "\n";
}

FeatureSequence load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_csv: cannot open " + path);
    FeatureSequence seq;
    // Sidecar metadata is optional; the header determines layout.
    {
        std::ifstream ms(path + ".meta.json");
        if (ms) {
            json meta = json::parse(ms);
            seq.dt = meta.value("dt", 0.0);
        }
    }
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("load_csv: empty file " + path);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 3 || header[0] != "t")
        throw std::runtime_error("load_csv: bad header in " + path);
    const std::size_t cols = header.size() - 1;
    seq.dim = header.back().ends_with("_z") ? 3 : 2;
    if (cols % seq.dim != 0)
        throw std::runtime_error("load_csv: column count not divisible by dimension in " + path);
    seq.num_features = cols / seq.dim;
    for (std::size_t i = 0; i < seq.num_features; ++i) {
        std::string name = header[1 + i * seq.dim];
        seq.labels.push_back(name.substr(0, name.rfind("_x")));
    }
    std::size_t lineno = 1;
    double t0 = 0.0, t1 = 0.0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("load_csv: non-numeric cell at line " +
                                         std::to_string(lineno) + " in " + path);
            }
            if (pos != cell.size())
                throw std::runtime_error("load_csv: non-numeric cell at line " +
                                         std::to_string(lineno) + " in " + path);
            row.push_back(v);
        }
        if (row.size() != cols + 1)
            throw std::runtime_error("load_csv: ragged row at line " + std::to_string(lineno) +
                                     " in " + path);
        if (seq.frames.empty()) t0 = row[0];
        else if (seq.frames.size() == 1) t1 = row[0];
        seq.frames.emplace_back(row.begin() + 1, row.end());
    }
    if (seq.dt <= 0.0 && seq.frames.size() >= 2) seq.dt = t1 - t0;
    seq.validate();
    return seq;
}

}  // namespace gestalt::data
