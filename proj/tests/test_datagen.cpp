#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gestalt/datagen.hpp"

using namespace gestalt::data;

namespace {
std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("pendulum at rest stays at the hanging equilibrium") {
    PendulumParams p;
    p.theta1 = p.theta2 = 0.0;
    p.omega1 = p.omega2 = 0.0;
    p.steps = 50;
    auto seq = simulate_pendulum(p);
    REQUIRE(seq.num_features == 2);
    REQUIRE(seq.dim == 2);
    for (const auto& f : seq.frames) {
        CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f[1] == doctest::Approx(-p.l1).epsilon(1e-12));
        CHECK(f[2] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f[3] == doctest::Approx(-(p.l1 + p.l2)).epsilon(1e-12));
    }
}

TEST_CASE("joint 1 stays on its length constraint") {
    PendulumParams p;  // l1 = 0.8, l2 = 0.6, m = 1.25 / 1.0
    auto seq = simulate_pendulum(p);
    for (const auto& f : seq.frames) {
        const double r1 = std::hypot(f[0], f[1]);
        CHECK(r1 == doctest::Approx(0.8).epsilon(1e-9));
        const double r12 = std::hypot(f[2] - f[0], f[3] - f[1]);
        CHECK(r12 == doctest::Approx(0.6).epsilon(1e-9));
    }
}

TEST_CASE("small-angle period matches the single-pendulum limit") {
    // With m2 -> 0 the upper joint decouples; a small release oscillates with
    // T = 2 pi sqrt(l1 / g).
    PendulumParams p;
    p.m2 = 1e-9;
    p.theta1 = 0.02;
    p.theta2 = 0.0;
    p.dt = 0.001;
    p.steps = 4000;
    auto states = simulate_pendulum_states(p);
    // detect sign changes of theta1 to time the half periods
    std::vector<double> crossings;
    for (std::size_t t = 1; t < states.size(); ++t) {
        const double a = states[t - 1][0], b = states[t][0];
        if (a <= 0.0 && b > 0.0) crossings.push_back(p.dt * (t - a / (b - a)));
    }
    REQUIRE(crossings.size() >= 2);
    const double period = crossings.back() - crossings.front();
    const double expected = (crossings.size() - 1) * 2.0 * std::numbers::pi * std::sqrt(0.8 / p.gravity);
    CHECK(period == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("mechanical energy drifts less than 1e-6 relative over the run") {
    PendulumParams p;
    auto states = simulate_pendulum_states(p);
    const double e0 = pendulum_energy(p, states[0][0], states[0][1], states[0][2], states[0][3]);
    for (const auto& s : states) {
        const double e = pendulum_energy(p, s[0], s[1], s[2], s[3]);
        CHECK(std::abs(e - e0) <= 1e-6 * std::max(1.0, std::abs(e0)));
    }
}

TEST_CASE("walker produces a cyclic 15-feature 3D sequence") {
    WalkerParams w;
    w.period = 100.0;
    w.frames = 200;
    auto seq = generate_walker(w);
    REQUIRE(seq.num_features == 15);
    REQUIRE(seq.dim == 3);
    REQUIRE(seq.num_frames() == 200);
    for (std::size_t k = 0; k < seq.frames[0].size(); ++k)
        CHECK(seq.frames[0][k] == doctest::Approx(seq.frames[100][k]).epsilon(1e-9));
}

TEST_CASE("walker frames are phase-shifts of one gait cycle") {
    WalkerParams w;
    w.period = 64.0;
    w.frames = 256;
    auto seq = generate_walker(w);
    for (std::size_t t = 0; t < 64; ++t)
        for (std::size_t k = 0; k < seq.frames[t].size(); ++k)
            CHECK(seq.frames[t][k] == doctest::Approx(seq.frames[t + 128][k]).epsilon(1e-9));
}

TEST_CASE("velocities are frame differences") {
    WalkerParams w;
    w.frames = 10;
    auto seq = generate_walker(w);
    auto v = velocities(seq);
    REQUIRE(v.size() == 9);
    for (std::size_t t = 1; t < seq.num_frames(); ++t)
        for (std::size_t k = 0; k < seq.frames[t].size(); ++k)
            CHECK(v[t - 1][k] ==
                  doctest::Approx(seq.frames[t][k] - seq.frames[t - 1][k]).epsilon(1e-12));
}

TEST_CASE("disturbance applies one constant rigid transform") {
    WalkerParams w;
    w.frames = 5;
    auto seq = generate_walker(w);
    DisturbanceSpec d;
    d.rotation_deg = {0.0, 0.0, 90.0};
    d.translation = {1.0, -2.0, 0.5};
    auto out = apply_disturbance(seq, d);
    // Rz(90 deg): (x, y, z) -> (-y, x, z), then translate
    for (std::size_t t = 0; t < seq.num_frames(); ++t)
        for (std::size_t i = 0; i < seq.num_features; ++i) {
            const double* a = seq.point(t, i);
            const double* b = out.point(t, i);
            CHECK(b[0] == doctest::Approx(-a[1] + 1.0).epsilon(1e-12));
            CHECK(b[1] == doctest::Approx(a[0] - 2.0).epsilon(1e-12));
            CHECK(b[2] == doctest::Approx(a[2] + 0.5).epsilon(1e-12));
        }
    // pairwise distances are preserved (rigidity)
    const double* p0 = seq.point(2, 0);
    const double* p1 = seq.point(2, 5);
    const double* q0 = out.point(2, 0);
    const double* q1 = out.point(2, 5);
    auto dist = [](const double* a, const double* b) {
        return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                         (a[2] - b[2]) * (a[2] - b[2]));
    };
    CHECK(dist(p0, p1) == doctest::Approx(dist(q0, q1)).epsilon(1e-12));
}

TEST_CASE("2D disturbance rotates in-plane about the out-of-plane axis") {
    PendulumParams p;
    p.steps = 4;
    auto seq = simulate_pendulum(p);
    DisturbanceSpec d;
    d.rotation_deg = {0.0, 0.0, 180.0};
    auto out = apply_disturbance(seq, d);
    for (std::size_t t = 0; t < seq.num_frames(); ++t)
        for (std::size_t k = 0; k < seq.frames[t].size(); ++k)
            CHECK(out.frames[t][k] == doctest::Approx(-seq.frames[t][k]).epsilon(1e-9));
}

TEST_CASE("permute_features reorders columns and labels") {
    WalkerParams w;
    w.frames = 3;
    auto seq = generate_walker(w);
    std::vector<std::size_t> perm(15);
    for (std::size_t i = 0; i < 15; ++i) perm[i] = (i + 3) % 15;
    auto out = permute_features(seq, perm);
    for (std::size_t i = 0; i < 15; ++i) {
        CHECK(out.labels[i] == seq.labels[perm[i]]);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(out.point(1, i)[k] == seq.point(1, perm[i])[k]);
    }
    std::vector<std::size_t> bad{0, 0, 2};
    CHECK_THROWS(permute_features(seq, bad));
}

TEST_CASE("crossfade produces an exactly continuous wrap") {
    WalkerParams w;
    w.period = 50.0;
    w.frames = 130;  // not a whole number of cycles -> discontinuous wrap
    auto seq = generate_walker(w);
    auto out = crossfade_cycle(seq, 10);
    // after the fade the first frame equals the (virtual) continuation of the last
    REQUIRE(out.num_frames() == seq.num_frames() - 10);
    // wrap-point jump must be no larger than the typical frame-to-frame step
    double typical = 0.0;
    for (std::size_t k = 0; k < out.frames[0].size(); ++k)
        typical += std::abs(out.frames[1][k] - out.frames[0][k]);
    double wrap = 0.0;
    for (std::size_t k = 0; k < out.frames[0].size(); ++k)
        wrap += std::abs(out.frames[0][k] - out.frames.back()[k]);
    CHECK(wrap <= 3.0 * typical + 1e-9);
}

TEST_CASE("csv round trip is bit exact and carries metadata") {
    PendulumParams p;
    p.steps = 20;
    auto seq = simulate_pendulum(p);
    const auto path = temp_path("gestalt_rt.csv");
    save_csv(seq, path);
    auto back = load_csv(path);
    REQUIRE(back.num_frames() == seq.num_frames());
    REQUIRE(back.num_features == seq.num_features);
    CHECK(back.dt == seq.dt);
    CHECK(back.labels == seq.labels);
    for (std::size_t t = 0; t < seq.num_frames(); ++t)
        for (std::size_t k = 0; k < seq.frames[t].size(); ++k)
            CHECK(back.frames[t][k] == seq.frames[t][k]);  // bit exact via %.17g
    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
}

TEST_CASE("csv loader reports malformed input with line numbers") {
    const auto path = temp_path("gestalt_bad.csv");

    SUBCASE("ragged row") {
        std::ofstream os(path);
        os << "t,a_x,a_y\n0,1.0,2.0\n1,3.0\n";
        os.close();
        try {
            load_csv(path);
            FAIL("expected throw");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("3") != std::string::npos);
        }
    }

    SUBCASE("non-numeric cell") {
        std::ofstream os(path);
        os << "t,a_x,a_y\n0,1.0,oops\n";
        os.close();
        CHECK_THROWS(load_csv(path));
    }

    SUBCASE("missing file") { CHECK_THROWS(load_csv(temp_path("nonexistent_42.csv"))); }
    std::remove(path.c_str());
}

TEST_CASE("validate rejects inconsistent sequences") {
    FeatureSequence s;
    s.num_features = 2;
    s.dim = 2;
    s.dt = 0.01;
    s.labels = {"a", "b"};
    s.frames = {{1, 2, 3, 4}, {1, 2, 3, 4}};
    CHECK_NOTHROW(s.validate());
    s.frames.push_back({1, 2, 3});
    CHECK_THROWS(s.validate());
    s.frames.pop_back();
    s.dt = 0.0;
    CHECK_THROWS(s.validate());
    s.dt = 0.01;
    s.frames.resize(1);
    CHECK_THROWS(s.validate());
}
