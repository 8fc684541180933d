#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gestalt/perspective.hpp"

using namespace gestalt;
using namespace gestalt::perspective;

namespace {
constexpr double kPi = std::numbers::pi;

double det3(const Mat3& m) {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}
}  // namespace

TEST_CASE("rotation convention: single-axis matrices") {
    SUBCASE("Rz rotates x toward y (counterclockwise)") {
        auto r = rotation_from_euler(0, 0, kPi / 2);
        auto v = perspective::apply(r, std::array<double, 3>{1, 0, 0});
        CHECK(v[0] == doctest::Approx(0).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(1));
        CHECK(v[2] == doctest::Approx(0));
    }
    SUBCASE("Rx rotates y toward z") {
        auto r = rotation_from_euler(kPi / 2, 0, 0);
        auto v = perspective::apply(r, std::array<double, 3>{0, 1, 0});
        CHECK(v[1] == doctest::Approx(0).epsilon(1e-12));
        CHECK(v[2] == doctest::Approx(1));
    }
    SUBCASE("Ry rotates z toward x") {
        auto r = rotation_from_euler(0, kPi / 2, 0);
        auto v = perspective::apply(r, std::array<double, 3>{0, 0, 1});
        CHECK(v[0] == doctest::Approx(1));
        CHECK(v[2] == doctest::Approx(0).epsilon(1e-12));
    }
}

TEST_CASE("composition order is Rx * Ry * Rz") {
    const double ax = 0.3, ay = -0.7, az = 1.1;
    auto rx = rotation_from_euler(ax, 0, 0);
    auto ry = rotation_from_euler(0, ay, 0);
    auto rz = rotation_from_euler(0, 0, az);
    auto r = rotation_from_euler(ax, ay, az);
    // multiply rx*ry*rz by hand
    auto mm = [](const Mat3& a, const Mat3& b) {
        Mat3 c{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
        return c;
    };
    auto ref = mm(rx, mm(ry, rz));
    for (int k = 0; k < 9; ++k) CHECK(r[k] == doctest::Approx(ref[k]).epsilon(1e-12));
}

TEST_CASE("rotations are orthonormal with determinant +1") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 50; ++trial) {
        auto r = rotation_from_euler(u(rng), u(rng), u(rng));
        auto rt = transpose(r);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double acc = 0;
                for (int k = 0; k < 3; ++k) acc += r[3 * i + k] * rt[3 * k + j];
                CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
            }
        CHECK(det3(r) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("extract_submodal: identity pose passes positions through") {
    std::vector<double> frame{1.0, 2.0, 3.0, -1.0, 0.5, 0.0};
    std::vector<double> vel{0.3, 0.0, -0.4, 0.0, 0.0, 0.0};
    Pose pose;  // identity
    auto sm = extract_submodal(frame, vel, 2, pose);
    REQUIRE(sm.features.size() == 2);
    CHECK(sm.features[0].position[0] == doctest::Approx(1.0));
    CHECK(sm.features[0].position[2] == doctest::Approx(3.0));
    CHECK(sm.features[0].magnitude == doctest::Approx(0.5));
    REQUIRE(sm.features[0].direction.has_value());
    CHECK((*sm.features[0].direction)[0] == doctest::Approx(0.6));
    CHECK((*sm.features[0].direction)[2] == doctest::Approx(-0.8));
    // zero velocity: direction absent, magnitude zero
    CHECK(sm.features[1].magnitude == doctest::Approx(0.0));
    CHECK_FALSE(sm.features[1].direction.has_value());
}

TEST_CASE("magnitude is invariant to pose; direction to translation") {
    std::vector<double> frame{0.5, -1.0, 2.0};
    std::vector<double> vel{0.1, 0.2, -0.2};
    Pose a;
    Pose b;
    b.angles = {0.4, -0.9, 1.7};
    b.translation = {10.0, -3.0, 2.0};
    auto sa = extract_submodal(frame, vel, 1, a);
    auto sb = extract_submodal(frame, vel, 1, b);
    CHECK(sa.features[0].magnitude == doctest::Approx(sb.features[0].magnitude).epsilon(1e-12));
    // direction rotates but keeps unit norm
    double n = 0;
    for (double v : *sb.features[0].direction) n += v * v;
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
    // translation-only pose leaves direction untouched
    Pose c;
    c.translation = {5.0, 5.0, 5.0};
    auto sc = extract_submodal(frame, vel, 1, c);
    for (int k = 0; k < 3; ++k)
        CHECK((*sc.features[0].direction)[k] ==
              doctest::Approx((*sa.features[0].direction)[k]).epsilon(1e-12));
    CHECK(sc.features[0].position[0] == doctest::Approx(0.5 + 5.0));
}

TEST_CASE("rotation_node gradients match finite differences (3D)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> a{u(rng), u(rng), u(rng)};
        std::vector<double> w(9);
        for (auto& v : w) v = u(rng);
        auto f = [&w](const std::vector<double>& av) {
            ad::Graph g;
            auto ang = g.variable(av, {3});
            auto r = rotation_node(g, ang, 3);
            return g.forward(g.dot(r, g.constant(w, {3, 3})))[0];
        };
        ad::Graph g;
        auto ang = g.variable(a, {3});
        auto r = rotation_node(g, ang, 3);
        g.backward(g.dot(r, g.constant(w, {3, 3})));
        for (std::size_t k = 0; k < 3; ++k) {
            auto ap = a, am = a;
            ap[k] += 1e-6;
            am[k] -= 1e-6;
            const double fd = (f(ap) - f(am)) / 2e-6;
            CHECK(ang->grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("rotation_node 2D uses a single in-plane angle") {
    ad::Graph g;
    auto ang = g.variable({kPi / 2}, {1});
    auto r = rotation_node(g, ang, 2);
    REQUIRE(r->size() == 4);
    CHECK(r->value[0] == doctest::Approx(0).epsilon(1e-12));
    CHECK(r->value[1] == doctest::Approx(-1));
    CHECK(r->value[2] == doctest::Approx(1));
    CHECK(r->value[3] == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("submodal_nodes: translation gradient is exactly zero off the position path") {
    // L built from directions and magnitudes only must produce a zero
    // translation gradient, structurally (not merely small).
    ad::Graph g;
    std::vector<double> frame{0.4, -0.2, 1.0, 0.3, 0.8, -0.5};
    std::vector<double> vel{0.1, -0.3, 0.2, 0.05, 0.0, 0.02};
    auto ang = g.variable({0.2, -0.4, 0.9}, {3}, "angles");
    auto trans = g.variable({1.0, 2.0, 3.0}, {3}, "translation");
    auto rot = rotation_node(g, ang, 3);
    auto sm = submodal_nodes(g, frame, vel, 2, 3, rot, trans);
    std::vector<ad::NodePtr> parts;
    for (auto& d : sm.directions)
        if (d) parts.push_back(d);
    for (auto& m : sm.magnitudes) parts.push_back(m);
    g.backward(g.sum(g.square(g.concat(parts))));
    for (int k = 0; k < 3; ++k) CHECK(trans->grad[k] == 0.0);
}

TEST_CASE("submodal_nodes: magnitude carries no rotation gradient") {
    ad::Graph g;
    std::vector<double> frame{0.4, -0.2, 1.0};
    std::vector<double> vel{0.1, -0.3, 0.2};
    auto ang = g.variable({0.2, -0.4, 0.9}, {3});
    auto trans = g.variable({0.0, 0.0, 0.0}, {3});
    auto rot = rotation_node(g, ang, 3);
    auto sm = submodal_nodes(g, frame, vel, 1, 3, rot, trans);
    g.backward(g.sum(g.square(sm.magnitudes[0])));
    for (int k = 0; k < 3; ++k) {
        CHECK(ang->grad[k] == 0.0);
        CHECK(trans->grad[k] == 0.0);
    }
    CHECK(sm.magnitudes[0]->value[0] ==
          doctest::Approx(std::sqrt(0.01 + 0.09 + 0.04)).epsilon(1e-12));
}

TEST_CASE("submodal position path: full finite-difference gradient check") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> frame(6), vel(6);
    for (auto& v : frame) v = u(rng);
    for (auto& v : vel) v = u(rng);
    auto f = [&](const std::vector<double>& p) {
        ad::Graph g;
        auto ang = g.variable({p[0], p[1], p[2]}, {3});
        auto trans = g.variable({p[3], p[4], p[5]}, {3});
        auto rot = rotation_node(g, ang, 3);
        auto sm = submodal_nodes(g, frame, vel, 2, 3, rot, trans);
        std::vector<ad::NodePtr> parts(sm.positions.begin(), sm.positions.end());
        for (auto& d : sm.directions)
            if (d) parts.push_back(d);
        return g.forward(g.sum(g.square(g.concat(parts))))[0];
    };
    std::vector<double> p{0.3, -0.5, 0.8, 1.0, -2.0, 0.25};
    ad::Graph g;
    auto ang = g.variable({p[0], p[1], p[2]}, {3});
    auto trans = g.variable({p[3], p[4], p[5]}, {3});
    auto rot = rotation_node(g, ang, 3);
    auto sm = submodal_nodes(g, frame, vel, 2, 3, rot, trans);
    std::vector<ad::NodePtr> parts(sm.positions.begin(), sm.positions.end());
    for (auto& d : sm.directions)
        if (d) parts.push_back(d);
    g.backward(g.sum(g.square(g.concat(parts))));
    std::vector<double> grad;
    grad.insert(grad.end(), ang->grad.begin(), ang->grad.end());
    grad.insert(grad.end(), trans->grad.begin(), trans->grad.end());
    for (std::size_t k = 0; k < 6; ++k) {
        auto pp = p, pm = p;
        pp[k] += 1e-6;
        pm[k] -= 1e-6;
        const double fd = (f(pp) - f(pm)) / 2e-6;
        CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("adapt_pose applies momentum per group and rejects non-finite input") {
    Pose pose;
    std::vector<double> ga{0.1, 0.2, 0.3};
    std::vector<double> gt{-1.0, 0.5, 0.0};
    adapt_pose(pose, ga, gt, 0.01, 0.9, 0.08, 0.9);
    CHECK(pose.angles[0] == doctest::Approx(-0.001));
    CHECK(pose.translation[0] == doctest::Approx(0.08));
    auto saved = pose;
    std::vector<double> bad{std::nan(""), 0, 0};
    CHECK_THROWS(adapt_pose(pose, bad, gt, 0.01, 0.9, 0.08, 0.9));
    CHECK(pose.angles == saved.angles);
    CHECK(pose.translation == saved.translation);
}
