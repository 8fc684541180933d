#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gestalt/popcode.hpp"

using namespace gestalt;
using namespace gestalt::popcode;

namespace {
constexpr double kPi = std::numbers::pi;

// Dense reference: r^D * N(s; c, sigma I) with diagonal covariance.
double gauss_ref(const Lattice& lat, std::span<const double> s, std::size_t a) {
    double q = 0;
    for (std::size_t k = 0; k < lat.dim; ++k) {
        const double d = s[k] - lat.center(a)[k];
        q += d * d;
    }
    const double norm = std::pow(2 * kPi * lat.sigma, -0.5 * static_cast<double>(lat.dim));
    return std::pow(lat.spacing, static_cast<double>(lat.dim)) * norm *
           std::exp(-0.5 * q / lat.sigma);
}
}  // namespace

TEST_CASE("grid lattice covers the range and pins spacing/sigma") {
    Range r{{-1.0, -2.0}, {3.0, 2.0}};
    auto lat = build_lattice(LatticeKind::posture, 16, 2, r, 0.85);
    REQUIRE(lat.count == 16);
    REQUIRE(lat.centers.size() == 32);
    CHECK(lat.sigma == doctest::Approx(0.85 * lat.spacing * lat.spacing));
    // centers stay inside the range
    for (std::size_t a = 0; a < lat.count; ++a) {
        CHECK(lat.center(a)[0] >= -1.0 - 1e-12);
        CHECK(lat.center(a)[0] <= 3.0 + 1e-12);
        CHECK(lat.center(a)[1] >= -2.0 - 1e-12);
        CHECK(lat.center(a)[1] <= 2.0 + 1e-12);
    }
    // non-square counts are rejected with guidance
    CHECK_THROWS(build_lattice(LatticeKind::posture, 15, 2, r, 0.85));
}

TEST_CASE("direction lattice sits on the unit circle / sphere") {
    auto circle = build_lattice(LatticeKind::direction, 8, 2, {}, 0.85);
    for (std::size_t a = 0; a < 8; ++a) {
        const double n = std::hypot(circle.center(a)[0], circle.center(a)[1]);
        CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
    }
    auto sphere = build_lattice(LatticeKind::direction, 32, 3, {}, 0.85);
    for (std::size_t a = 0; a < 32; ++a) {
        const double* c = sphere.center(a);
        CHECK(std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // circle spacing is the chord between adjacent even angles
    CHECK(circle.spacing == doctest::Approx(2.0 * std::sin(kPi / 8)).epsilon(1e-9));
}

TEST_CASE("magnitude lattice spaces evenly on the segment") {
    Range r{{0.0}, {3.0}};
    auto lat = build_lattice(LatticeKind::magnitude, 4, 1, r, 0.95);
    CHECK(lat.center(0)[0] == doctest::Approx(0.0));
    CHECK(lat.center(3)[0] == doctest::Approx(3.0));
    CHECK(lat.spacing == doctest::Approx(1.0));
}

TEST_CASE("activation equals the dense Gaussian formula") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 3.5);
    Range r{{-1.0, -2.0}, {3.0, 2.0}};
    auto lat = build_lattice(LatticeKind::posture, 25, 2, r, 0.85);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> s{u(rng), u(rng)};
        auto act = encode(lat, s, false);
        REQUIRE(act.size() == 25);
        for (std::size_t a = 0; a < 25; ++a)
            CHECK(act[a] == doctest::Approx(gauss_ref(lat, s, a)).epsilon(1e-12));
    }
}

TEST_CASE("normalized activation peaks at exactly 1 on a center") {
    Range r{{0.0}, {3.0}};
    auto lat = build_lattice(LatticeKind::magnitude, 4, 1, r, 0.95);
    std::vector<double> s{lat.center(2)[0]};
    auto act = encode(lat, s, true);
    CHECK(act[2] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t a = 0; a < 4; ++a) {
        CHECK(act[a] <= 1.0 + 1e-12);
        CHECK(act[a] >= 0.0);
    }
    CHECK(lat.peak() == doctest::Approx(lat.spacing / std::sqrt(2 * kPi * lat.sigma)));
}

TEST_CASE("activation decays monotonically with center distance") {
    auto lat = build_lattice(LatticeKind::direction, 8, 2, {}, 0.85);
    std::vector<double> s{1.0, 0.0};  // exactly at the first center angle 0
    auto act = encode(lat, s, true);
    // order centers by angular distance from s and check decay
    double prev = 2.0;
    for (std::size_t step = 0; step <= 4; ++step) {
        const double a = act[step];  // evenly spaced angles: index = angular distance
        CHECK(a < prev + 1e-12);
        prev = a;
    }
}

TEST_CASE("translation equivariance of the grid code") {
    // moving the stimulus by exactly one grid spacing along an axis shifts the
    // activation pattern by one column
    Range r{{0.0, 0.0}, {3.0, 3.0}};
    auto lat = build_lattice(LatticeKind::posture, 16, 2, r, 0.85);
    std::vector<double> s{0.4, 1.3};
    std::vector<double> shifted{0.4 + lat.spacing, 1.3};
    auto a = encode(lat, s, false);
    auto b = encode(lat, shifted, false);
    // activation at a center equals the original activation at the center one
    // spacing to the left, independent of the center ordering
    std::size_t matched = 0;
    for (std::size_t q = 0; q < 16; ++q) {
        for (std::size_t p = 0; p < 16; ++p) {
            if (std::abs(lat.center(q)[0] - lat.center(p)[0] - lat.spacing) < 1e-9 &&
                std::abs(lat.center(q)[1] - lat.center(p)[1]) < 1e-9) {
                CHECK(b[q] == doctest::Approx(a[p]).epsilon(1e-9));
                ++matched;
            }
        }
    }
    CHECK(matched == 12);  // 3 of 4 columns have a left neighbor
}

TEST_CASE("encode_node matches encode and its gradient matches finite differences") {
    Range r{{-1.0, -1.0}, {1.0, 1.0}};
    auto lat = build_lattice(LatticeKind::posture, 9, 2, r, 0.85);
    std::vector<double> s{0.3, -0.45};
    ad::Graph g;
    auto sv = g.variable(s, {2});
    auto node = encode_node(g, lat, sv, true);
    auto plain = encode(lat, s, true);
    REQUIRE(node->size() == plain.size());
    for (std::size_t a = 0; a < plain.size(); ++a)
        CHECK(node->value[a] == doctest::Approx(plain[a]).epsilon(1e-12));
    std::vector<double> w(plain.size());
    for (std::size_t a = 0; a < w.size(); ++a) w[a] = 0.1 * (a + 1);
    g.backward(g.dot(node, g.constant(w, {w.size()})));
    auto f = [&](const std::vector<double>& sx) {
        auto act = encode(lat, sx, true);
        double acc = 0;
        for (std::size_t a = 0; a < act.size(); ++a) acc += act[a] * w[a];
        return acc;
    };
    for (std::size_t k = 0; k < 2; ++k) {
        auto sp = s, sm = s;
        sp[k] += 1e-6;
        sm[k] -= 1e-6;
        const double fd = (f(sp) - f(sm)) / 2e-6;
        CHECK(sv->grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("encode_frame concatenates per feature and zero-fills absent directions") {
    Range pr{{-2.0, -2.0}, {2.0, 2.0}};
    auto lp = build_lattice(LatticeKind::posture, 16, 2, pr, 0.85);
    auto ld = build_lattice(LatticeKind::direction, 8, 2, {}, 0.85);
    auto lm = build_lattice(LatticeKind::magnitude, 4, 1, {{0.0}, {2.0}}, 0.95);
    perspective::SubmodalFrame fr;
    fr.features.resize(2);
    fr.features[0].position = {0.5, -0.5};
    fr.features[0].direction = std::vector<double>{0.0, 1.0};
    fr.features[0].magnitude = 0.7;
    fr.features[1].position = {-1.0, 1.0};
    fr.features[1].magnitude = 0.0;  // absent direction
    auto enc = encode_frame(lp, ld, lm, fr, true);
    REQUIRE(enc.posture.size() == 32);
    REQUIRE(enc.direction.size() == 16);
    REQUIRE(enc.magnitude.size() == 8);
    auto p0 = encode(lp, fr.features[0].position, true);
    for (std::size_t a = 0; a < 16; ++a) CHECK(enc.posture[a] == doctest::Approx(p0[a]));
    for (std::size_t a = 8; a < 16; ++a) CHECK(enc.direction[a] == 0.0);  // feature 1 block
}

TEST_CASE("lattice json round trip preserves every field") {
    Range r{{-1.0, 0.0}, {2.0, 4.0}};
    auto lat = build_lattice(LatticeKind::posture, 16, 2, r, 0.9);
    auto back = lattice_from_json(to_json(lat));
    CHECK(back.kind == lat.kind);
    CHECK(back.dim == lat.dim);
    CHECK(back.count == lat.count);
    CHECK(back.spacing == lat.spacing);
    CHECK(back.zeta == lat.zeta);
    CHECK(back.sigma == lat.sigma);
    REQUIRE(back.centers.size() == lat.centers.size());
    for (std::size_t k = 0; k < lat.centers.size(); ++k) CHECK(back.centers[k] == lat.centers[k]);
}
