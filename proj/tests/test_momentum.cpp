#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gestalt/momentum.hpp"

using gestalt::MomentumHistory;

TEST_CASE("first two updates are plain gradient steps") {
    MomentumHistory h;
    std::vector<double> x{1.0, -2.0};
    h.apply(x, std::vector<double>{0.5, -1.0}, 0.1, 0.9);
    CHECK(x[0] == doctest::Approx(1.0 - 0.1 * 0.5));
    CHECK(x[1] == doctest::Approx(-2.0 + 0.1));
    h.apply(x, std::vector<double>{1.0, 0.0}, 0.1, 0.9);
    CHECK(x[0] == doctest::Approx(1.0 - 0.05 - 0.1));  // still no history term
    CHECK(x[1] == doctest::Approx(-1.9));
}

TEST_CASE("third update adds gamma times the previous value difference") {
    MomentumHistory h;
    std::vector<double> x{0.0};
    h.apply(x, std::vector<double>{1.0}, 0.1, 0.5);   // x: 0 -> -0.1
    h.apply(x, std::vector<double>{1.0}, 0.1, 0.5);   // x: -0.1 -> -0.2
    const double before = x[0];
    const double hist = -0.2 - (-0.1);                // x(t-1) - x(t-2)
    h.apply(x, std::vector<double>{2.0}, 0.1, 0.5);
    CHECK(x[0] == doctest::Approx(before - 0.1 * 2.0 + 0.5 * hist));
}

TEST_CASE("gamma zero reduces to plain gradient descent forever") {
    MomentumHistory h;
    std::vector<double> x{3.0};
    double ref = 3.0;
    for (int i = 0; i < 10; ++i) {
        const double g = 0.25 * (i + 1);
        h.apply(x, std::vector<double>{g}, 0.2, 0.0);
        ref -= 0.2 * g;
    }
    CHECK(x[0] == doctest::Approx(ref));
}

TEST_CASE("zero gradient coasts on the history difference") {
    MomentumHistory h;
    std::vector<double> x{0.0};
    h.apply(x, std::vector<double>{-1.0}, 1.0, 0.9);  // x -> 1
    h.apply(x, std::vector<double>{-1.0}, 1.0, 0.9);  // x -> 2
    h.apply(x, std::vector<double>{0.0}, 1.0, 0.9);   // coast: + 0.9*(2-1)
    CHECK(x[0] == doctest::Approx(2.9));
    h.apply(x, std::vector<double>{0.0}, 1.0, 0.9);   // + 0.9*(2.9-2)
    CHECK(x[0] == doctest::Approx(2.9 + 0.81));
}

TEST_CASE("non-finite gradient leaves values and history untouched") {
    MomentumHistory h;
    std::vector<double> x{1.0};
    h.apply(x, std::vector<double>{0.5}, 0.1, 0.9);
    const double saved = x[0];
    CHECK_THROWS(h.apply(x, std::vector<double>{std::nan("")}, 0.1, 0.9));
    CHECK(x[0] == saved);
    CHECK(h.updates == 1);
}

TEST_CASE("size mismatch is rejected") {
    MomentumHistory h;
    std::vector<double> x{1.0, 2.0};
    CHECK_THROWS(h.apply(x, std::vector<double>{0.1}, 0.1, 0.9));
}
