#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bna/field.hpp"
#include "bna/kernels.hpp"
#include "bna/rng.hpp"

using namespace bna;
using namespace bna::field;

namespace {

// Independent trilateration: subtracting pairs of r_i^2 = -ln(c_i) equations
// cancels the quadratic terms, leaving a 2x2 linear system.
Vec2 solve_position(const BeaconTriad& triad, const TargetConcentrations& ns) {
    const Vec2 p0 = triad.beacon(0).position;
    const Vec2 p1 = triad.beacon(1).position;
    const Vec2 p2 = triad.beacon(2).position;
    const double r0 = -std::log(ns[0]);
    const double r1 = -std::log(ns[1]);
    const double r2 = -std::log(ns[2]);
    const double a11 = 2.0 * (p1.x - p0.x), a12 = 2.0 * (p1.y - p0.y);
    const double a21 = 2.0 * (p2.x - p0.x), a22 = 2.0 * (p2.y - p0.y);
    const double b1 = r0 - r1 + (p1.x * p1.x + p1.y * p1.y) - (p0.x * p0.x + p0.y * p0.y);
    const double b2 = r0 - r2 + (p2.x * p2.x + p2.y * p2.y) - (p0.x * p0.x + p0.y * p0.y);
    const double det = a11 * a22 - a12 * a21;
    return {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det};
}

BeaconTriad bench_triad() {
    return BeaconTriad::equilateral({0.0, 0.0}, 0.2425, std::numbers::pi / 6.0, 0);
}

}  // namespace

TEST_CASE("concentration is exactly one at the source") {
    const Beacon b{0, {0.123, -0.456}, 0};
    CHECK(raw_concentration(b, b.position) == 1.0);
}

TEST_CASE("concentration matches exp(-d^2) and decays monotonically") {
    const Beacon b{0, {0.0, 0.0}, 0};
    CHECK(raw_concentration(b, {1.0, 0.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(raw_concentration(b, {0.0, 0.5}) ==
          doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    double prev = 2.0;
    for (double d = 0.0; d < 3.0; d += 0.01) {
        const double c = raw_concentration(b, {d, 0.0});
        CHECK(c < prev);
        prev = c;
    }
}

TEST_CASE("gate is strict: reading at or above target reads zero") {
    const Beacon b{0, {0.0, 0.0}, 0};
    const Vec2 pos{0.2, 0.1};
    const double raw = raw_concentration(b, pos);
    CHECK(gated_concentration(b, pos, raw) == 0.0);           // equal: closed
    CHECK(gated_concentration(b, pos, raw * 0.999) == 0.0);   // above target: closed
    CHECK(gated_concentration(b, pos, raw * 1.001) == raw);   // below target: open
}

TEST_CASE("sensed vector at the destination is the all-zero fixed point") {
    const BeaconTriad triad = bench_triad();
    Pcg32 rng(8, 8);
    for (int i = 0; i < 200; ++i) {
        const Vec2 dest{(rng.uniform01() - 0.5) * 0.4, (rng.uniform01() - 0.5) * 0.4};
        const auto ns = targets_for(triad, dest);
        const auto sensed = sensed_vector(triad, dest, ns);
        CHECK(sensed[0] == 0.0);
        CHECK(sensed[1] == 0.0);
        CHECK(sensed[2] == 0.0);
    }
}

TEST_CASE("targets at the barycentre are symmetric") {
    const BeaconTriad triad = bench_triad();
    const auto ns = targets_for(triad, triad.barycentre());
    CHECK(std::abs(ns[0] - ns[1]) < 1e-15);
    CHECK(std::abs(ns[1] - ns[2]) < 1e-15);
    // Their common value is exp(-R^2) with R the circumradius.
    const double expect = std::exp(-triad.circumradius() * triad.circumradius());
    CHECK(ns[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("namespaces trilaterate back to their destination") {
    const BeaconTriad triad = bench_triad();
    Pcg32 rng(9, 9);
    for (int i = 0; i < 500; ++i) {
        const Vec2 dest{(rng.uniform01() - 0.5) * 0.8, (rng.uniform01() - 0.5) * 0.8};
        const auto ns = targets_for(triad, dest);
        const Vec2 back = solve_position(triad, ns);
        CHECK(distance(back, dest) < 1e-12);
    }
}

TEST_CASE("collinear beacons are rejected") {
    const Beacon b0{0, {0.0, 0.0}, 0};
    const Beacon b1{1, {0.1, 0.1}, 1};
    const Beacon b2{2, {0.2, 0.2}, 2};
    CHECK_THROWS_AS(BeaconTriad(b0, b1, b2), std::invalid_argument);
    const Beacon apart{2, {0.2, 0.3}, 2};
    CHECK_NOTHROW(BeaconTriad(b0, b1, apart));
}

TEST_CASE("equilateral constructor places the advertised geometry") {
    const Vec2 centre{0.05, -0.3};
    const BeaconTriad triad = BeaconTriad::equilateral(centre, 0.2425, std::numbers::pi / 6.0, 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(triad.beacon(i).id == 3 + i);
        CHECK(triad.beacon(i).attractant == 3 + i);
        CHECK(distance(triad.beacon(i).position, centre) ==
              doctest::Approx(0.2425 / std::sqrt(3.0)).epsilon(1e-12));
    }
    for (int i = 0; i < 3; ++i) {
        const double side =
            distance(triad.beacon(i).position, triad.beacon((i + 1) % 3).position);
        CHECK(side == doctest::Approx(0.2425).epsilon(1e-12));
    }
    CHECK(distance(triad.barycentre(), centre) < 1e-15);
    CHECK(triad.circumradius() == doctest::Approx(0.2425 / std::sqrt(3.0)).epsilon(1e-12));
    // First vertex angle pi/6: x offset = R cos(30deg), y offset = R sin(30deg).
    const double R = 0.2425 / std::sqrt(3.0);
    CHECK(triad.beacon(0).position.x ==
          doctest::Approx(centre.x + R * std::cos(std::numbers::pi / 6.0)).epsilon(1e-12));
    CHECK(triad.beacon(0).position.y ==
          doctest::Approx(centre.y + R * 0.5).epsilon(1e-12));
}

TEST_CASE("strict interior testing excludes the boundary") {
    const BeaconTriad triad = bench_triad();
    CHECK(triad.contains_strict(triad.barycentre()));
    CHECK(triad.contains_strict({0.01, 0.01}));
    // Vertices and edge midpoints are not strictly inside.
    for (int i = 0; i < 3; ++i) {
        CHECK_FALSE(triad.contains_strict(triad.beacon(i).position));
        const Vec2 mid = 0.5 * (triad.beacon(i).position + triad.beacon((i + 1) % 3).position);
        CHECK_FALSE(triad.contains_strict(mid));
    }
    CHECK_FALSE(triad.contains_strict({1.0, 1.0}));
    CHECK_FALSE(triad.contains_strict({0.0, -0.2}));
}

TEST_CASE("normalize_angle lands in (-pi, pi]") {
    namespace nb = std::numbers;
    CHECK(normalize_angle(nb::pi) == nb::pi);
    CHECK(normalize_angle(-nb::pi) == nb::pi);
    CHECK(normalize_angle(3.0 * nb::pi) == doctest::Approx(nb::pi));
    CHECK(normalize_angle(0.25) == doctest::Approx(0.25));
    CHECK(normalize_angle(2.0 * nb::pi + 0.25) == doctest::Approx(0.25));
    CHECK(normalize_angle(-7.0) == doctest::Approx(-7.0 + 2.0 * nb::pi));
    for (double a = -20.0; a <= 20.0; a += 0.37) {
        const double n = normalize_angle(a);
        CHECK(n > -nb::pi);
        CHECK(n <= nb::pi);
        CHECK(std::abs(std::remainder(n - a, 2.0 * nb::pi)) < 1e-12);
    }
}
