#include "bna/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bna/kernels.hpp"

namespace bna::field {

BeaconTriad::BeaconTriad(Beacon b0, Beacon b1, Beacon b2) : beacons_{b0, b1, b2} {
    const Vec2 e1 = b1.position - b0.position;
    const Vec2 e2 = b2.position - b0.position;
    if (cross(e1, e2) == 0.0) {
        throw std::invalid_argument("beacon triad must not be collinear");
    }
}

BeaconTriad BeaconTriad::equilateral(Vec2 centre, double side, double first_vertex_angle,
                                     int id_base) {
    if (!(side > 0.0)) throw std::invalid_argument("triad side must be positive");
    const double circum = side / std::sqrt(3.0);
    std::array<Beacon, 3> b;
    for (int k = 0; k < 3; ++k) {
        const double angle = first_vertex_angle + k * (2.0 * std::numbers::pi / 3.0);
        b[k] = Beacon{id_base + k,
                      {centre.x + circum * std::cos(angle), centre.y + circum * std::sin(angle)},
                      id_base + k};
    }
    return BeaconTriad(b[0], b[1], b[2]);
}

Vec2 BeaconTriad::barycentre() const {
    return {(beacons_[0].position.x + beacons_[1].position.x + beacons_[2].position.x) / 3.0,
            (beacons_[0].position.y + beacons_[1].position.y + beacons_[2].position.y) / 3.0};
}

bool BeaconTriad::contains_strict(Vec2 p) const {
    return point_strictly_inside_triangle(p, beacons_[0].position, beacons_[1].position,
                                          beacons_[2].position);
}

double BeaconTriad::circumradius() const {
    return distance(beacons_[0].position, barycentre());
}

double raw_concentration(const Beacon& beacon, Vec2 pos) {
    const double dx = pos.x - beacon.position.x;
    const double dy = pos.y - beacon.position.y;
    const double d2 = std::fma(dx, dx, dy * dy);
    return kernels::ref_exp(-d2);
}

double gated_concentration(const Beacon& beacon, Vec2 pos, double target) {
    const double raw = raw_concentration(beacon, pos);
    return raw < target ? raw : 0.0;
}

std::array<double, 3> sensed_vector(const BeaconTriad& triad, Vec2 pos,
                                    const TargetConcentrations& targets) {
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = gated_concentration(triad.beacon(i), pos, targets[i]);
    }
    return out;
}

TargetConcentrations targets_for(const BeaconTriad& triad, Vec2 destination) {
    TargetConcentrations t;
    for (std::size_t i = 0; i < 3; ++i) {
        t.c[i] = raw_concentration(triad.beacon(i), destination);
    }
    return t;
}

}  // namespace bna::field
