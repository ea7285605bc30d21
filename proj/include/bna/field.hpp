#pragma once

#include <array>

#include "bna/geometry.hpp"

namespace bna::field {

// A chemoattractant emitter. Each beacon carries its own attractant species,
// identified by `attractant`; receptors gate each species independently.
struct Beacon {
    int id = 0;
    Vec2 position{};
    int attractant = 0;
};

// Per-attractant gate thresholds: the concentration each beacon would show at
// the addressed destination. A namespace in the addressing scheme is exactly
// such a vector.
struct TargetConcentrations {
    std::array<double, 3> c{};

    double operator[](std::size_t i) const { return c[i]; }
    bool operator==(const TargetConcentrations&) const = default;
};

class BeaconTriad {
public:
    // Throws std::invalid_argument when the positions are collinear.
    BeaconTriad(Beacon b0, Beacon b1, Beacon b2);

    // Vertices of an equilateral triangle around `centre` with the given side
    // length; vertex k sits at angle first_vertex_angle + k*120deg. Beacon ids
    // and attractant channels start at `id_base`.
    static BeaconTriad equilateral(Vec2 centre, double side, double first_vertex_angle,
                                   int id_base = 0);

    const Beacon& beacon(std::size_t i) const { return beacons_[i]; }
    Vec2 barycentre() const;
    bool contains_strict(Vec2 p) const;
    double circumradius() const;

private:
    std::array<Beacon, 3> beacons_;
};

// Unbounded-diffusion steady-state concentration, exp(-d^2) with d in cm.
double raw_concentration(const Beacon& beacon, Vec2 pos);

// Receptor-gated reading: the raw value while it stays below the target
// threshold for that beacon's attractant, zero once the receptor saturates
// (raw >= target).
double gated_concentration(const Beacon& beacon, Vec2 pos, double target);

// All three gated readings at once.
std::array<double, 3> sensed_vector(const BeaconTriad& triad, Vec2 pos,
                                    const TargetConcentrations& targets);

// The namespace of a destination: per-beacon raw concentrations there.
TargetConcentrations targets_for(const BeaconTriad& triad, Vec2 destination);

}  // namespace bna::field
