#pragma once

#include <cstdint>
#include <vector>

#include "bna/codec.hpp"
#include "bna/field.hpp"
#include "bna/geometry.hpp"
#include "bna/rng.hpp"

namespace bna::agent {

struct MotilityParams {
    double dt = 0.02;        // s
    double v = 5e-3;         // cm/s
    double D = 5.0;          // rad^2/s rotational diffusion
    double psi_A = 3.49e-2;  // rad, half-width of the steering scan
    int n_scan = 21;         // odd so the scan includes psi = 0

    void validate() const;  // throws std::invalid_argument
};

enum class Mode : std::uint8_t { Chemotaxis = 0, Conjugating = 1, Saturated = 2 };

const char* mode_name(Mode m);

struct BacteriumState {
    std::uint32_t id = 0;
    Vec2 position{};
    double heading = 0.0;  // rad, kept in (-pi, pi]
    Mode mode = Mode::Chemotaxis;
    // Remaining frozen motility steps; position and heading hold still until
    // this reaches zero. Tracking integral steps (not seconds) keeps the
    // freeze length exactly ceil(conjugation_time / dt) steps.
    std::int64_t conjugation_steps_left = 0;
    field::TargetConcentrations targets{};
    std::vector<codec::Plasmid> cargo;
    bool should_conjugate = true;
};

// Magnitude-fixed heading noise: +/- sqrt(2 D dt), sign equiprobable. The sign
// is drawn even when D == 0 so stream consumption per step stays constant.
double tumble_term(const MotilityParams& params, Pcg32& rng);

// Bundles the per-step logic with the precomputed steering-scan table. One
// Stepper serves any number of bacteria sharing the same motility parameters.
class Stepper {
public:
    Stepper(const MotilityParams& params, double saturation_hysteresis);

    const MotilityParams& params() const { return params_; }
    double saturation_hysteresis() const { return hysteresis_; }

    // Steering angle maximizing the summed gated concentration over the scan
    // fan at one-step lookahead. Ties resolve to the smallest |psi|, negative
    // before positive.
    double best_heading(const BacteriumState& state, const field::BeaconTriad& triad) const;

    // One motility step of dt: steer (Chemotaxis) or not (Saturated), add the
    // tumble term, advance by v*dt, then refresh the mode. Conjugating
    // bacteria only count down their freeze.
    void step(BacteriumState& state, const field::BeaconTriad& triad, Pcg32& rng) const;

    // Chemotaxis <-> Saturated transition rules. Saturation requires every raw
    // concentration at or above its target; leaving saturation requires some
    // raw reading to fall below target*(1 - hysteresis). No effect while
    // Conjugating (that mode exits only through its countdown).
    void update_mode(BacteriumState& state, const field::BeaconTriad& triad) const;

    // Swap the addressed destination in place; the mode is refreshed against
    // the new targets unless the bacterium is mid-conjugation.
    void retarget(BacteriumState& state, const field::TargetConcentrations& targets,
                  const field::BeaconTriad& triad) const;

private:
    void advance(BacteriumState& state) const;
    Mode mode_for(const BacteriumState& state, const field::BeaconTriad& triad,
                  bool currently_saturated) const;

    MotilityParams params_;
    double hysteresis_;
    double step_len_;
    double tumble_mag_;
    std::vector<double> cos_psi_;
    std::vector<double> sin_psi_;
    std::vector<double> psi_;
    std::vector<int> tie_order_;  // scan indices by (|psi|, negative first)
};

// Enters the Conjugating freeze for ceil(seconds / dt) steps. A zero-length
// freeze leaves the state untouched. Engine-only entry point: the mode is
// never entered from within step().
void begin_conjugation(BacteriumState& state, double seconds, double dt);

// Convenience one-shot wrappers (they build a Stepper internally; simulation
// loops should hold a Stepper instead).
double best_heading(const BacteriumState& state, const field::BeaconTriad& triad,
                    const MotilityParams& params);
void step(BacteriumState& state, const field::BeaconTriad& triad, const MotilityParams& params,
          Pcg32& rng, double saturation_hysteresis);
void update_mode(BacteriumState& state, const field::BeaconTriad& triad,
                 const MotilityParams& params, double saturation_hysteresis);

}  // namespace bna::agent
