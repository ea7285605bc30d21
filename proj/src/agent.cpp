#include "bna/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bna/kernels.hpp"

namespace bna::agent {

namespace {
constexpr int kMaxScan = 128;
}

void MotilityParams::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("motility.dt must be positive");
    if (!(v >= 0.0)) throw std::invalid_argument("motility.v must be non-negative");
    if (!(D >= 0.0)) throw std::invalid_argument("motility.D must be non-negative");
    if (!(psi_A > 0.0)) throw std::invalid_argument("motility.psi_A must be positive");
    if (n_scan < 3 || n_scan % 2 == 0) {
        throw std::invalid_argument("motility.n_scan must be odd and at least 3");
    }
    if (n_scan > kMaxScan) throw std::invalid_argument("motility.n_scan exceeds the scan limit");
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Chemotaxis: return "chemotaxis";
        case Mode::Conjugating: return "conjugating";
        case Mode::Saturated: return "saturated";
    }
    return "?";
}

double tumble_term(const MotilityParams& params, Pcg32& rng) {
    return rng.sign() * std::sqrt(2.0 * params.D * params.dt);
}

Stepper::Stepper(const MotilityParams& params, double saturation_hysteresis)
    : params_(params), hysteresis_(saturation_hysteresis) {
    params_.validate();
    if (!(hysteresis_ >= 0.0 && hysteresis_ < 1.0)) {
        throw std::invalid_argument("saturation hysteresis must lie in [0, 1)");
    }
    step_len_ = params_.v * params_.dt;
    tumble_mag_ = std::sqrt(2.0 * params_.D * params_.dt);

    const int n = params_.n_scan;
    const int mid = (n - 1) / 2;
    const double spacing = params_.psi_A / mid;
    psi_.resize(n);
    cos_psi_.resize(n);
    sin_psi_.resize(n);
    for (int j = 0; j < n; ++j) {
        // (j - mid) * spacing makes the fan exactly symmetric: psi[mid] == 0
        // and psi[mid-k] == -psi[mid+k] bit for bit, so the |psi| tie order
        // below is well defined.
        psi_[j] = (j - mid) * spacing;
        cos_psi_[j] = std::cos(psi_[j]);
        sin_psi_[j] = std::sin(psi_[j]);
    }
    tie_order_.resize(n);
    std::iota(tie_order_.begin(), tie_order_.end(), 0);
    std::sort(tie_order_.begin(), tie_order_.end(), [&](int a, int b) {
        const double aa = std::abs(psi_[a]);
        const double ab = std::abs(psi_[b]);
        if (aa != ab) return aa < ab;
        return psi_[a] < psi_[b];
    });
}

double Stepper::best_heading(const BacteriumState& state, const field::BeaconTriad& triad) const {
    const int n = params_.n_scan;
    double bx[3], by[3], tg[3];
    for (int j = 0; j < 3; ++j) {
        bx[j] = triad.beacon(j).position.x;
        by[j] = triad.beacon(j).position.y;
        tg[j] = state.targets[j];
    }

    // Lookahead points one step ahead along heading + psi_j, composed via the
    // angle-addition identities so the whole fan costs one sincos.
    const double cth = std::cos(state.heading);
    const double sth = std::sin(state.heading);
    double px[kMaxScan], py[kMaxScan], sums[kMaxScan];
    for (int j = 0; j < n; ++j) {
        const double dirx = cth * cos_psi_[j] - sth * sin_psi_[j];
        const double diry = sth * cos_psi_[j] + cth * sin_psi_[j];
        px[j] = state.position.x + step_len_ * dirx;
        py[j] = state.position.y + step_len_ * diry;
    }

    kernels::active().gated_sums(px, py, static_cast<std::size_t>(n), bx, by, tg, 3, sums);

    // The argmax runs over the tie-priority permutation with a strict
    // comparison, which resolves equal sums to the smallest |psi| (negative
    // first) and keeps the selection independent of the kernel backend.
    int best = tie_order_[0];
    double best_sum = sums[best];
    for (int k = 1; k < n; ++k) {
        const int j = tie_order_[k];
        if (sums[j] > best_sum) {
            best_sum = sums[j];
            best = j;
        }
    }
    return psi_[best];
}

void Stepper::advance(BacteriumState& state) const {
    state.position.x += step_len_ * std::cos(state.heading);
    state.position.y += step_len_ * std::sin(state.heading);
}

Mode Stepper::mode_for(const BacteriumState& state, const field::BeaconTriad& triad,
                       bool currently_saturated) const {
    double bx[3], by[3], raw[3];
    for (int j = 0; j < 3; ++j) {
        bx[j] = triad.beacon(j).position.x;
        by[j] = triad.beacon(j).position.y;
    }
    kernels::active().raw_concentrations(state.position.x, state.position.y, bx, by, 3, raw);
    if (currently_saturated) {
        // Leave saturation only on a clear drop below target: raw must fall
        // under target*(1 - h) for some attractant.
        for (int j = 0; j < 3; ++j) {
            if (raw[j] < state.targets[j] * (1.0 - hysteresis_)) return Mode::Chemotaxis;
        }
        return Mode::Saturated;
    }
    for (int j = 0; j < 3; ++j) {
        if (raw[j] < state.targets[j]) return Mode::Chemotaxis;
    }
    return Mode::Saturated;
}

void Stepper::update_mode(BacteriumState& state, const field::BeaconTriad& triad) const {
    if (state.mode == Mode::Conjugating) return;
    state.mode = mode_for(state, triad, state.mode == Mode::Saturated);
}

void Stepper::retarget(BacteriumState& state, const field::TargetConcentrations& targets,
                       const field::BeaconTriad& triad) const {
    state.targets = targets;
    if (state.mode == Mode::Conjugating) return;
    state.mode = mode_for(state, triad, false);
}

void Stepper::step(BacteriumState& state, const field::BeaconTriad& triad, Pcg32& rng) const {
    switch (state.mode) {
        case Mode::Conjugating:
            if (--state.conjugation_steps_left <= 0) {
                state.conjugation_steps_left = 0;
                state.mode = mode_for(state, triad, false);
            }
            return;
        case Mode::Chemotaxis: {
            const double psi = best_heading(state, triad);
            const double phi = tumble_term(params_, rng);
            state.heading = normalize_angle(state.heading + psi + phi);
            advance(state);
            update_mode(state, triad);
            return;
        }
        case Mode::Saturated: {
            const double phi = tumble_term(params_, rng);
            state.heading = normalize_angle(state.heading + phi);
            advance(state);
            update_mode(state, triad);
            return;
        }
    }
}

void begin_conjugation(BacteriumState& state, double seconds, double dt) {
    if (!(seconds >= 0.0)) throw std::invalid_argument("conjugation time must be non-negative");
    // ceil with a tiny guard so exact multiples of dt do not round up an
    // extra step through representation error.
    const auto steps = static_cast<std::int64_t>(std::ceil(seconds / dt - 1e-9));
    if (steps <= 0) return;
    state.mode = Mode::Conjugating;
    state.conjugation_steps_left = steps;
}

double best_heading(const BacteriumState& state, const field::BeaconTriad& triad,
                    const MotilityParams& params) {
    return Stepper(params, 0.0).best_heading(state, triad);
}

void step(BacteriumState& state, const field::BeaconTriad& triad, const MotilityParams& params,
          Pcg32& rng, double saturation_hysteresis) {
    Stepper(params, saturation_hysteresis).step(state, triad, rng);
}

void update_mode(BacteriumState& state, const field::BeaconTriad& triad,
                 const MotilityParams& params, double saturation_hysteresis) {
    Stepper(params, saturation_hysteresis).update_mode(state, triad);
}

}  // namespace bna::agent
