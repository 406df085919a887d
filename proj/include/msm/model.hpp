#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msm/errors.hpp"
#include "msm/rng.hpp"
#include "msm/series.hpp"

namespace msm {

// Binomial multiplier cascade with k frequency levels. Level 0 is the
// slowest; level k-1 renews with probability gamma_k per step.
struct MsmParams {
    double m0 = 1.5;   // multiplier takes value m0 or 2 - m0, each w.p. 1/2
    double sigma = 1.0;
    int k = 10;
    double gamma_k = 0.5;
    double b = 2.0;
};

// Throws ValidationError unless 1 <= m0 < 2, sigma > 0, k >= 1,
// 0 < gamma_k < 1 and b > 1.
void validate(const MsmParams& p);

// Per-level renewal probabilities gamma_1..gamma_k,
// gamma_i = 1 - (1 - gamma_k)^(b^(i - k)). Increasing, last equals gamma_k.
std::vector<double> transition_probabilities(int k, double gamma_k, double b);
std::vector<double> transition_probabilities(const MsmParams& p);

// Multiplier configuration plus the generator that drives its renewals.
struct MsmState {
    std::vector<std::uint8_t> picks_m0; // per level: 1 -> m0, 0 -> 2 - m0
    Rng rng;
};

// Stationary start: every level drawn fresh with probability 1/2 each.
MsmState init_state(const MsmParams& p, std::uint64_t seed);

// One transition: level i redraws its multiplier with probability probs[i];
// a redraw picks m0 or 2 - m0 with probability 1/2 each, so it may land on
// the value already held.
void step(MsmState& s, const std::vector<double>& probs);

// sigma_t^2 = sigma^2 * prod_i M_t^(i), recomputed from the current state.
double instantaneous_variance(const MsmParams& p, const MsmState& s);

// Core generation loop. Calls f(t, sigma_t, u_t, state) for each retained
// step, t = 0..T-1. Burn-in steps advance the multipliers without drawing
// shocks. The seed fully determines the path.
template <class F>
void simulate_observed(const MsmParams& p, std::size_t T, std::uint64_t seed, std::size_t burn_in, F&& f) {
    validate(p);
    if (T < 2) throw ValidationError("simulate: T must be >= 2");
    const std::vector<double> probs = transition_probabilities(p);
    MsmState s = init_state(p, seed);
    for (std::size_t t = 0; t < burn_in; ++t) step(s, probs);
    for (std::size_t t = 0; t < T; ++t) {
        if (t > 0) step(s, probs);
        const double sigma_t = std::sqrt(instantaneous_variance(p, s));
        const double u = s.rng.normal();
        f(t, sigma_t, u, s);
    }
}

// Simulated return series r_t = sigma_t * u_t, u_t iid N(0,1).
ReturnSeries simulate(const MsmParams& p, std::size_t T, std::uint64_t seed, std::size_t burn_in = 0);

} // namespace msm
