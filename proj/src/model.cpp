#include "msm/model.hpp"

#include <cmath>
#include <string>

namespace msm {

void validate(const MsmParams& p) {
    if (!(p.m0 >= 1.0 && p.m0 < 2.0)) throw ValidationError("m0 must satisfy 1 <= m0 < 2");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw ValidationError("sigma must be positive");
    if (p.k < 1) throw ValidationError("k must be >= 1");
    if (!(p.gamma_k > 0.0 && p.gamma_k < 1.0)) throw ValidationError("gamma_k must lie in (0, 1)");
    if (!(p.b > 1.0)) throw ValidationError("b must be > 1");
}

std::vector<double> transition_probabilities(int k, double gamma_k, double b) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (!(gamma_k > 0.0 && gamma_k < 1.0)) throw ValidationError("gamma_k must lie in (0, 1)");
    if (!(b > 1.0)) throw ValidationError("b must be > 1");
    std::vector<double> probs(static_cast<std::size_t>(k));
    const double log1m = std::log1p(-gamma_k);
    for (int i = 1; i <= k; ++i) {
        const double exponent = std::pow(b, static_cast<double>(i - k));
        probs[static_cast<std::size_t>(i - 1)] = -std::expm1(exponent * log1m);
    }
    return probs;
}

std::vector<double> transition_probabilities(const MsmParams& p) {
    validate(p);
    return transition_probabilities(p.k, p.gamma_k, p.b);
}

MsmState init_state(const MsmParams& p, std::uint64_t seed) {
    validate(p);
    MsmState s{std::vector<std::uint8_t>(static_cast<std::size_t>(p.k)), Rng(seed)};
    for (auto& bit : s.picks_m0) bit = s.rng.bernoulli(0.5) ? 1 : 0;
    return s;
}

void step(MsmState& s, const std::vector<double>& probs) {
    if (probs.size() != s.picks_m0.size()) throw ValidationError("probs length does not match state");
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (s.rng.bernoulli(probs[i])) s.picks_m0[i] = s.rng.bernoulli(0.5) ? 1 : 0;
}

double instantaneous_variance(const MsmParams& p, const MsmState& s) {
    double prod = 1.0;
    for (auto bit : s.picks_m0) prod *= bit ? p.m0 : 2.0 - p.m0;
    return p.sigma * p.sigma * prod;
}

ReturnSeries simulate(const MsmParams& p, std::size_t T, std::uint64_t seed, std::size_t burn_in) {
    ReturnSeries out;
    out.values.reserve(T);
    simulate_observed(p, T, seed, burn_in,
                      [&](std::size_t, double sigma_t, double u, const MsmState&) {
                          out.values.push_back(sigma_t * u);
                      });
    return out;
}

} // namespace msm
