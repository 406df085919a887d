#pragma once

#include <cstddef>
#include <vector>

#include "msm/model.hpp"
#include "msm/series.hpp"

namespace msm {

// Moments of ln|u| for u standard normal.
struct LogAbsNormalMoments {
    static constexpr double mean = -0.6351814227307391;    // -(euler_gamma + ln 2) / 2
    static constexpr double variance = 1.2337005501361697; // pi^2 / 8
};

enum class MomentKind { analytic, empirical };

// Per lag T, in order: E[xi_{t,T}^2] and E[xi_{t,T} xi_{t-T,T}] where
// xi_{t,T} = ln|r_t| - ln|r_{t-T}|, followed by a single E[r_t^2] entry.
struct MomentVector {
    std::vector<int> lags;
    std::vector<double> values; // length 2*|lags| + 1
    MomentKind kind = MomentKind::analytic;
    std::size_t dropped_zero_returns = 0;
};

MomentVector analytic_moments(double m0, int k, double gamma_k, double b, double sigma,
                              const std::vector<int>& lags);
MomentVector analytic_moments(const MsmParams& p, const std::vector<int>& lags);

// Sample analogues over maximal windows: xi^2 over t >= T, the cross moment
// over t >= 2T, r^2 over the whole series. Zero returns are dropped first
// and counted.
MomentVector empirical_moments(const ReturnSeries& r, const std::vector<int>& lags);

struct GmmConfig {
    std::vector<int> lags{1, 5, 10, 20};
    double gamma_k = 0.5; // cascade shape held fixed during estimation
    double b = 2.0;
    int hac_lags = -1; // -1: floor(n^(1/4)) on the aligned moment panel
    double tol = 1e-8;
    int max_iterations = 500;
    bool iterated = false; // re-minimize until the estimate stabilizes
    int max_stages = 10;
    std::vector<double> m0_starts{1.1, 1.3, 1.5, 1.7, 1.9};
    std::vector<double> sigma_factors{0.5, 1.0, 2.0};
};

struct GmmResult {
    double m0_hat = 0.0;
    double sigma_hat = 0.0;
    double se_m0 = 0.0;
    double se_sigma = 0.0;
    double j_statistic = 0.0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool at_boundary = false;
    std::size_t n_observations = 0; // aligned moment panel rows
    std::size_t dropped_zero_returns = 0;
};

// Two-stage GMM for (m0, sigma): identity weighting first, then the inverse
// Newey-West HAC covariance of the moment panel. Standard errors from the
// sandwich formula, J-statistic against the HAC covariance.
GmmResult gmm_estimate(const ReturnSeries& r, int k, const GmmConfig& cfg = {});

} // namespace msm
