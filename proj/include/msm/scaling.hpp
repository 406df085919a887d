#pragma once

#include <vector>

#include "msm/series.hpp"

namespace msm {

// Signal handed to the generalized Hurst estimator: cumulative sum of
// demeaned |r_t| (integrated) or |r_t| itself (raw).
enum class GheMode { integrated, raw };

const char* to_string(GheMode m);

struct GheResult {
    double q = 0.0;
    double h = 0.0;     // mean over the tau_max grid
    double h_std = 0.0; // dispersion across the grid
    std::vector<int> tau_max_set;
    GheMode mode = GheMode::integrated;
};

// K_q(tau): mean |x(t+tau) - x(t)|^q over t, divided by mean |x(t)|^q.
double structure_function(const std::vector<double>& x, double q, int tau, int v = 1);

// H(q): least-squares slope of ln K_q(tau) on ln(tau) over tau = 1..tau_max,
// divided by q.
double ghe(const std::vector<double>& x, double q, int tau_max);

std::vector<int> default_tau_max_set(); // {5, ..., 19}

std::vector<double> ghe_signal(const ReturnSeries& r, GheMode mode);

GheResult ghe_averaged(const ReturnSeries& r, double q,
                       const std::vector<int>& tau_max_set = default_tau_max_set(),
                       GheMode mode = GheMode::integrated);

// Denominator of the modified rescaled range. newey_west is the plain
// Bartlett-weighted sum over lags 1..tau; newey_west_zero_lag additionally
// counts the lag-0 term inside the weighted sum (adding 2*S^2), which is the
// variant needed to reproduce the reference Monte Carlo tables.
enum class LoDenominator { newey_west, newey_west_zero_lag };

const char* to_string(LoDenominator d);

inline constexpr double kLo95Lower = 0.809;
inline constexpr double kLo95Upper = 1.862;
inline constexpr double kLo99Lower = 0.721;
inline constexpr double kLo99Upper = 2.098;

struct LoResult {
    int tau = 0;
    double q_stat = 0.0; // R / S_tau
    double v_stat = 0.0; // q_stat / sqrt(T)
    double h = 0.0;      // ln(q_stat) / ln(T)
    bool reject_95 = false;
    bool reject_99 = false;
};

// Modified rescaled range of x (callers pass the volatility proxy |r_t|).
LoResult lo_statistic(const std::vector<double>& x, int tau,
                      LoDenominator den = LoDenominator::newey_west);

// Two-sided test of v_stat against the tabulated confidence intervals.
bool rs_significance(double v_stat, double level);

} // namespace msm
