#include "msm/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msm/errors.hpp"

namespace msm {

namespace {

void check_signal(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("signal contains non-finite values");
}

double ols_slope(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double am = 0.0, bm = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        am += a[i];
        bm += b[i];
    }
    am /= n;
    bm /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sxy += (a[i] - am) * (b[i] - bm);
        sxx += (a[i] - am) * (a[i] - am);
    }
    return sxy / sxx;
}

} // namespace

const char* to_string(GheMode m) { return m == GheMode::integrated ? "integrated" : "raw"; }

const char* to_string(LoDenominator d) {
    return d == LoDenominator::newey_west ? "newey_west" : "newey_west_zero_lag";
}

double structure_function(const std::vector<double>& x, double q, int tau, int v) {
    if (!(q > 0.0)) throw ValidationError("q must be positive");
    if (v < 1 || tau < v) throw ValidationError("need tau >= v >= 1");
    if (x.size() <= static_cast<std::size_t>(tau)) throw ValidationError("series shorter than tau");
    check_signal(x);
    const std::size_t n = x.size();
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(tau) < n; ++t)
        num += std::pow(std::abs(x[t + static_cast<std::size_t>(tau)] - x[t]), q);
    num /= static_cast<double>(n - static_cast<std::size_t>(tau));
    double den = 0.0;
    for (double xv : x) den += std::pow(std::abs(xv), q);
    den /= static_cast<double>(n);
    if (den == 0.0) throw NumericalError("structure function denominator is zero");
    return num / den;
}

double ghe(const std::vector<double>& x, double q, int tau_max) {
    if (tau_max < 3) throw ValidationError("tau_max must be >= 3");
    std::vector<double> ln_tau, ln_k;
    ln_tau.reserve(static_cast<std::size_t>(tau_max));
    ln_k.reserve(static_cast<std::size_t>(tau_max));
    for (int tau = 1; tau <= tau_max; ++tau) {
        const double k = structure_function(x, q, tau);
        if (!(k > 0.0)) throw NumericalError("structure function vanished; no scaling fit");
        ln_tau.push_back(std::log(static_cast<double>(tau)));
        ln_k.push_back(std::log(k));
    }
    return ols_slope(ln_tau, ln_k) / q;
}

std::vector<int> default_tau_max_set() {
    std::vector<int> out;
    for (int t = 5; t <= 19; ++t) out.push_back(t);
    return out;
}

std::vector<double> ghe_signal(const ReturnSeries& r, GheMode mode) {
    validate(r);
    std::vector<double> abs_r(r.values.size());
    for (std::size_t i = 0; i < r.values.size(); ++i) abs_r[i] = std::abs(r.values[i]);
    if (mode == GheMode::raw) return abs_r;
    double mean = 0.0;
    for (double v : abs_r) mean += v;
    mean /= static_cast<double>(abs_r.size());
    std::vector<double> out(abs_r.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < abs_r.size(); ++i) {
        cum += abs_r[i] - mean;
        out[i] = cum;
    }
    return out;
}

GheResult ghe_averaged(const ReturnSeries& r, double q, const std::vector<int>& tau_max_set,
                       GheMode mode) {
    if (tau_max_set.empty()) throw ValidationError("tau_max_set must be non-empty");
    int max_tm = 0;
    for (int tm : tau_max_set) {
        if (tm < 3) throw ValidationError("tau_max must be >= 3");
        max_tm = std::max(max_tm, tm);
    }
    const std::vector<double> x = ghe_signal(r, mode);
    // each K_q(tau) is shared by every tau_max >= tau, so compute the ladder once
    std::vector<double> ln_tau, ln_k;
    ln_tau.reserve(static_cast<std::size_t>(max_tm));
    ln_k.reserve(static_cast<std::size_t>(max_tm));
    for (int tau = 1; tau <= max_tm; ++tau) {
        const double k = structure_function(x, q, tau);
        if (!(k > 0.0)) throw NumericalError("structure function vanished; no scaling fit");
        ln_tau.push_back(std::log(static_cast<double>(tau)));
        ln_k.push_back(std::log(k));
    }
    std::vector<double> hs;
    hs.reserve(tau_max_set.size());
    for (int tm : tau_max_set) {
        const std::vector<double> a(ln_tau.begin(), ln_tau.begin() + tm);
        const std::vector<double> b(ln_k.begin(), ln_k.begin() + tm);
        hs.push_back(ols_slope(a, b) / q);
    }
    GheResult out;
    out.q = q;
    out.tau_max_set = tau_max_set;
    out.mode = mode;
    double mean = 0.0;
    for (double h : hs) mean += h;
    mean /= static_cast<double>(hs.size());
    out.h = mean;
    out.h_std = population_std(hs);
    return out;
}

LoResult lo_statistic(const std::vector<double>& x, int tau, LoDenominator den) {
    if (tau < 0) throw ValidationError("tau must be >= 0");
    const std::size_t n = x.size();
    if (n <= static_cast<std::size_t>(tau) + 2) throw ValidationError("series shorter than tau + 2");
    check_signal(x);

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    double cum = 0.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (double v : x) {
        cum += v - mean;
        hi = std::max(hi, cum);
        lo = std::min(lo, cum);
    }
    const double range = hi - lo;

    double s2 = 0.0;
    for (double v : x) s2 += (v - mean) * (v - mean);
    s2 /= static_cast<double>(n);

    double st2 = s2;
    if (den == LoDenominator::newey_west_zero_lag) st2 += 2.0 * s2;
    for (int j = 1; j <= tau; ++j) {
        const double w = 1.0 - static_cast<double>(j) / (static_cast<double>(tau) + 1.0);
        double acov = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t)
            acov += (x[t] - mean) * (x[t - static_cast<std::size_t>(j)] - mean);
        st2 += 2.0 * w * acov / static_cast<double>(n);
    }
    if (!(st2 > 0.0)) throw NumericalError("non-positive modified variance S_tau^2");

    LoResult out;
    out.tau = tau;
    out.q_stat = range / std::sqrt(st2);
    out.v_stat = out.q_stat / std::sqrt(static_cast<double>(n));
    out.h = std::log(out.q_stat) / std::log(static_cast<double>(n));
    out.reject_95 = rs_significance(out.v_stat, 0.95);
    out.reject_99 = rs_significance(out.v_stat, 0.99);
    return out;
}

bool rs_significance(double v_stat, double level) {
    if (!(v_stat > 0.0)) throw ValidationError("v_stat must be positive");
    if (std::abs(level - 0.95) < 1e-12) return v_stat < kLo95Lower || v_stat > kLo95Upper;
    if (std::abs(level - 0.99) < 1e-12) return v_stat < kLo99Lower || v_stat > kLo99Upper;
    throw ValidationError("unsupported significance level");
}

} // namespace msm
