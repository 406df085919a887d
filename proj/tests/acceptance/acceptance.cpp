// Acceptance suite: end-to-end statistical checks against pinned targets.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "msm/model.hpp"
#include "msm/moments.hpp"
#include "msm/monte_carlo.hpp"
#include "msm/rng.hpp"
#include "msm/scaling.hpp"
#include "msm/series.hpp"
#include "support/fgn.hpp"

using namespace msm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double mean_of(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// --- 1: analytic moments vs 10^7-step simulations --------------------------

// z-scores of the nine analytic moments against a 10^7-step simulation,
// with batch-means standard errors.
std::array<double, 9> moment_zs(double m0, int k, int grid_index, std::uint64_t rep) {
    const std::vector<int> lags{1, 5, 10, 20};
    const std::size_t T = 10'000'000;
    const std::size_t start = 40; // 2 * max lag
    const int batches = 100;

    MsmParams p;
    p.m0 = m0;
    p.k = k;
    const std::uint64_t seed = derive_seed(1001, static_cast<std::uint64_t>(grid_index), rep);
    const std::vector<double> r = simulate(p, T, seed).values;
    std::vector<double> lnabs(T);
    for (std::size_t t = 0; t < T; ++t) lnabs[t] = std::log(std::fabs(r[t]));

    const std::size_t per_batch = (T - start) / batches;
    std::vector<std::vector<double>> batch_means(9, std::vector<double>(batches));
    for (int b = 0; b < batches; ++b) {
        double acc[9] = {0};
        const std::size_t lo = start + static_cast<std::size_t>(b) * per_batch;
        const std::size_t hi = lo + per_batch;
        for (std::size_t t = lo; t < hi; ++t) {
            for (std::size_t j = 0; j < lags.size(); ++j) {
                const std::size_t L = static_cast<std::size_t>(lags[j]);
                const double xi = lnabs[t] - lnabs[t - L];
                const double xi_prev = lnabs[t - L] - lnabs[t - 2 * L];
                acc[2 * j] += xi * xi;
                acc[2 * j + 1] += xi * xi_prev;
            }
            acc[8] += r[t] * r[t];
        }
        for (int d = 0; d < 9; ++d)
            batch_means[static_cast<std::size_t>(d)][static_cast<std::size_t>(b)] =
                acc[d] / static_cast<double>(per_batch);
    }

    const MomentVector ana = analytic_moments(m0, k, 0.5, 2.0, 1.0, lags);
    std::array<double, 9> zs{};
    for (std::size_t d = 0; d < 9; ++d) {
        const double est = mean_of(batch_means[d]);
        const double se = sample_std(batch_means[d]) / std::sqrt(static_cast<double>(batches));
        zs[d] = (ana.values[d] - est) / se;
    }
    return zs;
}

// 135 three-sigma comparisons have a ~25% chance of one spurious extreme even
// when the formulas are exact, so a flagged moment is retested once on an
// independent simulation. A real formula error sits tens of standard errors
// out (a 0.01 slip in m0 alone reads |z| ~ 30) and cannot pass the retest.
Outcome criterion_moment_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> m0_grid{1.1, 1.3, 1.5, 1.7, 1.9};
    const std::vector<int> k_grid{1, 5, 10};

    struct Flag {
        double m0;
        int k, grid_index, dim;
    };
    double worst_z = 0;
    std::string worst_at;
    std::vector<Flag> flagged;
    int grid_index = 0;
    for (double m0 : m0_grid) {
        for (int k : k_grid) {
            const auto zs = moment_zs(m0, k, grid_index, 0);
            for (int d = 0; d < 9; ++d) {
                const double z = std::fabs(zs[static_cast<std::size_t>(d)]);
                if (z > worst_z) {
                    worst_z = z;
                    worst_at = fmt("m0=%.1f k=%d dim=%d", m0, k, d);
                }
                if (z > 3.0) flagged.push_back({m0, k, grid_index, d});
            }
            ++grid_index;
        }
    }

    double worst_retest = 0;
    for (const auto& f : flagged) {
        const auto zs = moment_zs(f.m0, f.k, f.grid_index, 1);
        worst_retest = std::max(worst_retest, std::fabs(zs[static_cast<std::size_t>(f.dim)]));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    o.pass = worst_retest <= 3.0 && secs < 300.0;
    o.detail = fmt("135 moments across 15 grid points, max |z| = %.2f at %s; "
                   "%zu flagged, max retest |z| = %.2f (limit 3); %.0fs (limit 300)",
                   worst_z, worst_at.c_str(), flagged.size(), worst_retest, secs);
    return o;
}

// --- 2: GMM recovery over 50 replications -----------------------------------

Outcome criterion_gmm_recovery() {
    const int reps = 50;
    std::vector<double> m0s, sigmas;
    int converged = 0;
    for (int rep = 0; rep < reps; ++rep) {
        MsmParams p;
        p.m0 = 1.5;
        p.sigma = 1.0;
        p.k = 10;
        const ReturnSeries r = simulate(p, 10'000, derive_seed(2002, 10, static_cast<std::uint64_t>(rep)));
        const GmmResult fit = gmm_estimate(r, 10);
        m0s.push_back(fit.m0_hat);
        sigmas.push_back(fit.sigma_hat);
        converged += fit.converged ? 1 : 0;
    }
    const double mean_m0 = mean_of(m0s);
    const double mean_sigma = mean_of(sigmas);
    const double sd_m0 = sample_std(m0s);
    Outcome o;
    o.pass = mean_m0 >= 1.45 && mean_m0 <= 1.55 && mean_sigma >= 0.95 && mean_sigma <= 1.05 &&
             sd_m0 >= 0.005 && sd_m0 <= 0.06 && converged == reps;
    o.detail = fmt("mean m0_hat = %.4f [1.45,1.55], mean sigma_hat = %.4f [0.95,1.05], "
                   "std m0_hat = %.4f [0.005,0.06], converged %d/%d",
                   mean_m0, mean_sigma, sd_m0, converged, reps);
    return o;
}

// --- 3: V-to-H mapping at the pinned point ----------------------------------

Outcome criterion_lo_h_identity() {
    const double v = 3.005;
    const double n = 9372.0;
    const double h = std::log(v * std::sqrt(n)) / std::log(n);

    MsmParams p;
    p.k = 5;
    const ReturnSeries r = simulate(p, 500, 777);
    std::vector<double> x(r.values.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::fabs(r.values[i]);
    const LoResult l = lo_statistic(x, 5);
    const double identity_gap =
        std::fabs(l.h - std::log(l.q_stat) / std::log(static_cast<double>(x.size())));

    Outcome o;
    o.pass = std::fabs(h - 0.620) <= 5e-4 && identity_gap <= 1e-12;
    o.detail = fmt("V=3.005, T=9372 maps to H = %.6f (target 0.620 +/- 0.0005); "
                   "library identity gap %.1e", h, identity_gap);
    return o;
}

// --- 4: small-sample bias of the R/S Hurst proxy on iid data ----------------

Outcome criterion_lo_iid_bias() {
    std::vector<std::pair<int, MsmParams>> params(1);
    params[0].first = 1;
    params[0].second.m0 = 1.0; // degenerate multipliers: iid N(0,1) returns
    params[0].second.k = 1;

    McConfig cfg;
    cfg.ghe_reps = 0;
    cfg.lo_reps = 1000;
    cfg.T = 9372;
    cfg.k_set = {1};
    cfg.tau_set = {0};
    cfg.q_set = {1.0};
    cfg.lo_denominator = LoDenominator::newey_west_zero_lag;
    cfg.master_seed = 42;
    const EnsembleSet set = run_ensemble(params, cfg);
    const double mean_h = mean_of(set.lo[0].h);

    McConfig std_cfg = cfg;
    std_cfg.lo_denominator = LoDenominator::newey_west;
    const EnsembleSet std_set = run_ensemble(params, std_cfg);
    const double std_mean_h = mean_of(std_set.lo[0].h);

    Outcome o;
    o.pass = mean_h >= 0.44 && mean_h <= 0.49;
    o.detail = fmt("1000 iid paths, zero-lag denominator: mean H = %.4f [0.44,0.49] "
                   "(plain denominator reads %.4f)", mean_h, std_mean_h);
    return o;
}

// --- 5: GHE on Gaussian random walks ----------------------------------------

double walk_hurst(const std::vector<double>& walk, double q, const std::vector<int>& grid) {
    double sum = 0;
    for (int tau_max : grid) sum += ghe(walk, q, tau_max);
    return sum / static_cast<double>(grid.size());
}

Outcome criterion_ghe_unbiased() {
    const std::vector<int> grid = default_tau_max_set();
    std::vector<double> h1s, h2s;
    MsmParams p;
    p.m0 = 1.0;
    p.k = 1;
    for (int path = 0; path < 100; ++path) {
        const ReturnSeries r = simulate(p, 9372, derive_seed(4004, 1, static_cast<std::uint64_t>(path)));
        std::vector<double> walk(r.values.size());
        double acc = 0;
        for (std::size_t t = 0; t < r.values.size(); ++t) {
            acc += r.values[t];
            walk[t] = acc;
        }
        h1s.push_back(walk_hurst(walk, 1.0, grid));
        h2s.push_back(walk_hurst(walk, 2.0, grid));
    }
    const double h1 = mean_of(h1s);
    const double h2 = mean_of(h2s);
    Outcome o;
    o.pass = h1 >= 0.49 && h1 <= 0.51 && h2 >= 0.49 && h2 <= 0.51;
    o.detail = fmt("100 Gaussian walks: mean H(1) = %.4f, mean H(2) = %.4f [0.49,0.51]", h1, h2);
    return o;
}

// --- 6/7/8: one shared ensemble at the fitted index parameters --------------

struct SharedEnsemble {
    EnsembleSet set;
    double seconds = 0;
};

SharedEnsemble build_shared_ensemble() {
    std::vector<std::pair<int, MsmParams>> params(3);
    params[0].first = 5;
    params[0].second.m0 = 1.498;
    params[0].second.sigma = 0.983;
    params[0].second.k = 5;
    params[1].first = 10;
    params[1].second.m0 = 1.484;
    params[1].second.sigma = 0.983;
    params[1].second.k = 10;
    params[2].first = 20;
    params[2].second.m0 = 1.487;
    params[2].second.sigma = 0.983;
    params[2].second.k = 20;

    McConfig cfg;
    cfg.ghe_reps = 100;
    cfg.lo_reps = 1000;
    cfg.T = 9372;
    cfg.k_set = {5, 10, 20};
    cfg.tau_set = {0, 100};
    cfg.q_set = {1.0, 2.0};
    cfg.ghe_mode = GheMode::integrated;
    cfg.lo_denominator = LoDenominator::newey_west_zero_lag;
    cfg.rejection_side = RejectionSide::above;
    cfg.master_seed = 42;

    SharedEnsemble out;
    const auto t0 = std::chrono::steady_clock::now();
    out.set = run_ensemble(params, cfg);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

const LoEnsemble& lo_slice(const EnsembleSet& set, int k, int tau) {
    for (const auto& e : set.lo)
        if (e.k == k && e.tau == tau) return e;
    throw std::logic_error("missing lo slice");
}

const GheEnsemble& ghe_slice(const EnsembleSet& set, int k, double q) {
    for (const auto& e : set.ghe)
        if (e.k == k && e.q == q) return e;
    throw std::logic_error("missing ghe slice");
}

Outcome criterion_v_statistics(const SharedEnsemble& shared) {
    const auto& v0 = lo_slice(shared.set, 20, 0).v;
    const auto& v100 = lo_slice(shared.set, 20, 100).v;
    const double mean_v0 = mean_of(v0);
    const double sd_v0 = sample_std(v0);
    const double mean_v100 = mean_of(v100);
    Outcome o;
    o.pass = mean_v0 >= 6.3 && mean_v0 <= 7.1 && sd_v0 >= 1.5 && sd_v0 <= 2.2 &&
             mean_v100 >= 2.1 && mean_v100 <= 2.6 && shared.seconds < 900.0;
    o.detail = fmt("k=20, 1000 paths: mean V(0) = %.3f [6.3,7.1], std = %.3f [1.5,2.2], "
                   "mean V(100) = %.3f [2.1,2.6]; ensemble built in %.0fs (limit 900)",
                   mean_v0, sd_v0, mean_v100, shared.seconds);
    return o;
}

Outcome criterion_rejection_rates(const SharedEnsemble& shared) {
    double rate5 = -1, rate10 = -1;
    for (const auto& cell : rejection_table(shared.set, RejectionSide::above)) {
        if (cell.tau != 100) continue;
        const double rate = static_cast<double>(cell.reject_95) / static_cast<double>(cell.n_reps);
        if (cell.k == 5) rate5 = rate;
        if (cell.k == 10) rate10 = rate;
    }
    Outcome o;
    o.pass = rate5 >= 0.0 && rate5 < 0.02 && rate10 > 0.40;
    o.detail = fmt("95%% upper rejections at tau=100: k=5 %.1f%% (< 2%%), k=10 %.1f%% (> 40%%)",
                   100 * rate5, 100 * rate10);
    return o;
}

Outcome criterion_ghe_levels(const SharedEnsemble& shared) {
    struct Target {
        int k;
        double q, level;
    };
    const std::vector<Target> targets{
        {5, 1.0, 0.747}, {5, 2.0, 0.705}, {20, 1.0, 0.868}, {20, 2.0, 0.812}};
    bool pass = true;
    std::string detail = "integrated mode, 100 paths:";
    for (const auto& t : targets) {
        const auto& h = ghe_slice(shared.set, t.k, t.q).h;
        const double m = mean_of(h);
        const double sd = sample_std(h);
        const double gap = std::fabs(m - t.level);
        pass = pass && gap <= 3.0 * sd;
        detail += fmt(" H(%g)|k=%d: %.4f vs %.3f (%.1f sd)", t.q, t.k, m, t.level, gap / sd);
    }
    Outcome o;
    o.pass = pass;
    o.detail = detail;
    return o;
}

// --- 9: property suites ------------------------------------------------------

Outcome criterion_properties() {
    bool all = true;
    std::string detail;
    auto record = [&](const char* name, bool ok) {
        all = all && ok;
        detail += fmt("%s%s=%s", detail.empty() ? "" : ", ", name, ok ? "ok" : "FAIL");
    };

    {
        Rng rng(900);
        bool ok = true;
        for (int i = 0; i < 30 && ok; ++i) {
            std::vector<double> x(300);
            for (double& v : x) v = rng.normal();
            std::vector<double> y(x.size());
            for (std::size_t j = 0; j < x.size(); ++j) y[j] = 3.7 * x[j] - 2.0;
            const double a = lo_statistic(x, 7).q_stat;
            const double b = lo_statistic(y, 7).q_stat;
            ok = std::fabs(a - b) <= 1e-9 * std::fabs(a);
        }
        record("lo_scale_shift", ok);
    }
    {
        Rng rng(901);
        std::vector<double> x(400);
        double acc = 0;
        for (double& v : x) acc += rng.normal(), v = acc;
        bool ok = true;
        for (double c : {5.0, -2.0, 0.01}) {
            std::vector<double> y(x.size());
            for (std::size_t j = 0; j < x.size(); ++j) y[j] = c * x[j];
            ok = ok && std::fabs(ghe(y, 2.0, 10) - ghe(x, 2.0, 10)) <= 1e-9;
        }
        record("ghe_scale", ok);
    }
    {
        Rng rng(902);
        bool ok = true;
        for (int i = 0; i < 50 && ok; ++i) {
            std::vector<double> x(200);
            for (double& v : x) v = rng.normal() + 0.3;
            const double m = mean_of(x);
            double lo_v = 0, hi_v = 0, ss = 0, cum = 0;
            for (double v : x) {
                cum += v - m;
                lo_v = std::min(lo_v, cum);
                hi_v = std::max(hi_v, cum);
                ss += (v - m) * (v - m);
            }
            const double range = hi_v - lo_v;
            const double s = std::sqrt(ss / static_cast<double>(x.size()));
            const double q = range / s;
            ok = std::fabs(q - lo_statistic(x, 0).q_stat) <= 1e-12 * q;
        }
        record("classical_tau0", ok);
    }
    {
        bool ok = true;
        const std::vector<std::array<double, 3>> cases{{10, 0.5, 2.0}, {20, 0.9, 3.0}, {8, 0.08, 1.5}};
        for (const auto& c : cases) {
            const auto probs = transition_probabilities(static_cast<int>(c[0]), c[1], c[2]);
            for (std::size_t i = 1; i < probs.size(); ++i) ok = ok && probs[i - 1] < probs[i];
            ok = ok && std::fabs(probs.back() - c[1]) <= 1e-15;
            for (double g : probs) ok = ok && g > 0.0 && g < 1.0;
        }
        record("transition_monotone", ok);
    }
    {
        MsmParams p;
        const ReturnSeries a = simulate(p, 2000, 5);
        const ReturnSeries b = simulate(p, 2000, 5);
        const ReturnSeries c = simulate(p, 2000, 6);
        record("seed_determinism", a.values == b.values && a.values != c.values);
    }
    {
        const std::vector<int> grid = default_tau_max_set();
        bool ok = true;
        std::string gaps;
        for (double hurst : {0.3, 0.5, 0.7}) {
            std::vector<double> estimates;
            for (int path = 0; path < 8; ++path) {
                const auto noise = msm::testsupport::fgn(
                    hurst, 6000,
                    derive_seed(9009, static_cast<std::uint64_t>(std::lround(100 * hurst)),
                                static_cast<std::uint64_t>(path)));
                std::vector<double> fbm(noise.size());
                double acc = 0;
                for (std::size_t t = 0; t < noise.size(); ++t) {
                    acc += noise[t];
                    fbm[t] = acc;
                }
                estimates.push_back(walk_hurst(fbm, 2.0, grid));
            }
            const double est = mean_of(estimates);
            gaps += fmt(" %.2f->%.3f", hurst, est);
            ok = ok && std::fabs(est - hurst) <= 0.03;
        }
        record(("fgn_recovery" + gaps).c_str(), ok);
    }

    Outcome o;
    o.pass = all;
    o.detail = detail;
    return o;
}

// --- 10: estimates are insensitive to the component count -------------------

Outcome criterion_k_stability() {
    MsmParams p;
    p.m0 = 1.487;
    p.sigma = 0.983;
    p.k = 20;
    const ReturnSeries r = simulate(p, 50'000, 3030);
    const GmmResult f15 = gmm_estimate(r, 15);
    const GmmResult f20 = gmm_estimate(r, 20);
    const double gap = std::fabs(f15.m0_hat - f20.m0_hat);
    Outcome o;
    o.pass = gap < 0.01;
    o.detail = fmt("T=50000: m0_hat(k=15) = %.5f, m0_hat(k=20) = %.5f, |gap| = %.5f (< 0.01)",
                   f15.m0_hat, f20.m0_hat, gap);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto wanted = [&](int id) {
        return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
    };

    std::printf("acceptance suite, library version %s\n", MSM_VERSION);
    bool all_pass = true;
    SharedEnsemble shared;
    bool shared_built = false;
    auto ensure_shared = [&]() -> SharedEnsemble& {
        if (!shared_built) {
            shared = build_shared_ensemble();
            shared_built = true;
        }
        return shared;
    };

    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries{
        {1, "analytic moments match long simulations", [] { return criterion_moment_oracle(); }},
        {2, "GMM recovers (m0, sigma)", [] { return criterion_gmm_recovery(); }},
        {3, "V-to-H mapping", [] { return criterion_lo_h_identity(); }},
        {4, "R/S Hurst proxy bias on iid data", [] { return criterion_lo_iid_bias(); }},
        {5, "GHE is unbiased on random walks", [] { return criterion_ghe_unbiased(); }},
        {6, "V statistic levels at fitted k=20 parameters",
         [&] { return criterion_v_statistics(ensure_shared()); }},
        {7, "rejection rates split by k", [&] { return criterion_rejection_rates(ensure_shared()); }},
        {8, "GHE levels at fitted parameters", [&] { return criterion_ghe_levels(ensure_shared()); }},
        {9, "property suites", [] { return criterion_properties(); }},
        {10, "m0_hat stable across k", [] { return criterion_k_stability(); }},
    };

    for (const auto& e : entries) {
        if (!wanted(e.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2d] %s  %s: %s (%.1fs)\n", e.id, o.pass ? "PASS" : "FAIL", e.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }

    std::printf("RESULT: %s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : 1;
}
