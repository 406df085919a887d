#include "msm/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "msm/errors.hpp"

namespace msm {

namespace {

void validate(const McConfig& cfg) {
    if (cfg.ghe_reps < 0 || cfg.lo_reps < 0 || cfg.ghe_reps + cfg.lo_reps < 1)
        throw ValidationError("need at least one replication");
    if (cfg.T < 3) throw ValidationError("T too small");
    if (cfg.q_set.empty() && cfg.ghe_reps > 0) throw ValidationError("q_set must be non-empty");
    if (cfg.tau_set.empty() && cfg.lo_reps > 0) throw ValidationError("tau_set must be non-empty");
    for (int tau : cfg.tau_set)
        if (tau < 0) throw ValidationError("tau must be >= 0");
}

double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

McSummary summarize_values(std::string label, const std::vector<double>& values) {
    McSummary s;
    s.label = std::move(label);
    s.n_reps = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = mean_of(values);
    s.std_dev = population_std(values);
    s.quantile_2_5 = nearest_rank_quantile(values, 0.025);
    s.quantile_97_5 = nearest_rank_quantile(values, 0.975);
    return s;
}

} // namespace

const char* to_string(RejectionSide s) { return s == RejectionSide::above ? "above" : "outside"; }

EnsembleSet run_ensemble(const std::vector<std::pair<int, MsmParams>>& params_per_k,
                         const McConfig& cfg) {
    validate(cfg);
    if (params_per_k.empty()) throw ValidationError("no parameter sets supplied");
    for (const auto& [k, p] : params_per_k) {
        msm::validate(p);
        if (p.k != k) throw ValidationError("params.k does not match its ensemble key");
    }

    EnsembleSet set;
    set.config = cfg;
    set.params = params_per_k;
    const int total_reps = std::max(cfg.ghe_reps, cfg.lo_reps);
    const std::size_t nq = cfg.q_set.size();
    const std::size_t nt = cfg.tau_set.size();

    // per (k, rep) slots, reduced in rep order after the parallel section
    struct RepSlot {
        std::vector<double> ghe_h;
        std::vector<double> lo_v;
        std::vector<double> lo_h;
        bool failed = false;
    };
    std::vector<std::vector<RepSlot>> slots(params_per_k.size());
    for (auto& v : slots) v.resize(static_cast<std::size_t>(total_reps));

    struct Job {
        std::size_t k_idx;
        int rep;
    };
    std::vector<Job> jobs;
    jobs.reserve(params_per_k.size() * static_cast<std::size_t>(total_reps));
    for (std::size_t ki = 0; ki < params_per_k.size(); ++ki)
        for (int rep = 0; rep < total_reps; ++rep) jobs.push_back({ki, rep});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) break;
            const auto [ki, rep] = jobs[j];
            const auto& [k, params] = params_per_k[ki];
            RepSlot& slot = slots[ki][static_cast<std::size_t>(rep)];
            try {
                const std::uint64_t seed =
                    derive_seed(cfg.master_seed, static_cast<std::uint64_t>(k),
                                static_cast<std::uint64_t>(rep));
                const ReturnSeries path = simulate(params, cfg.T, seed);
                if (rep < cfg.ghe_reps) {
                    slot.ghe_h.reserve(nq);
                    for (double q : cfg.q_set)
                        slot.ghe_h.push_back(
                            ghe_averaged(path, q, cfg.tau_max_set, cfg.ghe_mode).h);
                }
                if (rep < cfg.lo_reps) {
                    std::vector<double> abs_r(path.values.size());
                    for (std::size_t i = 0; i < abs_r.size(); ++i)
                        abs_r[i] = std::abs(path.values[i]);
                    slot.lo_v.reserve(nt);
                    slot.lo_h.reserve(nt);
                    for (int tau : cfg.tau_set) {
                        const LoResult lr = lo_statistic(abs_r, tau, cfg.lo_denominator);
                        slot.lo_v.push_back(lr.v_stat);
                        slot.lo_h.push_back(lr.h);
                    }
                }
            } catch (const std::exception&) {
                slot.failed = true;
            }
        }
    };
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t ki = 0; ki < params_per_k.size(); ++ki) {
        const int k = params_per_k[ki].first;
        std::vector<GheEnsemble> ghe_k(nq);
        for (std::size_t qi = 0; qi < nq; ++qi) ghe_k[qi] = {k, cfg.q_set[qi], {}};
        std::vector<LoEnsemble> lo_k(nt);
        for (std::size_t ti = 0; ti < nt; ++ti) lo_k[ti] = {k, cfg.tau_set[ti], {}, {}};
        for (int rep = 0; rep < total_reps; ++rep) {
            const RepSlot& slot = slots[ki][static_cast<std::size_t>(rep)];
            if (slot.failed) {
                ++set.excluded;
                continue;
            }
            if (rep < cfg.ghe_reps)
                for (std::size_t qi = 0; qi < nq; ++qi) ghe_k[qi].h.push_back(slot.ghe_h[qi]);
            if (rep < cfg.lo_reps)
                for (std::size_t ti = 0; ti < nt; ++ti) {
                    lo_k[ti].v.push_back(slot.lo_v[ti]);
                    lo_k[ti].h.push_back(slot.lo_h[ti]);
                }
        }
        for (auto& e : ghe_k) set.ghe.push_back(std::move(e));
        for (auto& e : lo_k) set.lo.push_back(std::move(e));
    }
    return set;
}

std::vector<McSummary> summarize(const EnsembleSet& set) {
    std::vector<McSummary> out;
    for (const auto& e : set.ghe) {
        char q_txt[32];
        std::snprintf(q_txt, sizeof q_txt, "%g", e.q);
        out.push_back(
            summarize_values("ghe_h k=" + std::to_string(e.k) + " q=" + q_txt, e.h));
    }
    for (const auto& e : set.lo) {
        McSummary v = summarize_values(
            "lo_v k=" + std::to_string(e.k) + " tau=" + std::to_string(e.tau), e.v);
        int r95 = 0, r99 = 0;
        for (double x : e.v) {
            if (set.config.rejection_side == RejectionSide::above) {
                r95 += x > kLo95Upper;
                r99 += x > kLo99Upper;
            } else {
                r95 += rs_significance(x, 0.95);
                r99 += rs_significance(x, 0.99);
            }
        }
        v.reject_95 = r95;
        v.reject_99 = r99;
        out.push_back(std::move(v));
        out.push_back(summarize_values(
            "lo_h k=" + std::to_string(e.k) + " tau=" + std::to_string(e.tau), e.h));
    }
    for (const auto& s : out)
        if (s.n_reps > 0 && s.quantile_2_5 > s.quantile_97_5)
            throw NumericalError("quantile ordering violated");
    return out;
}

double nearest_rank_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * n));
    if (rank < 1) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

bool quantile_coincidence(double empirical_value, const std::vector<double>& ensemble) {
    if (ensemble.size() < 40) throw NumericalError("ensemble too small for quantile bounds");
    const double lo = nearest_rank_quantile(ensemble, 0.025);
    const double hi = nearest_rank_quantile(ensemble, 0.975);
    return empirical_value >= lo && empirical_value <= hi;
}

std::vector<RejectionCell> rejection_table(const EnsembleSet& set, RejectionSide side) {
    std::vector<RejectionCell> out;
    for (const auto& e : set.lo) {
        RejectionCell c;
        c.k = e.k;
        c.tau = e.tau;
        c.n_reps = static_cast<int>(e.v.size());
        for (double v : e.v) {
            if (side == RejectionSide::above) {
                c.reject_95 += v > kLo95Upper;
                c.reject_99 += v > kLo99Upper;
            } else {
                c.reject_95 += rs_significance(v, 0.95);
                c.reject_99 += rs_significance(v, 0.99);
            }
        }
        out.push_back(c);
    }
    return out;
}

} // namespace msm
