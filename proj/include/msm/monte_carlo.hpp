#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msm/model.hpp"
#include "msm/scaling.hpp"

namespace msm {

// Which tail of the confidence interval counts as a rejection.
enum class RejectionSide { above, outside };

const char* to_string(RejectionSide s);

struct McConfig {
    int ghe_reps = 100;
    int lo_reps = 1000;
    std::size_t T = 9372;
    std::vector<int> k_set{5, 10, 15, 20};
    std::vector<int> tau_set{0, 5, 10, 25, 50, 100};
    std::vector<double> q_set{1.0, 2.0};
    std::vector<int> tau_max_set = default_tau_max_set();
    GheMode ghe_mode = GheMode::integrated;
    LoDenominator lo_denominator = LoDenominator::newey_west_zero_lag;
    RejectionSide rejection_side = RejectionSide::above;
    std::uint64_t master_seed = 42;
    int threads = 0; // 0: hardware concurrency
};

struct GheEnsemble {
    int k = 0;
    double q = 0.0;
    std::vector<double> h; // one value per surviving replication, in rep order
};

struct LoEnsemble {
    int k = 0;
    int tau = 0;
    std::vector<double> v;
    std::vector<double> h;
};

struct EnsembleSet {
    McConfig config;
    std::vector<std::pair<int, MsmParams>> params; // (k, generating params)
    std::vector<GheEnsemble> ghe;                  // k-major, q-minor
    std::vector<LoEnsemble> lo;                    // k-major, tau-minor
    int excluded = 0;                              // (k, rep) pairs dropped on error
};

// Simulates max(ghe_reps, lo_reps) paths per k; replication r of level k uses
// the seed derive_seed(master_seed, k, r). GHE statistics cover the first
// ghe_reps replications, Lo statistics the first lo_reps. A replication that
// throws is excluded from every ensemble of that k and counted.
EnsembleSet run_ensemble(const std::vector<std::pair<int, MsmParams>>& params_per_k,
                         const McConfig& cfg);

struct McSummary {
    std::string label;
    double mean = 0.0;
    double std_dev = 0.0;
    double quantile_2_5 = 0.0;
    double quantile_97_5 = 0.0;
    int n_reps = 0;
    int reject_95 = -1; // Lo V ensembles only; -1 elsewhere
    int reject_99 = -1;
};

std::vector<McSummary> summarize(const EnsembleSet& set);

// Nearest-rank quantile: the ceil(p*n)-th order statistic.
double nearest_rank_quantile(std::vector<double> values, double p);

// True iff the value lies in [Q2.5%, Q97.5%] of the ensemble (closed).
bool quantile_coincidence(double empirical_value, const std::vector<double>& ensemble);

struct RejectionCell {
    int k = 0;
    int tau = 0;
    int n_reps = 0;
    int reject_95 = 0;
    int reject_99 = 0;
};

std::vector<RejectionCell> rejection_table(const EnsembleSet& set, RejectionSide side);

} // namespace msm
