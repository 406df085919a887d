#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "msm/data.hpp"
#include "msm/errors.hpp"
#include "msm/model.hpp"
#include "msm/moments.hpp"
#include "msm/monte_carlo.hpp"
#include "msm/report.hpp"
#include "msm/scaling.hpp"
#include "msm/series.hpp"

namespace {

using msm::format_number;
using msm::Table;
using msm::TableMeta;

// ---------------------------------------------------------------------------
// config file
//
// A single flat JSON object; every key mirrors a long flag. Values from the
// file become flag defaults, so explicit flags always win. The file is named
// by --config or the MSM_CONFIG environment variable.

const std::vector<std::string> kConfigKeys = {
    "m0", "sigma", "k", "gamma_k", "b", "T", "burn_in", "seed",
    "format", "transform", "mode", "denominator", "rejection_side",
    "standardize", "iterated", "hac_lags", "threads",
    "k_set", "lags", "q_set", "tau_set", "tau_max_set",
    "reps", "ghe_reps", "lo_reps",
    "csv_delimiter", "csv_has_header", "csv_value_name", "csv_value_column",
    "csv_date_name", "csv_date_column",
};

class ConfigFile {
  public:
    ConfigFile() = default;

    explicit ConfigFile(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw msm::IoError("cannot open config file: " + path);
        try {
            in >> json_;
        } catch (const nlohmann::json::exception& e) {
            throw msm::IoError("config file " + path + ": " + e.what());
        }
        if (!json_.is_object()) throw msm::IoError("config file " + path + ": expected a JSON object");
        for (const auto& [key, _] : json_.items()) {
            bool known = false;
            for (const auto& k : kConfigKeys) known = known || k == key;
            if (!known) throw msm::ValidationError("unknown config key: " + key);
        }
    }

    template <typename T>
    void apply(const char* key, T& target) const {
        if (!json_.contains(key)) return;
        try {
            target = json_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw msm::ValidationError(std::string("config key '") + key + "' has the wrong type");
        }
    }

  private:
    nlohmann::json json_;
};

std::string find_config_path(int argc, char** argv) {
    std::string path;
    if (const char* env = std::getenv("MSM_CONFIG")) path = env;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    return path;
}

// ---------------------------------------------------------------------------
// shared option bundles

struct OutputOpts {
    std::string format = "csv";
    std::string out; // empty or "-": stdout
};

struct CsvOpts {
    std::string delimiter = ",";
    bool has_header = true;
    std::string value_name;
    int value_column = -1;
    std::string date_name;
    int date_column = -1;

    msm::CsvSpec spec() const {
        if (delimiter.size() != 1) throw msm::ValidationError("csv_delimiter must be one character");
        msm::CsvSpec s;
        s.delimiter = delimiter[0];
        s.has_header = has_header;
        s.value_name = value_name;
        s.value_column = value_column;
        s.date_name = date_name;
        s.date_column = date_column;
        return s;
    }
};

void add_output_opts(CLI::App* cmd, OutputOpts& o, const ConfigFile& cfg) {
    cfg.apply("format", o.format);
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "Output file (default: stdout)");
}

void apply_csv_opts(CsvOpts& c, const ConfigFile& cfg) {
    cfg.apply("csv_delimiter", c.delimiter);
    cfg.apply("csv_has_header", c.has_header);
    cfg.apply("csv_value_name", c.value_name);
    cfg.apply("csv_value_column", c.value_column);
    cfg.apply("csv_date_name", c.date_name);
    cfg.apply("csv_date_column", c.date_column);
}

msm::ReturnSeries load_returns(const std::string& input, const std::string& transform,
                               const CsvOpts& csv, std::size_t* skipped = nullptr) {
    const msm::LoadResult loaded = msm::load_csv(input, csv.spec());
    if (skipped) *skipped = loaded.skipped_rows;
    if (transform == "none") {
        msm::ReturnSeries r;
        r.values = loaded.series.values;
        r.transform = msm::Transform::raw;
        r.label = loaded.series.label;
        msm::validate(r);
        return r;
    }
    const auto t = transform == "log" ? msm::Transform::log_diff : msm::Transform::diff;
    return msm::to_returns(loaded.series, t);
}

void emit(const OutputOpts& o, const std::vector<Table>& tables, const TableMeta& meta) {
    std::ostringstream body;
    if (o.format == "json")
        msm::write_json(body, tables, meta);
    else
        msm::write_csv(body, tables, meta);
    if (o.out.empty() || o.out == "-") {
        std::cout << body.str();
        return;
    }
    std::ofstream ofs(o.out, std::ios::binary);
    if (!ofs) throw msm::IoError("cannot open output file: " + o.out);
    ofs << body.str();
    ofs.flush();
    if (!ofs.good()) throw msm::IoError("failed writing output file: " + o.out);
}

// ---------------------------------------------------------------------------
// canonical config text, hashed into every output header

class ConfigText {
  public:
    explicit ConfigText(const std::string& cmd) { add("cmd", cmd); }

    void add(const std::string& key, const std::string& v) { text_ += key + "=" + v + "\n"; }
    void add(const std::string& key, double v) { add(key, format_number(v)); }
    void add(const std::string& key, int v) { add(key, std::to_string(v)); }
    void add(const std::string& key, std::uint64_t v) { add(key, std::to_string(v)); }
    void add(const std::string& key, bool v) { add(key, std::string(v ? "1" : "0")); }
    void add(const std::string& key, const std::vector<int>& v) { add(key, join(v)); }
    void add(const std::string& key, const std::vector<double>& v) { add(key, join(v)); }

    void add_csv(const CsvOpts& c) {
        add("csv_delimiter", c.delimiter);
        add("csv_has_header", c.has_header);
        add("csv_value_name", c.value_name);
        add("csv_value_column", c.value_column);
        add("csv_date_name", c.date_name);
        add("csv_date_column", c.date_column);
    }

    std::string hash() const { return msm::hex64(msm::fnv1a64(text_)); }

  private:
    template <typename T>
    static std::string join(const std::vector<T>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            if constexpr (std::is_same_v<T, double>)
                s += format_number(v[i]);
            else
                s += std::to_string(v[i]);
        }
        return s;
    }

    std::string text_;
};

TableMeta make_meta(std::uint64_t seed, const ConfigText& cfg) {
    TableMeta m;
    m.version = MSM_VERSION;
    m.seed = seed;
    m.config_hash = cfg.hash();
    return m;
}

// ---------------------------------------------------------------------------
// table builders

Table estimates_table(const std::vector<std::pair<int, msm::GmmResult>>& fits) {
    Table t;
    t.name = "estimates";
    t.columns = {"k",  "m0_hat",    "sigma_hat",   "se_m0",        "se_sigma",
                 "j_stat", "objective", "iterations",  "converged",    "at_boundary",
                 "n_obs",  "dropped_zero_returns"};
    for (const auto& [k, r] : fits) {
        t.rows.push_back({std::to_string(k), format_number(r.m0_hat), format_number(r.sigma_hat),
                          format_number(r.se_m0), format_number(r.se_sigma),
                          format_number(r.j_statistic), format_number(r.objective),
                          std::to_string(r.iterations), r.converged ? "1" : "0",
                          r.at_boundary ? "1" : "0", std::to_string(r.n_observations),
                          std::to_string(r.dropped_zero_returns)});
    }
    return t;
}

struct EnsembleStats {
    double mean = 0, sd = 0, q_lo = 0, q_hi = 0;
};

EnsembleStats ensemble_stats(const std::vector<double>& xs) {
    EnsembleStats s;
    if (xs.empty()) return s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size()));
    s.q_lo = msm::nearest_rank_quantile(xs, 0.025);
    s.q_hi = msm::nearest_rank_quantile(xs, 0.975);
    return s;
}

// ---------------------------------------------------------------------------
// subcommands

struct SimulateArgs {
    double m0 = 1.5, sigma = 1.0, gamma_k = 0.5, b = 2.0;
    int k = 10;
    std::size_t T = 9372, burn_in = 0;
    std::uint64_t seed = 42;
    OutputOpts out;
};

int run_simulate(const SimulateArgs& a) {
    msm::MsmParams p;
    p.m0 = a.m0;
    p.sigma = a.sigma;
    p.k = a.k;
    p.gamma_k = a.gamma_k;
    p.b = a.b;
    const msm::ReturnSeries r = msm::simulate(p, a.T, a.seed, a.burn_in);

    ConfigText cfg("simulate");
    cfg.add("T", a.T);
    cfg.add("b", a.b);
    cfg.add("burn_in", a.burn_in);
    cfg.add("format", a.out.format);
    cfg.add("gamma_k", a.gamma_k);
    cfg.add("k", a.k);
    cfg.add("m0", a.m0);
    cfg.add("seed", a.seed);
    cfg.add("sigma", a.sigma);

    Table t;
    t.name = "returns";
    t.columns = {"t", "r"};
    for (std::size_t i = 0; i < r.values.size(); ++i)
        t.rows.push_back({std::to_string(i + 1), msm::format_number_exact(r.values[i])});
    emit(a.out, {t}, make_meta(a.seed, cfg));
    return 0;
}

struct EstimateArgs {
    std::string input;
    std::string transform = "none";
    std::vector<int> k_set{5, 10, 15, 20};
    std::vector<int> lags{1, 5, 10, 20};
    bool standardize = true;
    bool iterated = false;
    int hac_lags = -1;
    std::uint64_t seed = 42;
    CsvOpts csv;
    OutputOpts out;
};

int run_estimate(const EstimateArgs& a) {
    std::size_t skipped = 0;
    msm::ReturnSeries r = load_returns(a.input, a.transform, a.csv, &skipped);
    if (a.standardize) r = msm::standardize(r);

    msm::GmmConfig gc;
    gc.lags = a.lags;
    gc.iterated = a.iterated;
    gc.hac_lags = a.hac_lags;
    std::vector<std::pair<int, msm::GmmResult>> fits;
    for (int k : a.k_set) fits.emplace_back(k, msm::gmm_estimate(r, k, gc));

    ConfigText cfg("estimate");
    cfg.add("format", a.out.format);
    cfg.add("hac_lags", a.hac_lags);
    cfg.add("iterated", a.iterated);
    cfg.add("k_set", a.k_set);
    cfg.add("lags", a.lags);
    cfg.add("standardize", a.standardize);
    cfg.add("transform", a.transform);
    cfg.add_csv(a.csv);

    TableMeta meta = make_meta(a.seed, cfg);
    meta.extra = {{"input", r.label},
                  {"n_obs", std::to_string(r.values.size())},
                  {"skipped_rows", std::to_string(skipped)}};
    emit(a.out, {estimates_table(fits)}, meta);
    return 0;
}

struct ScalingArgs {
    std::string input;
    std::string transform = "none";
    std::string mode = "integrated";
    std::string denominator = "newey_west";
    std::vector<double> q_set{1.0, 2.0};
    std::vector<int> tau_set{0, 5, 10, 25, 50, 100};
    std::vector<int> tau_max_set = msm::default_tau_max_set();
    std::uint64_t seed = 42;
    CsvOpts csv;
    OutputOpts out;
};

msm::GheMode parse_mode(const std::string& s) {
    return s == "raw" ? msm::GheMode::raw : msm::GheMode::integrated;
}

msm::LoDenominator parse_denominator(const std::string& s) {
    return s == "newey_west_zero_lag" ? msm::LoDenominator::newey_west_zero_lag
                                      : msm::LoDenominator::newey_west;
}

int run_scaling(const ScalingArgs& a) {
    std::size_t skipped = 0;
    const msm::ReturnSeries r = load_returns(a.input, a.transform, a.csv, &skipped);
    const msm::GheMode mode = parse_mode(a.mode);
    const msm::LoDenominator den = parse_denominator(a.denominator);

    Table ghe;
    ghe.name = "ghe";
    ghe.columns = {"q", "h", "h_std", "mode"};
    for (double q : a.q_set) {
        const msm::GheResult g = msm::ghe_averaged(r, q, a.tau_max_set, mode);
        ghe.rows.push_back({format_number(q), format_number(g.h), format_number(g.h_std),
                            msm::to_string(mode)});
    }

    std::vector<double> abs_r(r.values.size());
    for (std::size_t i = 0; i < abs_r.size(); ++i) abs_r[i] = std::abs(r.values[i]);
    Table lo;
    lo.name = "lo";
    lo.columns = {"tau", "q_stat", "v_stat", "h", "reject_95", "reject_99", "denominator"};
    for (int tau : a.tau_set) {
        const msm::LoResult l = msm::lo_statistic(abs_r, tau, den);
        lo.rows.push_back({std::to_string(tau), format_number(l.q_stat), format_number(l.v_stat),
                           format_number(l.h), l.reject_95 ? "1" : "0", l.reject_99 ? "1" : "0",
                           msm::to_string(den)});
    }

    ConfigText cfg("scaling");
    cfg.add("denominator", a.denominator);
    cfg.add("format", a.out.format);
    cfg.add("mode", a.mode);
    cfg.add("q_set", a.q_set);
    cfg.add("tau_max_set", a.tau_max_set);
    cfg.add("tau_set", a.tau_set);
    cfg.add("transform", a.transform);
    cfg.add_csv(a.csv);

    TableMeta meta = make_meta(a.seed, cfg);
    meta.extra = {{"input", r.label},
                  {"n_obs", std::to_string(r.values.size())},
                  {"skipped_rows", std::to_string(skipped)}};
    emit(a.out, {ghe, lo}, meta);
    return 0;
}

struct McCompareArgs {
    std::string input;
    std::string transform = "none";
    std::vector<int> k_set{5, 10, 15, 20};
    std::vector<int> lags{1, 5, 10, 20};
    std::vector<double> q_set{1.0, 2.0};
    std::vector<int> tau_set{0, 5, 10, 25, 50, 100};
    std::vector<int> tau_max_set = msm::default_tau_max_set();
    std::string mode = "integrated";
    std::string denominator = "newey_west_zero_lag";
    std::string side = "above";
    int reps = -1; // when >= 0, sets both ghe_reps and lo_reps
    int ghe_reps = 100;
    int lo_reps = 1000;
    std::size_t T = 0; // 0: match the input length
    bool iterated = false;
    int hac_lags = -1;
    int threads = 0;
    std::uint64_t seed = 42;
    CsvOpts csv;
    OutputOpts out;
};

int run_mc_compare(const McCompareArgs& a) {
    std::size_t skipped = 0;
    msm::ReturnSeries r = load_returns(a.input, a.transform, a.csv, &skipped);
    r = msm::standardize(r);

    const int ghe_reps = a.reps >= 0 ? a.reps : a.ghe_reps;
    const int lo_reps = a.reps >= 0 ? a.reps : a.lo_reps;

    msm::GmmConfig gc;
    gc.lags = a.lags;
    gc.iterated = a.iterated;
    gc.hac_lags = a.hac_lags;
    std::vector<std::pair<int, msm::GmmResult>> fits;
    std::vector<std::pair<int, msm::MsmParams>> params;
    for (int k : a.k_set) {
        const msm::GmmResult fit = msm::gmm_estimate(r, k, gc);
        fits.emplace_back(k, fit);
        msm::MsmParams p;
        p.m0 = fit.m0_hat;
        p.sigma = fit.sigma_hat;
        p.k = k;
        params.emplace_back(k, p);
    }

    msm::McConfig mc;
    mc.ghe_reps = ghe_reps;
    mc.lo_reps = lo_reps;
    mc.T = a.T > 0 ? a.T : r.values.size();
    mc.k_set = a.k_set;
    mc.tau_set = a.tau_set;
    mc.q_set = a.q_set;
    mc.tau_max_set = a.tau_max_set;
    mc.ghe_mode = parse_mode(a.mode);
    mc.lo_denominator = parse_denominator(a.denominator);
    mc.rejection_side = a.side == "outside" ? msm::RejectionSide::outside : msm::RejectionSide::above;
    mc.master_seed = a.seed;
    mc.threads = a.threads;
    const msm::EnsembleSet set = msm::run_ensemble(params, mc);

    // empirical statistics on the input series
    std::vector<double> emp_h(a.q_set.size());
    for (std::size_t i = 0; i < a.q_set.size(); ++i)
        emp_h[i] = msm::ghe_averaged(r, a.q_set[i], a.tau_max_set, mc.ghe_mode).h;
    std::vector<double> abs_r(r.values.size());
    for (std::size_t i = 0; i < abs_r.size(); ++i) abs_r[i] = std::abs(r.values[i]);
    std::vector<msm::LoResult> emp_lo;
    for (int tau : a.tau_set) emp_lo.push_back(msm::lo_statistic(abs_r, tau, mc.lo_denominator));

    Table ghe_cmp;
    ghe_cmp.name = "ghe_compare";
    ghe_cmp.columns = {"k",    "q",     "empirical_h", "sim_mean", "sim_std",
                       "q2_5", "q97_5", "n_reps",      "coincident"};
    for (const auto& e : set.ghe) {
        std::size_t qi = 0;
        while (qi < a.q_set.size() && a.q_set[qi] != e.q) ++qi;
        const EnsembleStats s = ensemble_stats(e.h);
        const bool hit = msm::quantile_coincidence(emp_h[qi], e.h);
        ghe_cmp.rows.push_back({std::to_string(e.k), format_number(e.q), format_number(emp_h[qi]),
                                format_number(s.mean), format_number(s.sd), format_number(s.q_lo),
                                format_number(s.q_hi), std::to_string(e.h.size()),
                                hit ? "1" : "0"});
    }

    Table lo_v, lo_h;
    lo_v.name = "lo_v_compare";
    lo_v.columns = {"k",    "tau",   "empirical_v", "sim_mean", "sim_std",
                    "q2_5", "q97_5", "n_reps",      "coincident"};
    lo_h.name = "lo_h_compare";
    lo_h.columns = {"k",    "tau",   "empirical_h", "sim_mean", "sim_std",
                    "q2_5", "q97_5", "n_reps",      "coincident"};
    for (const auto& e : set.lo) {
        std::size_t ti = 0;
        while (ti < a.tau_set.size() && a.tau_set[ti] != e.tau) ++ti;
        const EnsembleStats sv = ensemble_stats(e.v);
        const EnsembleStats sh = ensemble_stats(e.h);
        const bool hit_v = msm::quantile_coincidence(emp_lo[ti].v_stat, e.v);
        const bool hit_h = msm::quantile_coincidence(emp_lo[ti].h, e.h);
        lo_v.rows.push_back({std::to_string(e.k), std::to_string(e.tau),
                             format_number(emp_lo[ti].v_stat), format_number(sv.mean),
                             format_number(sv.sd), format_number(sv.q_lo), format_number(sv.q_hi),
                             std::to_string(e.v.size()), hit_v ? "1" : "0"});
        lo_h.rows.push_back({std::to_string(e.k), std::to_string(e.tau),
                             format_number(emp_lo[ti].h), format_number(sh.mean),
                             format_number(sh.sd), format_number(sh.q_lo), format_number(sh.q_hi),
                             std::to_string(e.h.size()), hit_h ? "1" : "0"});
    }

    Table rej;
    rej.name = "rejections";
    rej.columns = {"k", "tau", "n_reps", "reject_95_rate", "reject_99_rate", "side"};
    for (const auto& cell : msm::rejection_table(set, mc.rejection_side)) {
        const double n = cell.n_reps > 0 ? static_cast<double>(cell.n_reps) : 1.0;
        rej.rows.push_back({std::to_string(cell.k), std::to_string(cell.tau),
                            std::to_string(cell.n_reps), format_number(cell.reject_95 / n),
                            format_number(cell.reject_99 / n), msm::to_string(mc.rejection_side)});
    }

    ConfigText cfg("mc-compare");
    cfg.add("T", mc.T);
    cfg.add("denominator", a.denominator);
    cfg.add("format", a.out.format);
    cfg.add("ghe_reps", ghe_reps);
    cfg.add("hac_lags", a.hac_lags);
    cfg.add("iterated", a.iterated);
    cfg.add("k_set", a.k_set);
    cfg.add("lags", a.lags);
    cfg.add("lo_reps", lo_reps);
    cfg.add("mode", a.mode);
    cfg.add("q_set", a.q_set);
    cfg.add("rejection_side", a.side);
    cfg.add("seed", a.seed);
    cfg.add("tau_max_set", a.tau_max_set);
    cfg.add("tau_set", a.tau_set);
    cfg.add("transform", a.transform);
    cfg.add_csv(a.csv);

    TableMeta meta = make_meta(a.seed, cfg);
    meta.extra = {{"input", r.label},
                  {"n_obs", std::to_string(r.values.size())},
                  {"skipped_rows", std::to_string(skipped)},
                  {"excluded", std::to_string(set.excluded)}};
    emit(a.out, {estimates_table(fits), ghe_cmp, lo_v, lo_h, rej}, meta);
    return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    const ConfigFile cfg = [&] {
        const std::string path = find_config_path(argc, argv);
        return path.empty() ? ConfigFile() : ConfigFile(path);
    }();

    CLI::App app{"Markov-switching multifractal volatility toolkit"};
    app.set_version_flag("--version", std::string(MSM_VERSION));
    app.require_subcommand(1);
    app.fallthrough(); // parent options like --config may follow the subcommand
    std::string config_path_dummy;
    app.add_option("--config", config_path_dummy,
                   "JSON config file with flag defaults (env: MSM_CONFIG); flags win")
        ->envname("MSM_CONFIG");

    SimulateArgs sim;
    cfg.apply("m0", sim.m0);
    cfg.apply("sigma", sim.sigma);
    cfg.apply("k", sim.k);
    cfg.apply("gamma_k", sim.gamma_k);
    cfg.apply("b", sim.b);
    cfg.apply("T", sim.T);
    cfg.apply("burn_in", sim.burn_in);
    cfg.apply("seed", sim.seed);
    CLI::App* c_sim = app.add_subcommand("simulate", "Simulate a return series");
    c_sim->add_option("--m0", sim.m0, "Multiplier low state, in [1,2)")->capture_default_str();
    c_sim->add_option("--sigma", sim.sigma, "Unconditional volatility scale")->capture_default_str();
    c_sim->add_option("--k", sim.k, "Number of volatility components")->capture_default_str();
    c_sim->add_option("--gamma-k", sim.gamma_k, "Renewal probability of the fastest component")
        ->capture_default_str();
    c_sim->add_option("--b", sim.b, "Frequency growth factor")->capture_default_str();
    c_sim->add_option("-T,--length", sim.T, "Series length")->capture_default_str();
    c_sim->add_option("--burn-in", sim.burn_in, "Steps discarded before recording")
        ->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    add_output_opts(c_sim, sim.out, cfg);

    EstimateArgs est;
    cfg.apply("transform", est.transform);
    cfg.apply("k_set", est.k_set);
    cfg.apply("lags", est.lags);
    cfg.apply("standardize", est.standardize);
    cfg.apply("iterated", est.iterated);
    cfg.apply("hac_lags", est.hac_lags);
    cfg.apply("seed", est.seed);
    apply_csv_opts(est.csv, cfg);
    CLI::App* c_est = app.add_subcommand("estimate", "GMM estimation of (m0, sigma) per k");
    c_est->add_option("--input", est.input, "Input CSV")->required();
    c_est->add_option("--transform", est.transform,
                      "Price-to-return transform; 'none' reads the column as returns")
        ->check(CLI::IsMember({"log", "diff", "none"}))
        ->capture_default_str();
    c_est->add_option("--k", est.k_set, "Component counts to fit")
        ->delimiter(',')
        ->capture_default_str();
    c_est->add_option("--lags", est.lags, "Autocovariance lags in the moment vector")
        ->delimiter(',')
        ->capture_default_str();
    c_est->add_flag("--standardize,!--no-standardize", est.standardize,
                    "Scale returns to unit variance before fitting")
        ->capture_default_str();
    c_est->add_flag("--iterated", est.iterated, "Iterate the weighting matrix to convergence");
    c_est->add_option("--hac-lags", est.hac_lags, "HAC truncation lag (-1: automatic)")
        ->capture_default_str();
    c_est->add_option("--seed", est.seed, "Recorded in the output header")->capture_default_str();
    add_output_opts(c_est, est.out, cfg);

    ScalingArgs sca;
    cfg.apply("transform", sca.transform);
    cfg.apply("mode", sca.mode);
    cfg.apply("denominator", sca.denominator);
    cfg.apply("q_set", sca.q_set);
    cfg.apply("tau_set", sca.tau_set);
    cfg.apply("tau_max_set", sca.tau_max_set);
    cfg.apply("seed", sca.seed);
    apply_csv_opts(sca.csv, cfg);
    CLI::App* c_sca = app.add_subcommand("scaling", "Generalized Hurst exponents and modified R/S");
    c_sca->add_option("--input", sca.input, "Input CSV")->required();
    c_sca->add_option("--transform", sca.transform,
                      "Price-to-return transform; 'none' reads the column as returns")
        ->check(CLI::IsMember({"log", "diff", "none"}))
        ->capture_default_str();
    c_sca->add_option("--mode", sca.mode, "Signal handed to the Hurst regression")
        ->check(CLI::IsMember({"integrated", "raw"}))
        ->capture_default_str();
    c_sca->add_option("--denominator", sca.denominator, "Modified R/S denominator variant")
        ->check(CLI::IsMember({"newey_west", "newey_west_zero_lag"}))
        ->capture_default_str();
    c_sca->add_option("--q", sca.q_set, "Moment orders")->delimiter(',')->capture_default_str();
    c_sca->add_option("--tau", sca.tau_set, "R/S truncation lags")
        ->delimiter(',')
        ->capture_default_str();
    c_sca->add_option("--tau-max", sca.tau_max_set, "Hurst regression horizon grid")
        ->delimiter(',')
        ->capture_default_str();
    c_sca->add_option("--seed", sca.seed, "Recorded in the output header")->capture_default_str();
    add_output_opts(c_sca, sca.out, cfg);

    McCompareArgs mcc;
    cfg.apply("transform", mcc.transform);
    cfg.apply("k_set", mcc.k_set);
    cfg.apply("lags", mcc.lags);
    cfg.apply("q_set", mcc.q_set);
    cfg.apply("tau_set", mcc.tau_set);
    cfg.apply("tau_max_set", mcc.tau_max_set);
    cfg.apply("mode", mcc.mode);
    cfg.apply("denominator", mcc.denominator);
    cfg.apply("rejection_side", mcc.side);
    cfg.apply("reps", mcc.reps);
    cfg.apply("ghe_reps", mcc.ghe_reps);
    cfg.apply("lo_reps", mcc.lo_reps);
    cfg.apply("T", mcc.T);
    cfg.apply("iterated", mcc.iterated);
    cfg.apply("hac_lags", mcc.hac_lags);
    cfg.apply("threads", mcc.threads);
    cfg.apply("seed", mcc.seed);
    apply_csv_opts(mcc.csv, cfg);
    CLI::App* c_mcc = app.add_subcommand(
        "mc-compare", "Fit per k, simulate ensembles at the fitted parameters, compare");
    c_mcc->add_option("--input", mcc.input, "Input CSV")->required();
    c_mcc->add_option("--transform", mcc.transform,
                      "Price-to-return transform; 'none' reads the column as returns")
        ->check(CLI::IsMember({"log", "diff", "none"}))
        ->capture_default_str();
    c_mcc->add_option("--k", mcc.k_set, "Component counts")->delimiter(',')->capture_default_str();
    c_mcc->add_option("--lags", mcc.lags, "Autocovariance lags in the moment vector")
        ->delimiter(',')
        ->capture_default_str();
    c_mcc->add_option("--reps", mcc.reps, "Replications for both ensembles (overrides the split)")
        ->capture_default_str();
    c_mcc->add_option("--ghe-reps", mcc.ghe_reps, "Replications for the Hurst ensemble")
        ->capture_default_str();
    c_mcc->add_option("--lo-reps", mcc.lo_reps, "Replications for the R/S ensemble")
        ->capture_default_str();
    c_mcc->add_option("-T,--length", mcc.T, "Simulated path length (0: match the input)")
        ->capture_default_str();
    c_mcc->add_option("--q", mcc.q_set, "Moment orders")->delimiter(',')->capture_default_str();
    c_mcc->add_option("--tau", mcc.tau_set, "R/S truncation lags")
        ->delimiter(',')
        ->capture_default_str();
    c_mcc->add_option("--tau-max", mcc.tau_max_set, "Hurst regression horizon grid")
        ->delimiter(',')
        ->capture_default_str();
    c_mcc->add_option("--mode", mcc.mode, "Signal handed to the Hurst regression")
        ->check(CLI::IsMember({"integrated", "raw"}))
        ->capture_default_str();
    c_mcc->add_option("--denominator", mcc.denominator, "Modified R/S denominator variant")
        ->check(CLI::IsMember({"newey_west", "newey_west_zero_lag"}))
        ->capture_default_str();
    c_mcc->add_option("--side", mcc.side, "Rejection counting rule")
        ->check(CLI::IsMember({"above", "outside"}))
        ->capture_default_str();
    c_mcc->add_flag("--iterated", mcc.iterated, "Iterate the weighting matrix to convergence");
    c_mcc->add_option("--hac-lags", mcc.hac_lags, "HAC truncation lag (-1: automatic)")
        ->capture_default_str();
    c_mcc->add_option("--threads", mcc.threads, "Worker threads (0: hardware)")
        ->capture_default_str();
    c_mcc->add_option("--seed", mcc.seed, "Master seed")->capture_default_str();
    add_output_opts(c_mcc, mcc.out, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help, --version
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (app.got_subcommand(c_sim)) return run_simulate(sim);
    if (app.got_subcommand(c_est)) return run_estimate(est);
    if (app.got_subcommand(c_sca)) return run_scaling(sca);
    return run_mc_compare(mcc);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const msm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const msm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const msm::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
