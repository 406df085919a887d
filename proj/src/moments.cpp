#include "msm/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "msm/errors.hpp"

namespace msm {

namespace {

constexpr double kM0Lo = 1.0 + 1e-6;
constexpr double kM0Hi = 2.0 - 1e-6;
constexpr double kSigmaLo = 1e-10;

void check_lags(const std::vector<int>& lags) {
    if (lags.empty()) throw ValidationError("lags must be non-empty");
    int prev = 0;
    for (int lag : lags) {
        if (lag <= prev) throw ValidationError("lags must be positive and ascending");
        prev = lag;
    }
}

double lambda_of(double m0) { return 0.5 * (std::log(m0) - std::log(2.0 - m0)); }
double dlambda_dm0(double m0) { return 0.5 * (1.0 / m0 + 1.0 / (2.0 - m0)); }

// values = (E[xi^2], cross) per lag then E[r^2]; optional Jacobian wrt (m0, sigma).
void fill_analytic(double m0, int k, double gamma_k, double b, double sigma,
                   const std::vector<int>& lags, std::vector<double>& values,
                   Eigen::MatrixXd* jac) {
    const auto probs = transition_probabilities(k, gamma_k, b);
    const double lam = lambda_of(m0);
    const double dlam = dlambda_dm0(m0);
    const double v = LogAbsNormalMoments::variance;
    values.assign(2 * lags.size() + 1, 0.0);
    if (jac) jac->setZero(static_cast<Eigen::Index>(values.size()), 2);
    for (std::size_t j = 0; j < lags.size(); ++j) {
        const double T = static_cast<double>(lags[j]);
        double sum1 = 0.0, sum2 = 0.0;
        for (double g : probs) {
            const double rho = std::pow(1.0 - g, T);
            sum1 += 1.0 - rho;
            sum2 += (1.0 - rho) * (1.0 - rho);
        }
        values[2 * j] = 0.5 * lam * lam * sum1 + 2.0 * v;
        values[2 * j + 1] = -0.25 * lam * lam * sum2 - v;
        if (jac) {
            (*jac)(static_cast<Eigen::Index>(2 * j), 0) = lam * dlam * sum1;
            (*jac)(static_cast<Eigen::Index>(2 * j + 1), 0) = -0.5 * lam * dlam * sum2;
        }
    }
    values.back() = sigma * sigma;
    if (jac) (*jac)(static_cast<Eigen::Index>(values.size()) - 1, 1) = 2.0 * sigma;
}

// ln|r| with zeros removed; r^2 kept aligned with the compressed series.
struct LogAbsSeries {
    std::vector<double> ln_abs;
    std::vector<double> r2;
    std::size_t dropped = 0;
};

LogAbsSeries log_abs_series(const ReturnSeries& r) {
    validate(r);
    LogAbsSeries out;
    out.ln_abs.reserve(r.values.size());
    out.r2.reserve(r.values.size());
    for (double x : r.values) {
        if (x == 0.0) {
            ++out.dropped;
            continue;
        }
        out.ln_abs.push_back(std::log(std::abs(x)));
        out.r2.push_back(x * x);
    }
    return out;
}

// Newey-West HAC covariance of panel rows centered at their sample mean.
Eigen::MatrixXd hac_covariance(const Eigen::MatrixXd& panel, int max_lag) {
    const Eigen::Index n = panel.rows(), m = panel.cols();
    Eigen::MatrixXd c = panel.rowwise() - panel.colwise().mean();
    Eigen::MatrixXd s = (c.transpose() * c) / static_cast<double>(n);
    for (int j = 1; j <= max_lag; ++j) {
        const double w = 1.0 - static_cast<double>(j) / (max_lag + 1.0);
        Eigen::MatrixXd g = (c.bottomRows(n - j).transpose() * c.topRows(n - j)) / static_cast<double>(n);
        s += w * (g + g.transpose());
    }
    (void)m;
    return s;
}

struct NmOutcome {
    Eigen::Vector2d x;
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

Eigen::Vector2d clamp_point(Eigen::Vector2d x) {
    x[0] = std::clamp(x[0], kM0Lo, kM0Hi);
    x[1] = std::max(x[1], kSigmaLo);
    return x;
}

// Nelder-Mead on (m0, sigma) with projection into the parameter box.
template <class F>
NmOutcome nelder_mead(F&& f, Eigen::Vector2d x0, double tol, int max_iter) {
    std::array<Eigen::Vector2d, 3> xs{clamp_point(x0),
                                      clamp_point(x0 + Eigen::Vector2d(0.08, 0.0)),
                                      clamp_point(x0 + Eigen::Vector2d(0.0, 0.25 * x0[1] + 1e-4))};
    std::array<double, 3> fs{f(xs[0]), f(xs[1]), f(xs[2])};
    NmOutcome out;
    int it = 0;
    auto order = [&] {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int c) { return fs[a] < fs[c]; });
        std::array<Eigen::Vector2d, 3> x2{xs[idx[0]], xs[idx[1]], xs[idx[2]]};
        std::array<double, 3> f2{fs[idx[0]], fs[idx[1]], fs[idx[2]]};
        xs = x2;
        fs = f2;
    };
    for (; it < max_iter; ++it) {
        order();
        if (fs[2] - fs[0] <= tol * (std::abs(fs[0]) + tol)) {
            out.converged = true;
            break;
        }
        const Eigen::Vector2d centroid = 0.5 * (xs[0] + xs[1]);
        const Eigen::Vector2d refl = clamp_point(centroid + (centroid - xs[2]));
        const double f_refl = f(refl);
        if (f_refl < fs[0]) {
            const Eigen::Vector2d exp_pt = clamp_point(centroid + 2.0 * (centroid - xs[2]));
            const double f_exp = f(exp_pt);
            if (f_exp < f_refl) {
                xs[2] = exp_pt;
                fs[2] = f_exp;
            } else {
                xs[2] = refl;
                fs[2] = f_refl;
            }
        } else if (f_refl < fs[1]) {
            xs[2] = refl;
            fs[2] = f_refl;
        } else {
            const Eigen::Vector2d con = clamp_point(centroid + 0.5 * (xs[2] - centroid));
            const double f_con = f(con);
            if (f_con < fs[2]) {
                xs[2] = con;
                fs[2] = f_con;
            } else {
                for (int i = 1; i < 3; ++i) {
                    xs[i] = clamp_point(xs[0] + 0.5 * (xs[i] - xs[0]));
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    order();
    out.x = xs[0];
    out.f = fs[0];
    out.iterations = it;
    return out;
}

Eigen::MatrixXd robust_inverse(const Eigen::MatrixXd& s) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));
        if (inv.allFinite()) return inv;
    }
    // fall back to a ridge for degenerate panels
    const double ridge = 1e-10 * (1.0 + s.trace() / static_cast<double>(s.rows()));
    Eigen::MatrixXd sr = s + ridge * Eigen::MatrixXd::Identity(s.rows(), s.cols());
    return sr.ldlt().solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));
}

} // namespace

MomentVector analytic_moments(double m0, int k, double gamma_k, double b, double sigma,
                              const std::vector<int>& lags) {
    validate(MsmParams{m0, sigma, k, gamma_k, b});
    check_lags(lags);
    MomentVector out;
    out.lags = lags;
    out.kind = MomentKind::analytic;
    fill_analytic(m0, k, gamma_k, b, sigma, lags, out.values, nullptr);
    return out;
}

MomentVector analytic_moments(const MsmParams& p, const std::vector<int>& lags) {
    return analytic_moments(p.m0, p.k, p.gamma_k, p.b, p.sigma, lags);
}

MomentVector empirical_moments(const ReturnSeries& r, const std::vector<int>& lags) {
    check_lags(lags);
    const std::size_t max_lag = static_cast<std::size_t>(lags.back());
    if (r.values.size() <= 2 * max_lag + 10)
        throw ValidationError("series too short for the requested lags");
    LogAbsSeries s = log_abs_series(r);
    const std::size_t n = s.ln_abs.size();
    if (n <= 2 * max_lag || n - 2 * max_lag < 30)
        throw NumericalError("fewer than 30 usable observations after dropping zero returns");

    MomentVector out;
    out.lags = lags;
    out.kind = MomentKind::empirical;
    out.dropped_zero_returns = s.dropped;
    out.values.assign(2 * lags.size() + 1, 0.0);
    for (std::size_t j = 0; j < lags.size(); ++j) {
        const std::size_t T = static_cast<std::size_t>(lags[j]);
        double sum_sq = 0.0;
        for (std::size_t t = T; t < n; ++t) {
            const double xi = s.ln_abs[t] - s.ln_abs[t - T];
            sum_sq += xi * xi;
        }
        out.values[2 * j] = sum_sq / static_cast<double>(n - T);
        double sum_cross = 0.0;
        for (std::size_t t = 2 * T; t < n; ++t) {
            const double xi = s.ln_abs[t] - s.ln_abs[t - T];
            const double xi_prev = s.ln_abs[t - T] - s.ln_abs[t - 2 * T];
            sum_cross += xi * xi_prev;
        }
        out.values[2 * j + 1] = sum_cross / static_cast<double>(n - 2 * T);
    }
    double sum_r2 = 0.0;
    for (double v : s.r2) sum_r2 += v;
    out.values.back() = sum_r2 / static_cast<double>(n);
    return out;
}

GmmResult gmm_estimate(const ReturnSeries& r, int k, const GmmConfig& cfg) {
    check_lags(cfg.lags);
    if (k < 1) throw ValidationError("k must be >= 1");
    const std::size_t max_lag = static_cast<std::size_t>(cfg.lags.back());
    if (r.values.size() <= 2 * max_lag + 10)
        throw ValidationError("series too short for the requested lags");
    LogAbsSeries s = log_abs_series(r);
    const std::size_t n = s.ln_abs.size();
    if (n <= 2 * max_lag || n - 2 * max_lag < 30)
        throw NumericalError("fewer than 30 usable observations after dropping zero returns");

    const std::size_t rows = n - 2 * max_lag;
    const std::size_t m = 2 * cfg.lags.size() + 1;
    Eigen::MatrixXd panel(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));
    for (std::size_t t = 2 * max_lag; t < n; ++t) {
        const Eigen::Index row = static_cast<Eigen::Index>(t - 2 * max_lag);
        for (std::size_t j = 0; j < cfg.lags.size(); ++j) {
            const std::size_t T = static_cast<std::size_t>(cfg.lags[j]);
            const double xi = s.ln_abs[t] - s.ln_abs[t - T];
            const double xi_prev = s.ln_abs[t - T] - s.ln_abs[t - 2 * T];
            panel(row, static_cast<Eigen::Index>(2 * j)) = xi * xi;
            panel(row, static_cast<Eigen::Index>(2 * j + 1)) = xi * xi_prev;
        }
        panel(row, static_cast<Eigen::Index>(m - 1)) = s.r2[t];
    }
    const Eigen::VectorXd data_means = panel.colwise().mean();

    // data moments do not depend on theta, so the HAC covariance is fixed
    const int hac_lag = cfg.hac_lags >= 0
                            ? cfg.hac_lags
                            : static_cast<int>(std::floor(std::pow(static_cast<double>(rows), 0.25)));
    const Eigen::MatrixXd S = hac_covariance(panel, hac_lag);
    const Eigen::MatrixXd S_inv = robust_inverse(S);

    std::vector<double> scratch;
    auto moment_gap = [&](const Eigen::Vector2d& theta) {
        fill_analytic(theta[0], k, cfg.gamma_k, cfg.b, theta[1], cfg.lags, scratch, nullptr);
        Eigen::VectorXd g(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i)
            g[static_cast<Eigen::Index>(i)] = scratch[i] - data_means[static_cast<Eigen::Index>(i)];
        return g;
    };
    auto minimize = [&](const Eigen::MatrixXd& W, const std::vector<Eigen::Vector2d>& starts) {
        NmOutcome best;
        best.x = clamp_point(starts.front());
        int total = 0;
        for (const auto& x0 : starts) {
            NmOutcome o = nelder_mead(
                [&](const Eigen::Vector2d& th) {
                    Eigen::VectorXd g = moment_gap(th);
                    const double q = g.dot(W * g);
                    return std::isfinite(q) ? q : std::numeric_limits<double>::max();
                },
                x0, cfg.tol, cfg.max_iterations);
            total += o.iterations;
            if (o.f < best.f) best = o;
        }
        best.iterations = total;
        return best;
    };

    const double scale = population_std(r.values);
    std::vector<Eigen::Vector2d> starts;
    for (double m0s : cfg.m0_starts)
        for (double f : cfg.sigma_factors) starts.emplace_back(m0s, f * scale);
    if (starts.empty()) throw ValidationError("empty multistart grid");

    NmOutcome stage1 = minimize(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                          static_cast<Eigen::Index>(m)),
                                starts);
    std::vector<Eigen::Vector2d> starts2 = starts;
    starts2.push_back(stage1.x);
    NmOutcome winner = minimize(S_inv, starts2);
    int iterations = stage1.iterations + winner.iterations;
    if (cfg.iterated) {
        // the weighting matrix is data-only, so extra rounds stabilize at once
        for (int stage = 2; stage < cfg.max_stages; ++stage) {
            NmOutcome next = minimize(S_inv, {winner.x});
            iterations += next.iterations;
            const bool stable = (next.x - winner.x).norm() < 1e-6;
            winner = next;
            if (stable) break;
        }
    }

    Eigen::MatrixXd jac;
    fill_analytic(winner.x[0], k, cfg.gamma_k, cfg.b, winner.x[1], cfg.lags, scratch, &jac);
    const Eigen::Matrix2d a = jac.transpose() * S_inv * jac;
    const Eigen::Matrix2d a_inv = a.inverse();
    const Eigen::Matrix2d mid = jac.transpose() * S_inv * S * S_inv * jac;
    const Eigen::Matrix2d var = (a_inv * mid * a_inv) / static_cast<double>(rows);

    GmmResult res;
    res.m0_hat = winner.x[0];
    res.sigma_hat = winner.x[1];
    res.se_m0 = std::sqrt(std::max(var(0, 0), 0.0));
    res.se_sigma = std::sqrt(std::max(var(1, 1), 0.0));
    const Eigen::VectorXd g = moment_gap(winner.x);
    res.j_statistic = static_cast<double>(rows) * g.dot(S_inv * g);
    res.objective = winner.f;
    res.iterations = iterations;
    res.converged = winner.converged;
    res.at_boundary = (winner.x[0] - kM0Lo < 1e-4) || (kM0Hi - winner.x[0] < 1e-4);
    res.n_observations = rows;
    res.dropped_zero_returns = s.dropped;
    return res;
}

} // namespace msm
