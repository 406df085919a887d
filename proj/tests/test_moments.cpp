#include "doctest.h"

#include <cmath>
#include <vector>

#include "msm/moments.hpp"

using namespace msm;

namespace {

// Simpson rule for integrals of f(y) over [a, b].
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

} // namespace

TEST_CASE("log abs normal constants reproduce quadrature to 1e-9") {
    // E[ln|u|] = 2 int_0^inf ln(x) phi(x) dx, substituted x = e^y
    auto mean_integrand = [](double y) { return 2.0 * y * phi(std::exp(y)) * std::exp(y); };
    auto sq_integrand = [](double y) { return 2.0 * y * y * phi(std::exp(y)) * std::exp(y); };
    const double mean = simpson(mean_integrand, -45.0, 4.0, 400000);
    const double second = simpson(sq_integrand, -45.0, 4.0, 400000);
    CHECK(std::abs(mean - LogAbsNormalMoments::mean) < 1e-9);
    CHECK(std::abs(second - mean * mean - LogAbsNormalMoments::variance) < 1e-9);
}

TEST_CASE("analytic moments: m0=1 collapses to the Gaussian noise floor") {
    const std::vector<int> lags{1, 5, 10, 20};
    MomentVector mv = analytic_moments(1.0, 10, 0.5, 2.0, 1.0, lags);
    REQUIRE(mv.values.size() == 9);
    CHECK(mv.kind == MomentKind::analytic);
    for (std::size_t j = 0; j < lags.size(); ++j) {
        CHECK(mv.values[2 * j] == doctest::Approx(2.4674011002723395).epsilon(1e-12));
        CHECK(mv.values[2 * j + 1] == doctest::Approx(-1.2337005501361697).epsilon(1e-12));
    }
    CHECK(mv.values.back() == doctest::Approx(1.0));
}

TEST_CASE("analytic moments: signs and bounds on a parameter grid") {
    const std::vector<int> lags{1, 5, 20};
    for (double m0 : {1.0, 1.1, 1.5, 1.9, 1.99}) {
        for (int k : {1, 5, 10, 20}) {
            MomentVector mv = analytic_moments(m0, k, 0.5, 2.0, 1.0, lags);
            for (std::size_t j = 0; j < lags.size(); ++j) {
                CHECK(mv.values[2 * j] >= 0.0);
                CHECK(mv.values[2 * j + 1] <= -LogAbsNormalMoments::variance + 1e-15);
            }
        }
    }
}

TEST_CASE("analytic moments: increasing in m0 and in k") {
    const std::vector<int> lags{5};
    double prev = 0.0;
    for (double m0 : {1.1, 1.3, 1.5, 1.7, 1.9}) {
        const double v = analytic_moments(m0, 10, 0.5, 2.0, 1.0, lags).values[0];
        CHECK(v > prev);
        prev = v;
    }
    prev = 0.0;
    for (int k : {5, 10, 15, 20}) {
        const double v = analytic_moments(1.5, k, 0.5, 2.0, 1.0, lags).values[0];
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("analytic moments: cascade saturates between k=15 and k=20") {
    std::vector<int> lags;
    for (int t = 1; t <= 20; ++t) lags.push_back(t);
    for (double m0 : {1.5, 1.9}) {
        MomentVector a = analytic_moments(m0, 15, 0.5, 2.0, 1.0, lags);
        MomentVector c = analytic_moments(m0, 20, 0.5, 2.0, 1.0, lags);
        for (std::size_t j = 0; j < lags.size(); ++j) {
            const double rel = (c.values[2 * j] - a.values[2 * j]) / a.values[2 * j];
            CHECK(rel >= 0.0);
            CHECK(rel < 0.01);
        }
    }
}

TEST_CASE("analytic moments: validation") {
    CHECK_THROWS_AS(analytic_moments(2.0, 5, 0.5, 2.0, 1.0, {1}), ValidationError);
    CHECK_THROWS_AS(analytic_moments(1.5, 5, 0.5, 2.0, 1.0, {}), ValidationError);
    CHECK_THROWS_AS(analytic_moments(1.5, 5, 0.5, 2.0, 1.0, {5, 1}), ValidationError);
    CHECK_THROWS_AS(analytic_moments(1.5, 5, 0.5, 2.0, 1.0, {0, 1}), ValidationError);
}

TEST_CASE("empirical moments agree with analytic on a long simulated path") {
    MsmParams p{1.5, 1.0, 10, 0.5, 2.0};
    ReturnSeries r = simulate(p, 1000000, 4242);
    const std::vector<int> lags{1, 5, 20};
    MomentVector emp = empirical_moments(r, lags);
    MomentVector ana = analytic_moments(p, lags);
    REQUIRE(emp.values.size() == ana.values.size());
    for (std::size_t j = 0; j < lags.size(); ++j) {
        CHECK(emp.values[2 * j] == doctest::Approx(ana.values[2 * j]).epsilon(0.03));
        CHECK(std::abs(emp.values[2 * j + 1] - ana.values[2 * j + 1]) < 0.05);
    }
    CHECK(emp.values.back() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("empirical moments: constant magnitude series has zero xi moments") {
    ReturnSeries r;
    for (int i = 0; i < 200; ++i) r.values.push_back(i % 2 ? 0.7 : -0.7);
    MomentVector mv = empirical_moments(r, {1, 5});
    CHECK(mv.values[0] == 0.0);
    CHECK(mv.values[1] == 0.0);
    CHECK(mv.values[2] == 0.0);
    CHECK(mv.values[3] == 0.0);
    CHECK(mv.values.back() == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(mv.dropped_zero_returns == 0);
}

TEST_CASE("empirical moments: zero returns are dropped and counted") {
    Rng rng(3);
    ReturnSeries r;
    for (int i = 0; i < 300; ++i) r.values.push_back(rng.normal());
    r.values[10] = 0.0;
    r.values[150] = 0.0;
    r.values[299] = 0.0;
    MomentVector mv = empirical_moments(r, {1, 5});
    CHECK(mv.dropped_zero_returns == 3);
    CHECK(mv.kind == MomentKind::empirical);
}

TEST_CASE("empirical moments: window and usability guards") {
    Rng rng(4);
    auto make = [&](int n, int zeros) {
        ReturnSeries r;
        for (int i = 0; i < n; ++i) r.values.push_back(i < zeros ? 0.0 : rng.normal());
        return r;
    };
    CHECK_THROWS_AS(empirical_moments(make(50, 0), {20}), ValidationError);
    CHECK_THROWS_AS(empirical_moments(make(60, 0), {20}), NumericalError);
    CHECK_THROWS_AS(empirical_moments(make(100, 40), {20}), NumericalError);
    CHECK_NOTHROW(empirical_moments(make(80, 0), {20}));
}
