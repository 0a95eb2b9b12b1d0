#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqzoms/model.hpp"

using namespace sqz;
using std::numbers::pi;

namespace {

SystemConfig point(double Delta_c, double Lambda)
{
    SystemConfig c;
    c.Delta_c = Delta_c;
    c.Lambda = Lambda;
    return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// the expanded printed form, term by term
double N_s_expanded(double rd, double re, double Phi)
{
    const double a = std::sinh(rd) * std::cosh(re), b = std::cosh(rd) * std::sinh(re);
    return a * a + b * b + 0.5 * std::cos(Phi) * std::sinh(2 * rd) * std::sinh(2 * re);
}

} // namespace

TEST_CASE("squeezing parameter and frequency")
{
    auto sq = derive_squeezing(point(4000, 0));
    CHECK(sq.r_d == 0.0);
    CHECK(sq.omega_s == doctest::Approx(4000));
    CHECK(sq.F == 0.0);

    sq = derive_squeezing(point(4000, 1000));
    CHECK(rel(sq.r_d, std::log(3.0) / 4) < 1e-14);
    CHECK(std::abs(sq.r_d - 0.2746531) < 1e-7);

    sq = derive_squeezing(point(4000.4, 2000));
    CHECK(std::abs(sq.r_d - 2.475884) < 1e-6);
    CHECK(rel(sq.omega_s, std::sqrt(4000.4 * 4000.4 - 4000.0 * 4000.0)) < 1e-10);
    CHECK(std::abs(sq.omega_s - 56.5699) < 1e-4);
    CHECK(rel(sq.F, 0.005 * std::pow(std::sinh(sq.r_d), 2)) < 1e-14);
}

TEST_CASE("stability domain")
{
    CHECK_THROWS_AS(derive_squeezing(point(4000, 2000)), StabilityError);
    CHECK_THROWS_AS(couplings(point(10, 6)), StabilityError);
    try {
        derive(point(20, 10));
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK(std::string(e.what()).find("Delta_c > 2 Lambda") != std::string::npos);
    }
}

TEST_CASE("couplings in both algebraic forms")
{
    auto c = couplings(point(4000, 0));
    CHECK(c.g_s == doctest::Approx(0.005));
    CHECK(c.g_p == 0.0);

    c = couplings(point(4000, 1000));
    CHECK(rel(c.g_s, 20.0 / std::sqrt(12e6)) < 1e-12);
    CHECK(std::abs(c.g_s - 0.0057735) < 1e-7);
    CHECK(std::abs(c.g_p - 0.0028868) < 1e-7);

    const auto cfg = point(4000.4, 2000);
    c = couplings(cfg);
    const auto h = couplings_from_squeezing(cfg.g0, derive_squeezing(cfg).r_d);
    CHECK(std::abs(c.g_s - 0.35358) < 1e-5);
    CHECK(std::abs(c.g_p - 0.35354) < 1e-5);
    CHECK(rel(c.g_s, h.g_s) < 1e-10);
    CHECK(rel(c.g_p, h.g_p) < 1e-10);
    CHECK(c.g_s / cfg.kappa == doctest::Approx(7.07).epsilon(1e-3));
}

TEST_CASE("hyperbolic identities on a grid")
{
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            SystemConfig c;
            c.Delta_c = 0.1 + 50.0 * i;
            c.Lambda = (c.Delta_c / 2) * (1 - std::pow(10.0, -0.1 * j));
            const auto d = derive(c);
            CHECK(rel(d.g_s * d.g_s - d.g_p * d.g_p, c.g0 * c.g0) < 1e-10);
            CHECK(rel(d.omega_s, std::sqrt(c.Delta_c * c.Delta_c - 4 * c.Lambda * c.Lambda)) < 1e-10);
            CHECK(d.g_s >= c.g0 * (1 - 1e-15));
        }
}

TEST_CASE("bath moments")
{
    auto b = bath_moments(0.0, 0.0);
    CHECK(b.N == 0.0);
    CHECK(std::abs(b.M) == 0.0);

    b = bath_moments(1.0, 0.0);
    CHECK(std::abs(b.N - 1.38109) < 1e-5);
    CHECK(std::abs(b.M.real() - 1.81343) < 1e-5);
    CHECK(std::abs(std::norm(b.M) - b.N * (b.N + 1)) < 1e-12);

    const auto q = bath_moments(1.0, pi / 2);
    CHECK(std::abs(q.M) == doctest::Approx(std::abs(b.M)));
    CHECK(std::arg(q.M) == doctest::Approx(pi / 2));
}

TEST_CASE("effective bath")
{
    for (double r : {0.1, 1.0, 2.5}) {
        const auto e = effective_bath(r, r, pi, 0.3);
        CHECK(std::abs(e.N) < 1e-12);
        CHECK(std::abs(e.M) < 1e-12);
    }
    for (double re : {0.0, 0.4, 1.3}) {
        const auto e = effective_bath(0.0, re, 0.7, 0.0);
        const auto b = bath_moments(re, 0.7);
        CHECK(std::abs(e.N - b.N) < 1e-14);
        CHECK(std::abs(e.M - b.M) < 1e-14);
    }
    const auto e = effective_bath(1.0, 1.0, 0.0, 0.0);
    CHECK(std::abs(e.N - std::pow(std::sinh(2.0), 2)) < 1e-10);
    CHECK(std::abs(e.N - 13.15412) < 1e-4);
}

TEST_CASE("effective bath matches the expanded form and stays pure")
{
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k) {
                const double rd = 0.15 * i, re = 0.15 * j, Phi = 2 * pi * k / 20.0;
                const auto e = effective_bath(rd, re, Phi, 0.4);
                CHECK(e.N >= 0.0);
                CHECK(std::abs(e.N - N_s_expanded(rd, re, Phi)) <= 1e-13 * (1 + std::pow(std::cosh(rd) * std::cosh(re), 2)));
                CHECK(std::abs(std::norm(e.M) - e.N * (e.N + 1)) <= 1e-9 * (1 + e.N * e.N));
            }
}

TEST_CASE("simplified matched forms")
{
    for (int i = 0; i <= 60; ++i)
        for (int k = 0; k <= 120; ++k) {
            const double r = 0.05 * i, Phi = 2 * pi * k / 120.0;
            const auto full = effective_bath(r, r, Phi, 0.9);
            const auto simple = matched_effective_bath(r, Phi, 0.9);
            const double scale = 1 + full.N;
            CHECK(std::abs(full.N - simple.N) <= 1e-12 * scale);
            CHECK(std::abs(full.M - simple.M) <= 1e-12 * scale);
        }
}

TEST_CASE("noise symmetry in the phase")
{
    for (double rd : {0.3, 1.0})
        for (double dr : {0.0, 0.2})
            for (double Phi : {0.1, 1.0, 2.5, 3.0}) {
                const double n = effective_bath(rd, rd + dr, Phi, 0.0).N;
                CHECK(std::abs(n - effective_bath(rd, rd + dr, -Phi, 0.0).N) < 1e-12 * (1 + n));
                CHECK(std::abs(n - effective_bath(rd, rd + dr, 2 * pi - Phi, 0.0).N) < 1e-12 * (1 + n));
            }
    // matched: minimum over Phi at pi
    double best = 1e300, argbest = 0;
    for (int k = 0; k <= 400; ++k) {
        const double Phi = 2 * pi * k / 400.0;
        const double n = effective_bath(1.0, 1.0, Phi, 0.0).N;
        if (n < best) best = n, argbest = Phi;
    }
    CHECK(argbest == doctest::Approx(pi));
    // monotone in |delta_r| at Phi = pi
    double prev = -1;
    for (int k = 0; k <= 50; ++k) {
        const double n = effective_bath(1.0, 1.0 + 0.01 * k, pi, 0.0).N;
        CHECK(n > prev);
        prev = n;
    }
    prev = -1;
    for (int k = 0; k <= 50; ++k) {
        const double n = effective_bath(1.0, 1.0 - 0.01 * k, pi, 0.0).N;
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("derive tracks r_e and Phi")
{
    SystemConfig c;
    auto d = derive(c);
    CHECK(d.r_e == d.r_d);
    CHECK(d.N_s < 1e-12);
    CHECK(d.Phi == doctest::Approx(pi));
    CHECK(d.polaron_shift() == doctest::Approx(0.125).epsilon(1e-3));

    c.r_e_tracks_r_d = false;
    c.r_e = 0.5;
    d = derive(c);
    CHECK(d.r_e == 0.5);
    CHECK(d.N == doctest::Approx(std::pow(std::sinh(0.5), 2)));
    CHECK(d.N_s > 1.0);
}

TEST_CASE("config validation")
{
    SystemConfig c;
    CHECK(validate(c).empty());
    c.eps_l = 0.01;
    CHECK(validate(c).size() == 1);
    c.kappa = 0;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = SystemConfig{};
    c.n_th_m = -1;
    CHECK_THROWS_AS(validate(c), ValidationError);

    c = SystemConfig{};
    c.omega_m = 2;
    CHECK_THROWS_AS(normalized(c), ValidationError);
    const auto n = normalized(c, {.rescale = true});
    CHECK(n.omega_m == 1.0);
    CHECK(n.Delta_c == doctest::Approx(2000.2));
    CHECK(n.kappa == doctest::Approx(0.025));
}

TEST_CASE("rotating-wave validity regimes")
{
    auto c = point(4000, 2000 - 0.1);
    auto r = rwa_validity(c, derive(c));
    CHECK(r.regime == Regime::RadiationPressure);
    CHECK(r.omega_m_over_omega_s < 0.1);

    c = point(20, 10 - 0.003125);
    auto d = derive(c);
    CHECK(d.omega_s == doctest::Approx(0.5).epsilon(1e-3));
    r = rwa_validity(c, d);
    CHECK(r.regime == Regime::Parametric);

    c = point(0.01, 0);
    r = rwa_validity(c, derive(c));
    CHECK(r.regime == Regime::Neither);

    c = point(4000, 0);
    CHECK(rwa_validity(c, derive(c)).regime == Regime::Bare);
    CHECK(std::string(to_string(Regime::Parametric)) == "parametric");
}

TEST_CASE("long double instantiation")
{
    BasicSystemConfig<long double> c;
    const auto d = derive(c);
    CHECK(static_cast<double>(d.g_s * d.g_s - d.g_p * d.g_p) == doctest::Approx(2.5e-5).epsilon(1e-12));
}
