#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "sqzoms/hamiltonians.hpp"
#include "sqzoms/master.hpp"

using namespace sqz;
using sqz::test::random_state;

namespace {

struct QuietWarnings {
    WarningSink old = set_warning_sink([](const std::string&) {});
    ~QuietWarnings() { set_warning_sink(old); }
};

// bare cavity (no parametric drive, no coupling) at a moderate frequency
SystemConfig linear_cavity(double Delta_c = 5.0)
{
    SystemConfig c;
    c.Delta_c = Delta_c;
    c.Lambda = 0;
    c.g0 = 0;
    return c;
}

// Direct application of the master equation, term by term.
DenseMatrix<cd> apply_oracle(const Operator& h, const DissipatorSpec& spec, const DenseMatrix<cd>& rho)
{
    const DenseMatrix<cd> H = h.dense();
    DenseMatrix<cd> out = cd(0, -1) * (H * rho - rho * H);
    for (const auto& t : spec.terms) {
        const DenseMatrix<cd> o = t.op.dense();
        if (t.kind == DissipatorKind::D) {
            const DenseMatrix<cd> odo = o.adjoint() * o;
            out += t.rate * (o * rho * o.adjoint() - 0.5 * (odo * rho + rho * odo));
        } else {
            const DenseMatrix<cd> oo = o * o;
            out += t.rate * (o * rho * o - 0.5 * (oo * rho + rho * oo));
        }
    }
    return out;
}

std::vector<double> grid(double t_end, int n)
{
    std::vector<double> ts;
    for (int k = 0; k <= n; ++k) ts.push_back(t_end * k / n);
    return ts;
}

} // namespace

TEST_CASE("standard dissipator rates")
{
    SystemConfig c;
    auto d = derive(c);
    auto spec = standard_dissipators(c, d, SpaceDims{3, 3});
    REQUIRE(spec.terms.size() == 6);
    CHECK(spec.terms[0].rate.real() == doctest::Approx(c.kappa));
    CHECK(std::abs(spec.terms[1].rate) < 1e-12);
    CHECK(std::abs(spec.terms[2].rate) < 1e-12);
    CHECK(spec.secular().terms.size() == 4);

    c = linear_cavity();
    c.r_e_tracks_r_d = false;
    c.r_e = 0;
    d = derive(c);
    CHECK(d.N_s == 0.0);
    CHECK(std::abs(d.M_s) == 0.0);

    // r_d = r_e = 1 with Phi = 0 puts kappa sinh^2(2) on D[a^dag]
    c = SystemConfig{};
    c.Delta_c = 20;
    c.Lambda = 10 * std::tanh(2.0);
    c.Phi_e = 0;
    d = derive(c);
    CHECK(d.r_d == doctest::Approx(1.0));
    spec = standard_dissipators(c, d, SpaceDims{3, 3});
    CHECK(spec.terms[1].rate.real() == doctest::Approx(c.kappa * 13.15412).epsilon(1e-5));
}

TEST_CASE("single-photon decay matrix elements")
{
    const Operator a = annihilator(3);
    DissipatorSpec spec;
    spec.terms.push_back({DissipatorKind::D, a, cd(0.7), "D[a]"});
    const auto l = build_liouvillian(0.0 * number(3), spec);
    const DenseMatrix<cd> rho = projector(StateVector({3}, DenseVector<cd>::Unit(3, 1))).matrix;
    const DenseMatrix<cd> dr = unvec(l.matrix * vec(rho), 3);
    CHECK(std::abs(dr(0, 0) - cd(0.7)) < 1e-15);
    CHECK(std::abs(dr(1, 1) + cd(0.7)) < 1e-15);
    CHECK(dr.cwiseAbs().sum() == doctest::Approx(1.4));

    spec.terms.push_back({DissipatorKind::D, a, cd(-1.0), "bad"});
    CHECK_THROWS_AS(build_liouvillian(number(3), spec), ValidationError);
    DissipatorSpec wrong;
    wrong.terms.push_back({DissipatorKind::D, annihilator(4), cd(1.0), "D[a]"});
    CHECK_THROWS_AS(build_liouvillian(number(3), wrong), DimensionError);
}

TEST_CASE("Liouvillian action against the term-by-term oracle")
{
    SystemConfig c;
    c.Delta_c = 20;
    c.Lambda = 8;
    c.g0 = 0.3;
    c.Phi_e = 2.0;
    c.Phi_d = 0.4;
    c.n_th_m = 0.5;
    c.gamma = 0.01;
    const auto d = derive(c);
    REQUIRE(std::abs(d.M_s) > 0.1);
    const SpaceDims dims{3, 3};
    const auto h = build_squeezed(c, d, dims);
    const auto spec = standard_dissipators(c, d, dims);
    const auto l = build_liouvillian(h, spec);

    std::mt19937 rng(2024);
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        const auto rho = random_state(dims.shape(), rng);
        const DenseMatrix<cd> got = unvec(l.matrix * vec(rho.matrix), dims.total());
        worst = std::max(worst, (got - apply_oracle(h, spec, rho.matrix)).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);

    // trace preservation: vec(I)^dagger L = 0
    const DenseVector<cd> id = vec(DenseMatrix<cd>::Identity(dims.total(), dims.total()));
    const DenseVector<cd> left = l.matrix.adjoint() * id;
    CHECK(left.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cavity decay follows the exponential")
{
    const auto c = linear_cavity();
    const auto d = derive(c);
    const SpaceDims dims{4, 2};
    const auto l = build_liouvillian(build_squeezed(c, d, dims), standard_dissipators(c, d, dims));
    const ModeOperators m(dims);
    EvolveOptions o;
    o.observables = {m.n_a};
    const auto ts = grid(60.0, 30);
    const auto r = evolve(l, projector(fock_state(1, 0, dims)), ts, {}, o);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        CHECK(std::abs(r.expectations[0][k].real() - std::exp(-c.kappa * ts[k])) < 1e-7);
    }
    CHECK(r.diagnostics.max_trace_drift < 1e-8);
    CHECK(r.diagnostics.max_hermiticity < 1e-9);
    CHECK_FALSE(r.diagnostics.positivity_flagged);
    REQUIRE(r.states.size() == ts.size());
    CHECK(r.times == ts);

    // a Fock state of an undissipated oscillator does not move
    const auto l0 = build_liouvillian(m.n_a + m.n_b, {});
    const auto rho0 = projector(fock_state(2, 1, dims));
    const auto still = evolve(l0, rho0, grid(10.0, 5));
    CHECK((still.states.back().matrix - rho0.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("squeezed bath fills the cavity to N_s")
{
    auto c = linear_cavity();
    c.kappa = 1.0;
    c.r_e_tracks_r_d = false;
    c.r_e = 1.0;
    c.Phi_e = 0.0;
    const auto d = derive(c);
    REQUIRE(std::abs(d.M_s) > 1.0);
    const SpaceDims dims{70, 2};
    const auto l = build_liouvillian(build_squeezed(c, d, dims), standard_dissipators(c, d, dims));
    const ModeOperators m(dims);

    const auto ss = steady_state(l);
    CHECK(std::abs(expectation(m.n_a, ss).real() - d.N_s) < 1e-6);

    // moment equation d<n>/dt = -kappa <n> + kappa N_s from vacuum
    EvolveOptions o;
    o.observables = {m.n_a};
    o.keep_states = false;
    const auto ts = grid(3.0, 6);
    const auto r = evolve(l, vacuum(dims), ts, {}, o);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        CHECK(std::abs(r.expectations[0][k].real() - d.N_s * (1 - std::exp(-ts[k]))) < 1e-6);
    }
    CHECK(r.diagnostics.max_trace_drift < 1e-8);
    CHECK(r.diagnostics.max_hermiticity < 1e-9);
}

TEST_CASE("thermal detailed balance")
{
    const int n = 30;
    const double nbar = 0.5, kappa = 0.2;
    DissipatorSpec spec;
    spec.terms.push_back({DissipatorKind::D, annihilator(n), cd(kappa * (nbar + 1)), "down"});
    spec.terms.push_back({DissipatorKind::D, dagger(annihilator(n)), cd(kappa * nbar), "up"});
    const auto ss = steady_state(build_liouvillian(number(n), spec));
    CHECK((ss.matrix - thermal_state(nbar, n).matrix).cwiseAbs().maxCoeff() < 1e-10);

    // mechanical bath through the standard set
    auto c = linear_cavity();
    c.n_th_m = 2.0;
    c.gamma = 0.01;
    const auto d = derive(c);
    const SpaceDims dims{2, 40};
    const auto rho = steady_state(build_liouvillian(build_squeezed(c, d, dims), standard_dissipators(c, d, dims)));
    const auto expect = tensor(thermal_state(0.0, 2), thermal_state(2.0, 40));
    CHECK((rho.matrix - expect.matrix).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("phase-matched squeezed bath acts like vacuum")
{
    SystemConfig c;
    c.Delta_c = 20;
    c.Lambda = 8;
    c.g0 = 0.2;
    c.kappa = 0.3;
    const auto d = derive(c);
    const SpaceDims dims{4, 6};
    const auto h = build_rwa_oms(c, d, dims);
    const ModeOperators m(dims);
    DissipatorSpec vac;
    vac.terms.push_back({DissipatorKind::D, m.a, cd(c.kappa), "kappa D[a]"});
    vac.terms.push_back({DissipatorKind::D, m.b, cd(c.gamma), "gamma D[b]"});

    const auto ts = grid(10.0, 10);
    const auto rho0 = projector(fock_state(2, 1, dims));
    const auto full = evolve(build_liouvillian(h, standard_dissipators(c, d, dims)), rho0, ts);
    const auto ref = evolve(build_liouvillian(h, vac), rho0, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        CHECK((full.states[k].matrix - ref.states[k].matrix).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("driven linear cavity steady state")
{
    auto c = linear_cavity(4000);
    c.omega_l_s = 4000 - 0.03;
    const auto d = derive(c);
    const cd expect_a = -c.eps_l / cd(0.03, -c.kappa / 2);

    SUBCASE("direct")
    {
        const SpaceDims dims{4, 2};
        const ModeOperators m(dims);
        const auto rho =
            steady_state(build_liouvillian(build_probe_frame(c, d, dims), standard_dissipators(c, d, dims)));
        CHECK(std::abs(expectation(m.a, rho) - expect_a) < 1e-9);
    }
    SUBCASE("iterative")
    {
        c.eps_l = 0.05;
        const cd big_a = -c.eps_l / cd(0.03, -c.kappa / 2);
        const SpaceDims dims{20, 8};
        const ModeOperators m(dims);
        const auto l = build_liouvillian(build_probe_frame(c, d, dims), standard_dissipators(c, d, dims));
        SteadyStateSolver solver;
        const auto rho = solver.solve(l);
        CHECK(solver.info().iterative);
        CHECK(solver.info().residual < 1e-10);
        CHECK(std::abs(expectation(m.a, rho) - big_a) < 1e-7);
        CHECK(std::abs(expectation(m.n_a, rho).real() - std::norm(big_a)) < 1e-7);
    }
}

TEST_CASE("degenerate steady state is reported")
{
    const SpaceDims dims{3, 3};
    const ModeOperators m(dims);
    const auto l = build_liouvillian(m.n_a + m.n_b, {});
    // n_a + n_b has levels 0..4 with multiplicities 1,2,3,2,1
    CHECK(nullity(l) == 19);
    try {
        steady_state(l);
        FAIL("expected DegeneracyError");
    } catch (const DegeneracyError& e) {
        CHECK(e.nullity == 19);
    }
}

TEST_CASE("step budget and stiffness")
{
    const auto c = linear_cavity();
    const auto d = derive(c);
    const SpaceDims dims{3, 2};
    const auto l = build_liouvillian(build_squeezed(c, d, dims), standard_dissipators(c, d, dims));
    EvolveOptions o;
    o.max_steps = 5;
    // a rotating coherence cannot be followed in five steps
    auto psi = fock_state(0, 0, dims);
    psi.amplitudes(dims.index(1, 0)) = 1.0;
    psi.amplitudes /= std::sqrt(2.0);
    CHECK_THROWS_AS(evolve(l, projector(psi), grid(100.0, 2), {}, o), StiffnessError);
    o = {};
    o.min_step = 10.0;
    o.initial_step = 10.0;
    CHECK_THROWS_AS(evolve(l, projector(fock_state(1, 1, dims)), grid(100.0, 2), {}, o), StiffnessError);
}

TEST_CASE("quasi-steady averages")
{
    QuietWarnings quiet;
    SystemConfig c;
    c.Delta_c = 20;
    c.Lambda = 8;
    c.kappa = 0.5;
    c.gamma = 0.01;
    c.eps_l = 0.02;
    auto d = derive(c);
    c.omega_l_s = d.omega_s - d.polaron_shift();
    const SpaceDims dims{3, 6};
    const ModeOperators m(dims);
    QuasiSteadyOptions q;
    q.t_end = 60;

    SUBCASE("no drive reduces to the steady state")
    {
        c.eps_l = 0;
        const auto h = build_probed(c, d, dims, false);
        const auto r = quasi_steady_average(c, d, dims, h, m.n_b, q);
        const auto ss = steady_state(build_liouvillian(h.static_part, standard_dissipators(c, d, dims)));
        CHECK(r.value == doctest::Approx(expectation(m.n_b, ss).real()));
    }
    SUBCASE("phase matched: exact frame agrees with the rotating frame")
    {
        const auto h = build_probed(c, d, dims, false);
        const auto r = quasi_steady_average(c, d, dims, h, m.n_a, q);
        const auto rot = steady_state(build_liouvillian(build_probe_frame(c, d, dims), standard_dissipators(c, d, dims)));
        const double ref = expectation(m.n_a, rot).real();
        CHECK(std::abs(r.value - ref) / ref < 1e-4);
        CHECK(r.relative_change < 1e-4);
        CHECK(r.diagnostics.max_trace_drift < 1e-8);
    }
    SUBCASE("too short a run is refused")
    {
        c.Phi_e = 2.0;
        d = derive(c);
        q.t_end = 3.0;
        q.tolerance = 1e-9;
        const auto h = build_probed(c, d, dims, false);
        CHECK_THROWS_AS(quasi_steady_average(c, d, dims, h, m.n_a, q), ConvergenceError);
    }
}

TEST_CASE("binary dumps round trip")
{
    const auto dir = std::filesystem::temp_directory_path() / "sqzoms_test_dump";
    std::filesystem::create_directories(dir);
    std::mt19937 rng(5);
    const auto rho = random_state(Shape{3, 2}, rng);
    write_binary((dir / "rho.bin").string(), rho);
    const auto back = read_state_binary((dir / "rho.bin").string());
    CHECK(back.shape == rho.shape);
    CHECK(back.matrix == rho.matrix);

    SystemConfig c;
    const auto d = derive(c);
    const SpaceDims dims{3, 2};
    const auto l = build_liouvillian(build_squeezed(c, d, dims), standard_dissipators(c, d, dims));
    write_binary((dir / "l.bin").string(), l);
    const auto lb = read_liouvillian_binary((dir / "l.bin").string());
    CHECK(lb.shape == l.shape);
    CHECK((SuperMatrix(lb.matrix - l.matrix)).norm() == 0.0);

    std::ofstream((dir / "junk.bin").string(), std::ios::binary) << "nope";
    CHECK_THROWS_AS(read_state_binary((dir / "junk.bin").string()), ValidationError);
    CHECK_THROWS_AS(read_state_binary((dir / "l.bin").string()), ValidationError);
    std::filesystem::remove_all(dir);
}
