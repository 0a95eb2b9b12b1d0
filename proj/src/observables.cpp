// observables.cpp - spectra, photon correlations and parameter sweeps

#include "sqzoms/observables.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sqz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Operator pair_number(const SpaceDims& dims)
{
    const Operator a = on_cavity(annihilator(dims.n_cav), dims);
    const Operator ad = dagger(a);
    return ad * ad * a * a;
}

SystemConfig probed_at(SystemConfig cfg, const DerivedParams& d, double Delta_s)
{
    cfg.omega_l_s = d.omega_s - Delta_s;
    return cfg;
}

} // namespace

const char* to_string(FramePolicy p)
{
    switch (p) {
    case FramePolicy::Auto: return "auto";
    case FramePolicy::Rotating: return "rotating";
    case FramePolicy::Secular: return "secular";
    case FramePolicy::Exact: return "exact";
    }
    return "?";
}

FramePolicy parse_frame_policy(const std::string& s)
{
    for (auto p : {FramePolicy::Auto, FramePolicy::Rotating, FramePolicy::Secular, FramePolicy::Exact}) {
        if (s == to_string(p)) return p;
    }
    throw ValidationError("unknown frame policy '" + s + "' (expected auto, rotating, secular or exact)");
}

FramePolicy resolve_frame(const DerivedParams& d, const SolveOptions& opts)
{
    if (opts.frame != FramePolicy::Auto) return opts.frame;
    const bool matched = d.N_s < opts.matched_tol && std::abs(d.M_s) < opts.matched_tol;
    return matched ? FramePolicy::Rotating : FramePolicy::Exact;
}

LongTimeValues long_time_expectations(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                                      const std::vector<Operator>& observables, const SolveOptions& opts)
{
    const FramePolicy frame = resolve_frame(d, opts);
    LongTimeValues out{{}, frame};

    if (frame == FramePolicy::Exact) {
        for (const auto& r : quasi_steady_averages(cfg, d, dims, build_probed(cfg, d, dims, false), observables,
                                                   opts.quasi)) {
            out.values.push_back(r.value);
        }
        return out;
    }

    DissipatorSpec diss = standard_dissipators(cfg, d, dims);
    if (frame == FramePolicy::Rotating) {
        if (std::abs(d.M_s) >= opts.matched_tol) {
            throw UnsupportedFrameError("rotating frame policy needs M_s = 0; the two-photon bath correlations "
                                        "are time dependent in the probe frame (use secular or exact)");
        }
    } else {
        diss = diss.secular();
    }
    SteadyStateSolver solver(opts.steady);
    const DensityMatrix rho = solver.solve(build_liouvillian(build_probe_frame(cfg, d, dims), diss));
    for (const auto& o : observables) out.values.push_back(expectation(o, rho).real());
    return out;
}

// ---------------------------------------------------------------------------
// spectrum

std::vector<double> linspace(double a, double b, int n)
{
    if (n < 1) throw ValidationError("linspace: need at least one point");
    if (n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double min_prominence)
{
    if (x.size() != y.size()) throw DimensionError("find_peaks: x and y differ in length");
    const std::size_t n = y.size();
    double ymax = 0.0;
    for (double v : y) {
        if (std::isfinite(v)) ymax = std::max(ymax, std::abs(v));
    }

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double l = y[i - 1], c = y[i], r = y[i + 1];
        if (!std::isfinite(l) || !std::isfinite(c) || !std::isfinite(r)) continue;
        if (!(c > l && c >= r)) continue;

        // prominence: height above the higher of the two lowest points reached
        // before meeting a taller sample on either side
        double left_min = c;
        for (std::size_t j = i; j-- > 0;) {
            if (!std::isfinite(y[j])) continue;
            if (y[j] > c) break;
            left_min = std::min(left_min, y[j]);
        }
        double right_min = c;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!std::isfinite(y[j])) continue;
            if (y[j] > c) break;
            right_min = std::min(right_min, y[j]);
        }
        const double prominence = c - std::max(left_min, right_min);
        if (prominence < min_prominence * ymax) continue;

        // vertex of the parabola through the three samples
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double d1 = (c - l) / (x1 - x0), d2 = (r - c) / (x2 - x1);
        const double curv = (d2 - d1) / (x2 - x0);
        double xp = x1, yp = c;
        if (curv < 0.0) {
            xp = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
            xp = std::clamp(xp, x0, x2);
            yp = l + d1 * (xp - x0) + curv * (xp - x0) * (xp - x1);
        }
        peaks.push_back({xp, yp, prominence});
    }
    return peaks;
}

bool SpectrumResult::complete() const
{
    return std::all_of(error.begin(), error.end(), [](const std::string& e) { return e.empty(); });
}

std::vector<Peak> SpectrumResult::peaks(double min_prominence) const
{
    return find_peaks(Delta_s, S, min_prominence);
}

SpectrumResult excitation_spectrum(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                                   const std::vector<double>& Delta_s, const SolveOptions& opts, int workers)
{
    if (!(cfg.eps_l > 0.0)) throw ValidationError("excitation_spectrum: eps_l must be positive");
    if (Delta_s.empty()) throw ValidationError("excitation_spectrum: empty grid");
    for (std::size_t i = 1; i < Delta_s.size(); ++i) {
        if (!(Delta_s[i] > Delta_s[i - 1])) throw ValidationError("excitation_spectrum: grid must strictly ascend");
    }
    const auto rep = rwa_validity(cfg, d);
    if (rep.regime != Regime::RadiationPressure && rep.regime != Regime::Bare) {
        warn(std::string("excitation_spectrum: parameters are in the ") + to_string(rep.regime)
             + " regime; the probe-frame description may not hold");
    }

    SpectrumResult out;
    out.Delta_s = Delta_s;
    out.Phi = cfg.Phi();
    out.Delta_c_tilde = cfg.Delta_c_tilde();
    out.dims = dims;
    out.frame = resolve_frame(d, opts);

    const std::vector<Operator> obs{on_cavity(number(dims.n_cav), dims)};
    const double n0 = 4.0 * cfg.eps_l * cfg.eps_l / (cfg.kappa * cfg.kappa);

    struct Point {
        double n;
        std::string error;
    };
    const auto points = parallel_map(Delta_s.size(), workers, [&](std::size_t i) -> Point {
        try {
            return {long_time_expectations(probed_at(cfg, d, Delta_s[i]), d, dims, obs, opts).values.front(), {}};
        } catch (const std::exception& e) {
            return {kNaN, e.what()};
        }
    });

    for (const auto& p : points) {
        const double s = (p.n - d.N_s) / n0;
        out.n_cav.push_back(p.n);
        out.S.push_back(s);
        out.error.push_back(p.error);
        if (s < -1e-6) out.negative_flagged = true;
    }
    if (out.negative_flagged) warn("excitation_spectrum: S < -1e-6 at some grid points (reported unclamped)");
    return out;
}

// ---------------------------------------------------------------------------
// correlations

G2Result g2_steady(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                   std::optional<double> Delta_s, const SolveOptions& opts)
{
    if (!(cfg.eps_l > 0.0)) throw ValidationError("g2_steady: eps_l must be positive");
    const SystemConfig probed = probed_at(cfg, d, Delta_s.value_or(d.polaron_shift()));
    const std::vector<Operator> obs{on_cavity(number(dims.n_cav), dims), pair_number(dims)};
    const LongTimeValues v = long_time_expectations(probed, d, dims, obs, opts);
    const double n = v.values[0], n2 = v.values[1];
    if (!(n >= kPopulationFloor)) {
        std::ostringstream os;
        os << "g2_steady: <a_s^dag a_s> = " << n << " is below " << kPopulationFloor << "; g2 is undefined";
        throw VanishingPopulationError(os.str());
    }
    return {n2 / (n * n), n, n2, v.frame};
}

TrajectoryResult g2_transient(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                              const std::vector<double>& t_grid, bool exact, const TransientOptions& opts)
{
    dims.validate();
    TrajectoryResult out;
    out.exact = exact;
    const double n_init = opts.initial_occupancy.value_or(d.N_s);
    if (!(n_init >= 0.0)) throw ValidationError("g2_transient: initial occupancy must be >= 0");
    if (cfg.eps_l == 0.0 && n_init < kPopulationFloor && d.N_s < kPopulationFloor) return out;

    const SystemConfig probed = probed_at(cfg, d, opts.Delta_s.value_or(d.polaron_shift()));
    const DensityMatrix rho0 = tensor(thermal_state<cd>(n_init, dims.n_cav), thermal_state<cd>(0.0, dims.n_mech));

    EvolveOptions eo = opts.evolve;
    eo.keep_states = false;
    eo.observables = {on_cavity(number(dims.n_cav), dims), pair_number(dims)};

    const DissipatorSpec diss = standard_dissipators(probed, d, dims);
    EvolveResult run;
    if (exact) {
        const TimeDependentHamiltonian h = build_probed(probed, d, dims, false);
        run = evolve(build_liouvillian(h.static_part, diss), rho0, t_grid, h.drive_terms, eo);
    } else {
        run = evolve(build_liouvillian(build_probe_frame(probed, d, dims), diss.secular()), rho0, t_grid, {}, eo);
    }

    out.times = run.times;
    out.diagnostics = run.diagnostics;
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        const double n = run.expectations[0][k].real();
        const double n2 = run.expectations[1][k].real();
        out.n.push_back(n);
        out.g2.push_back(n >= kPopulationFloor ? std::optional<double>(n2 / (n * n)) : std::nullopt);
    }
    return out;
}

std::optional<double> settling_time(const TrajectoryResult& tr, double period, double rel, int min_pairs)
{
    if (tr.empty() || !(period > 0.0)) return std::nullopt;
    const double t0 = tr.times.front();
    std::vector<double> sum, count;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        if (!tr.g2[k]) continue;
        const auto w = static_cast<std::size_t>((tr.times[k] - t0) / period);
        if (w >= sum.size()) {
            sum.resize(w + 1, 0.0);
            count.resize(w + 1, 0.0);
        }
        sum[w] += *tr.g2[k];
        count[w] += 1.0;
    }
    // the trailing window is usually partial
    const double span = tr.times.back() - t0;
    std::size_t full = static_cast<std::size_t>(span / period);
    full = std::min(full, sum.size());
    if (full < 2) return std::nullopt;

    std::vector<double> mean(full, kNaN);
    for (std::size_t w = 0; w < full; ++w) {
        if (count[w] > 0) mean[w] = sum[w] / count[w];
    }
    std::optional<double> settled;
    int pairs = 0;
    for (std::size_t w = full - 1; w >= 1; --w) {
        const double change = std::abs(mean[w] - mean[w - 1]) / std::abs(mean[w]);
        if (!(change < rel)) break;
        settled = t0 + static_cast<double>(w) * period;
        ++pairs;
    }
    if (pairs < min_pairs) return std::nullopt;
    return settled;
}

// ---------------------------------------------------------------------------
// sweeps

const char* to_string(BlockadeAxis a)
{
    switch (a) {
    case BlockadeAxis::Phi: return "Phi";
    case BlockadeAxis::n_th_m: return "n_th_m";
    case BlockadeAxis::Delta_c_tilde: return "Delta_c_tilde";
    }
    return "?";
}

BlockadeAxis parse_blockade_axis(const std::string& s)
{
    for (auto a : {BlockadeAxis::Phi, BlockadeAxis::n_th_m, BlockadeAxis::Delta_c_tilde}) {
        if (s == to_string(a)) return a;
    }
    throw ValidationError("unknown blockade axis '" + s + "' (expected Phi, n_th_m or Delta_c_tilde)");
}

SystemConfig with_axis_value(SystemConfig cfg, BlockadeAxis axis, double v)
{
    switch (axis) {
    case BlockadeAxis::Phi: cfg.Phi_e = cfg.Phi_d + v; break;
    case BlockadeAxis::n_th_m: cfg.n_th_m = v; break;
    case BlockadeAxis::Delta_c_tilde: cfg.Delta_c = 2.0 * cfg.Lambda + v; break;
    }
    return cfg;
}

std::optional<double> BlockadeMap::mask_edge() const
{
    std::optional<double> edge;
    for (std::size_t i = 0; i < values.size() && mask[i]; ++i) edge = values[i];
    return edge;
}

BlockadeMap blockade_map(const SystemConfig& base, const SpaceDims& dims, BlockadeAxis axis,
                         const std::vector<double>& grid, const BlockadeOptions& opts)
{
    BlockadeMap out;
    out.axis = axis;
    out.values = grid;

    struct Point {
        double g2;
        SpaceDims dims;
        std::string error;
    };
    const auto points = parallel_map(grid.size(), opts.workers, [&](std::size_t i) -> Point {
        SpaceDims di = dims;
        if (axis == BlockadeAxis::n_th_m && opts.mech_per_phonon > 0 && grid[i] > 0.0) {
            const int need = opts.mech_base + opts.mech_per_phonon * static_cast<int>(std::ceil(grid[i]));
            di.n_mech = std::max(di.n_mech, need);
        }
        try {
            const SystemConfig cfg = with_axis_value(base, axis, grid[i]);
            const DerivedParams d = derive(cfg);
            return {g2_steady(cfg, d, di, std::nullopt, opts.solve).g2, di, {}};
        } catch (const std::exception& e) {
            return {kNaN, di, e.what()};
        }
    });
    for (const auto& p : points) {
        out.g2.push_back(p.g2);
        out.mask.push_back(p.g2 < kBlockadeThreshold);
        out.dims.push_back(p.dims);
        out.error.push_back(p.error);
    }
    return out;
}

const char* to_string(CouplingAxis a) { return a == CouplingAxis::Lambda ? "Lambda" : "Delta_c"; }

CouplingAxis parse_coupling_axis(const std::string& s)
{
    if (s == "Lambda") return CouplingAxis::Lambda;
    if (s == "Delta_c") return CouplingAxis::Delta_c;
    throw ValidationError("unknown coupling axis '" + s + "' (expected Lambda or Delta_c)");
}

std::vector<CouplingRow> coupling_sweep(const SystemConfig& base, CouplingAxis axis, const std::vector<double>& grid)
{
    std::vector<CouplingRow> rows;
    rows.reserve(grid.size());
    for (double x : grid) {
        SystemConfig cfg = base;
        (axis == CouplingAxis::Lambda ? cfg.Lambda : cfg.Delta_c) = x;
        CouplingRow row{x, kNaN, kNaN, kNaN, kNaN, kNaN, {}};
        try {
            const Squeezing sq = derive_squeezing(cfg);
            const Couplings c = couplings(cfg);
            row.g_s_over_kappa = c.g_s / cfg.kappa;
            row.g_p_over_kappa = c.g_p / cfg.kappa;
            row.omega_s_over_omega_m = sq.omega_s / cfg.omega_m;
            row.g_s_over_omega_m = c.g_s / cfg.omega_m;
            row.g_p_over_omega_s = c.g_p / sq.omega_s;
        } catch (const StabilityError& e) {
            row.skipped = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

NoiseTable noise_sweep(double r_d, double Phi_d, const std::vector<double>& Phi_grid,
                       const std::vector<double>& delta_r_grid)
{
    NoiseTable out;
    for (double phi : Phi_grid) {
        std::vector<NoiseRow> line;
        for (double dr : delta_r_grid) {
            const double r_e = r_d + dr;
            if (r_e < 0.0) continue;
            const BathMoments b = effective_bath(r_d, r_e, phi, Phi_d);
            line.push_back({phi, dr, b.N, std::abs(b.M)});
        }
        if (line.empty()) continue;

        auto best = std::min_element(line.begin(), line.end(),
                                     [](const NoiseRow& a, const NoiseRow& b) { return a.N_s < b.N_s; });
        NoiseMinimum m{phi, best->delta_r, best->N_s};
        if (best != line.begin() && best + 1 != line.end()) {
            const NoiseRow &l = *(best - 1), &c = *best, &r = *(best + 1);
            const double d1 = (c.N_s - l.N_s) / (c.delta_r - l.delta_r);
            const double d2 = (r.N_s - c.N_s) / (r.delta_r - c.delta_r);
            const double curv = (d2 - d1) / (r.delta_r - l.delta_r);
            if (curv > 0.0) {
                const double x = std::clamp(0.5 * (l.delta_r + c.delta_r) - d1 / (2.0 * curv), l.delta_r, r.delta_r);
                m.delta_r = x;
                m.N_s = effective_bath(r_d, r_d + x, phi, Phi_d).N;
            }
        }
        out.minima.push_back(m);
        out.rows.insert(out.rows.end(), line.begin(), line.end());
    }
    return out;
}

} // namespace sqz
