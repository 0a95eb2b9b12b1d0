// cli_run.cpp - scenario execution, convergence checks, manifests

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "sqzoms/cli.hpp"

namespace sqz::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
namespace fs = std::filesystem;

std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Output location does not take part in the hash, so the same config
// written to different directories carries the same hash.
std::string config_hash(const ScenarioConfig& cfg)
{
    ScenarioConfig c = cfg;
    c.output_dir.clear();
    return hex64(fnv1a(to_config_text(c)));
}

SolveOptions solve_options(const ScenarioConfig& c)
{
    SolveOptions o;
    o.frame = c.solver.frame;
    o.quasi.t_end = c.solver.t_end;
    o.quasi.evolve.rtol = c.solver.rtol;
    o.quasi.evolve.atol = c.solver.atol;
    return o;
}

std::vector<double> series_values(const ScenarioConfig& c)
{
    return c.series ? c.series->values : std::vector<double>{kNaN};
}

SystemConfig at_series(const ScenarioConfig& c, double v)
{
    SystemConfig s = c.system;
    if (c.series) set_system_field(s, c.series->name, v);
    return s;
}

std::string point_label(const ScenarioConfig& c, double series_value, const std::string& axis, double x)
{
    std::string out;
    if (c.series) out = c.series->name + "=" + format_number(series_value) + " ";
    return out + axis + "=" + format_number(x);
}

std::vector<std::size_t> subsample(std::size_t n, std::size_t k = 5)
{
    std::vector<std::size_t> idx;
    if (n <= k) {
        for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
        return idx;
    }
    for (std::size_t i = 0; i < k; ++i) idx.push_back((i * (n - 1) + (k - 1) / 2) / (k - 1));
    return idx;
}

double max_rel_drift(const std::vector<double>& a, const std::vector<double>& b)
{
    double drift = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) return std::numeric_limits<double>::infinity();
        drift = std::max(drift, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300));
    }
    return drift;
}

// Primary observable of a numerical scenario at the given points.
std::vector<double> primary_observable(const ScenarioConfig& c, const SpaceDims& dims, int mech_base,
                                       const std::vector<double>& points, int workers)
{
    const SystemConfig sys = at_series(c, series_values(c).front());
    switch (c.kind) {
    case ScenarioKind::Spectrum: {
        const DerivedParams d = derive(sys);
        const SpectrumResult s = excitation_spectrum(sys, d, dims, points, solve_options(c), workers);
        return s.S;
    }
    case ScenarioKind::Blockade: {
        BlockadeOptions o;
        o.solve = solve_options(c);
        o.mech_base = mech_base;
        o.mech_per_phonon = c.solver.mech_per_phonon;
        o.workers = workers;
        return blockade_map(sys, dims, parse_blockade_axis(c.sweep.name), points, o).g2;
    }
    case ScenarioKind::Transient: {
        const DerivedParams d = derive(sys);
        std::vector<double> grid{c.sweep.start};
        for (double t : points) {
            if (t > grid.back()) grid.push_back(t);
        }
        TransientOptions o;
        o.evolve.rtol = c.solver.rtol;
        o.evolve.atol = c.solver.atol;
        const TrajectoryResult tr = g2_transient(sys, d, dims, grid, c.solver.variants.front() == "exact", o);
        std::vector<double> out;
        for (double t : points) {
            for (std::size_t k = 0; k < tr.times.size(); ++k) {
                if (tr.times[k] == t) out.push_back(tr.g2[k].value_or(kNaN));
            }
        }
        return out;
    }
    default: return {};
    }
}

struct Output {
    std::vector<std::pair<std::string, Table>> tables; // file suffix, table
    std::vector<std::string> errors;
    std::vector<std::string> notes; // skipped points and per-run remarks
    std::size_t points{0};
};

Output run_coupling(const ScenarioConfig& c)
{
    Output out;
    const auto grid = axis_grid(c.sweep, c.system);
    const auto rows = coupling_sweep(c.system, parse_coupling_axis(c.sweep.name), grid);
    Table t{{c.sweep.name, "g_s_over_kappa", "g_p_over_kappa", "omega_s_over_omega_m", "g_s_over_omega_m",
             "g_p_over_omega_s"},
            {}};
    for (const auto& r : rows) {
        if (!r.skipped.empty()) {
            out.notes.push_back(c.sweep.name + "=" + format_number(r.x) + ": skipped: " + r.skipped);
            continue;
        }
        t.rows.push_back({r.x, r.g_s_over_kappa, r.g_p_over_kappa, r.omega_s_over_omega_m, r.g_s_over_omega_m,
                          r.g_p_over_omega_s});
    }
    out.points = rows.size();
    out.tables.emplace_back("", std::move(t));
    return out;
}

Output run_noise(const ScenarioConfig& c)
{
    Output out;
    const auto grid = axis_grid(c.sweep, c.system);
    const bool phi_major = c.sweep.name == "Phi";
    const auto& phis = phi_major ? grid : c.series->values;
    const auto& drs = phi_major ? c.series->values : grid;
    const double r_d = derive_squeezing(c.system).r_d;
    const NoiseTable nt = noise_sweep(r_d, c.system.Phi_d, phis, drs);

    Table t{{"Phi", "delta_r", "N_s", "abs_M_s"}, {}};
    for (const auto& r : nt.rows) t.rows.push_back({r.Phi, r.delta_r, r.N_s, r.abs_M_s});
    out.points = phis.size() * drs.size();
    if (nt.rows.size() < out.points) {
        out.notes.push_back(std::to_string(out.points - nt.rows.size()) + " points skipped: r_e = r_d + delta_r < 0");
    }
    out.tables.emplace_back("", std::move(t));
    if (!phi_major) {
        Table m{{"Phi", "delta_r_opt", "N_s_min"}, {}};
        for (const auto& mm : nt.minima) m.rows.push_back({mm.Phi, mm.delta_r, mm.N_s});
        out.tables.emplace_back("_minima", std::move(m));
    }
    return out;
}

Output run_spectrum(const ScenarioConfig& c, int workers)
{
    Output out;
    const auto grid = axis_grid(c.sweep, c.system);
    const std::string scol = c.series ? c.series->name : "";
    Table t{{}, {}};
    if (c.series) t.header.push_back(scol);
    for (const char* h : {"Delta_s", "S", "n_as"}) t.header.push_back(h);
    Table p{{}, {}};
    if (c.series) p.header.push_back(scol);
    for (const char* h : {"delta_over_kappa", "peak_Delta_s", "peak_S", "prominence"}) p.header.push_back(h);

    for (double sv : series_values(c)) {
        const SystemConfig sys = at_series(c, sv);
        const DerivedParams d = derive(sys);
        const SpectrumResult s = excitation_spectrum(sys, d, c.dims, grid, solve_options(c), workers);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> row;
            if (c.series) row.push_back(sv);
            row.insert(row.end(), {grid[i], s.S[i], s.n_cav[i]});
            t.rows.push_back(std::move(row));
            if (!s.error[i].empty()) out.errors.push_back(point_label(c, sv, "Delta_s", grid[i]) + ": " + s.error[i]);
        }
        if (s.negative_flagged) out.notes.push_back(point_label(c, sv, "Delta_s", grid.front()) + ".. : S < -1e-6 flagged");
        for (const auto& pk : s.peaks()) {
            std::vector<double> row;
            if (c.series) row.push_back(sv);
            row.insert(row.end(), {d.polaron_shift() / sys.kappa, pk.position, pk.value, pk.prominence});
            p.rows.push_back(std::move(row));
        }
        out.points += grid.size();
    }
    out.tables.emplace_back("", std::move(t));
    out.tables.emplace_back("_peaks", std::move(p));
    return out;
}

Output run_blockade(const ScenarioConfig& c, int workers)
{
    Output out;
    const auto grid = axis_grid(c.sweep, c.system);
    const BlockadeAxis axis = parse_blockade_axis(c.sweep.name);
    BlockadeOptions o;
    o.solve = solve_options(c);
    o.mech_base = c.dims.n_mech;
    o.mech_per_phonon = c.solver.mech_per_phonon;
    o.workers = workers;

    Table t{{c.sweep.name}, {}};
    if (c.series) t.header.push_back(c.series->name);
    for (const char* h : {"g2_ss", "blockade"}) t.header.push_back(h);
    for (double sv : series_values(c)) {
        const BlockadeMap m = blockade_map(at_series(c, sv), c.dims, axis, grid, o);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> row{grid[i]};
            if (c.series) row.push_back(sv);
            row.insert(row.end(), {m.g2[i], m.mask[i] ? 1.0 : 0.0});
            t.rows.push_back(std::move(row));
            if (!m.error[i].empty()) out.errors.push_back(point_label(c, sv, c.sweep.name, grid[i]) + ": " + m.error[i]);
            if (m.dims[i] != c.dims) {
                out.notes.push_back(point_label(c, sv, c.sweep.name, grid[i]) + ": truncation "
                                    + std::to_string(m.dims[i].n_cav) + "x" + std::to_string(m.dims[i].n_mech));
            }
        }
        const auto edge = m.mask_edge();
        out.notes.push_back((c.series ? c.series->name + "=" + format_number(sv) + " " : std::string())
                            + "mask edge: " + (edge ? format_number(*edge) : std::string("none")));
        out.points += grid.size();
    }
    out.tables.emplace_back("", std::move(t));
    return out;
}

Output run_transient(const ScenarioConfig& c, int workers)
{
    Output out;
    const auto grid = axis_grid(c.sweep, c.system);
    const DerivedParams d = derive(c.system);
    TransientOptions o;
    o.evolve.rtol = c.solver.rtol;
    o.evolve.atol = c.solver.atol;
    const auto& variants = c.solver.variants;
    const auto runs = parallel_map(variants.size(), workers, [&](std::size_t i) {
        return g2_transient(c.system, d, c.dims, grid, variants[i] == "exact", o);
    });

    Table t{{"t"}, {}};
    for (const auto& v : variants) {
        t.header.push_back("g2_" + v);
        t.header.push_back("n_" + v);
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row{grid[k]};
        for (const auto& r : runs) {
            if (r.empty()) {
                row.insert(row.end(), {kNaN, 0.0});
            } else {
                row.insert(row.end(), {r.g2[k].value_or(kNaN), r.n[k]});
            }
        }
        t.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].empty()) {
            out.notes.push_back(variants[i] + ": trajectory undefined (no population)");
            continue;
        }
        const auto settle = settling_time(runs[i], 2.0 * std::numbers::pi / c.system.omega_m, 0.01);
        out.notes.push_back(variants[i] + ": settles (1% per mechanical period) at t = "
                            + (settle ? format_number(*settle) : std::string("not within the grid")));
        if (runs[i].diagnostics.positivity_flagged) out.notes.push_back(variants[i] + ": negative eigenvalue flagged");
    }
    out.points = grid.size() * variants.size();
    out.tables.emplace_back("", std::move(t));
    return out;
}

void write_manifest(const fs::path& path, const ScenarioConfig& c, const Output& o, const RunReport& rep)
{
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write manifest '" + path.string() + "'");
    os << to_config_text(c);

    os << "\n[derived]\n";
    try {
        const DerivedParams d = derive(c.system);
        os << "r_d = " << format_number(d.r_d) << '\n'
           << "omega_s = " << format_number(d.omega_s) << '\n'
           << "g_s = " << format_number(d.g_s) << '\n'
           << "g_p = " << format_number(d.g_p) << '\n'
           << "F = " << format_number(d.F) << '\n'
           << "N_s = " << format_number(d.N_s) << '\n'
           << "abs_M_s = " << format_number(std::abs(d.M_s)) << '\n'
           << "delta = " << format_number(d.polaron_shift()) << '\n'
           << "regime = " << to_string(rwa_validity(c.system, d).regime) << '\n';
    } catch (const std::exception& e) {
        os << "status = unavailable (" << e.what() << ")\n";
    }

    os << "\n[run]\n";
    os << "config_hash = " << config_hash(c) << '\n'
       << "exit_code = " << static_cast<int>(rep.code) << '\n'
       << "points = " << o.points << '\n'
       << "failed = " << o.errors.size() << '\n'
       << "wall_time_s = " << format_number(rep.wall_time) << '\n';
    for (std::size_t i = 0; i < rep.files.size(); ++i) os << "file." << i << " = " << rep.files[i] << '\n';

    os << "\n[convergence]\n";
    if (rep.convergence) {
        const auto& cv = *rep.convergence;
        os << "computed = true\n"
           << "trivial = " << (cv.trivial ? "true" : "false") << '\n'
           << "drift = " << format_number(cv.drift) << '\n'
           << "tolerance = " << format_number(cv.tolerance) << '\n'
           << "status = " << (cv.pass ? "PASS" : "FAIL") << '\n';
        if (!cv.trivial) {
            os << "base = " << cv.base.n_cav << "x" << cv.base.n_mech << '\n'
               << "enlarged = " << cv.enlarged.n_cav << "x" << cv.enlarged.n_mech << '\n';
        }
    } else {
        os << "computed = false\n";
    }

    os << "\n[points]\n";
    std::size_t k = 0;
    for (const auto& e : o.errors) os << "error." << k++ << " = " << e << '\n';
    k = 0;
    for (const auto& n : o.notes) os << "note." << k++ << " = " << n << '\n';
}

} // namespace

ConvergenceReport check_convergence(const ScenarioConfig& c, double tol, int workers)
{
    ConvergenceReport rep;
    rep.tolerance = tol;
    rep.base = c.dims;
    rep.enlarged = c.dims.enlarged(2, 4);
    if (c.kind == ScenarioKind::Coupling || c.kind == ScenarioKind::Noise) {
        rep.trivial = true;
        return rep;
    }
    const auto grid = axis_grid(c.sweep, c.system);
    for (std::size_t i : subsample(grid.size())) {
        if (c.kind == ScenarioKind::Transient && grid[i] <= c.sweep.start) continue;
        rep.sample_points.push_back(grid[i]);
    }
    const auto a = primary_observable(c, rep.base, c.dims.n_mech, rep.sample_points, workers);
    const auto b = primary_observable(c, rep.enlarged, rep.enlarged.n_mech, rep.sample_points, workers);
    rep.drift = max_rel_drift(a, b);
    rep.pass = rep.drift < tol;
    return rep;
}

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig c = cfg;
    if (opts.out_dir) c.output_dir = *opts.out_dir;
    for (const auto& w : validate(c)) warn(w);
    const int workers = opts.workers;

    Output out;
    switch (c.kind) {
    case ScenarioKind::Coupling: out = run_coupling(c); break;
    case ScenarioKind::Noise: out = run_noise(c); break;
    case ScenarioKind::Spectrum: out = run_spectrum(c, workers); break;
    case ScenarioKind::Blockade: out = run_blockade(c, workers); break;
    case ScenarioKind::Transient: out = run_transient(c, workers); break;
    }

    RunReport rep;
    rep.points = out.points;
    rep.point_errors = out.errors;
    if (c.solver.convergence) rep.convergence = check_convergence(c, opts.tol, workers);
    if (!out.errors.empty()) rep.code = out.errors.size() >= out.points ? ExitCode::Numerical : ExitCode::Partial;

    const fs::path dir(c.output_dir.empty() ? "." : c.output_dir);
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> comments{
        {"scenario", c.name}, {"kind", to_string(c.kind)}, {"config_hash", config_hash(c)}};
    for (const auto& [suffix, table] : out.tables) {
        const fs::path p = dir / (c.name + suffix + ".csv");
        std::ofstream os(p, std::ios::binary);
        if (!os) throw ValidationError("cannot write '" + p.string() + "'");
        write_csv(os, comments, table);
        rep.files.push_back(p.string());
    }
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const fs::path mp = dir / (c.name + ".manifest");
    rep.files.push_back(mp.string());
    write_manifest(mp, c, out, rep);
    return rep;
}

std::string derive_report(const SystemConfig& sys)
{
    const DerivedParams d = derive(sys);
    const RwaReport rwa = rwa_validity(sys, d);
    std::ostringstream os;
    auto line = [&os](const char* k, double v) { os << k << " = " << format_number(v) << '\n'; };
    line("r_d", d.r_d);
    line("r_e", d.r_e);
    line("omega_s/omega_m", d.omega_s / sys.omega_m);
    line("g_s/kappa", d.g_s / sys.kappa);
    line("g_s/omega_m", d.g_s / sys.omega_m);
    line("g_p/kappa", d.g_p / sys.kappa);
    line("g_p/omega_m", d.g_p / sys.omega_m);
    line("F", d.F);
    line("delta/kappa", d.polaron_shift() / sys.kappa);
    line("N_s", d.N_s);
    line("|M_s|", std::abs(d.M_s));
    os << "regime = " << to_string(rwa.regime) << '\n';
    line("rwa.g_p/omega_s", rwa.g_p_over_omega_s);
    line("rwa.omega_m/omega_s", rwa.omega_m_over_omega_s);
    line("rwa.g_s/omega_m", rwa.g_s_over_omega_m);
    line("rwa.|omega_s-omega_m/2|/omega_m", rwa.half_resonance_detuning);
    return os.str();
}

} // namespace sqz::cli
