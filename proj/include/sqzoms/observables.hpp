// observables.hpp - spectra, photon correlations and parameter sweeps

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sqzoms/master.hpp"

namespace sqz {

// How long-time expectations of the probed system are obtained.
//   Rotating: static probe frame with the full dissipator set; requires M_s = 0.
//   Secular:  static probe frame, G terms dropped.
//   Exact:    time-domain integration in the omega_d / 2 frame (quasi_steady_average).
//   Auto:     Rotating when the effective bath is phase matched, Exact otherwise.
enum class FramePolicy { Auto, Rotating, Secular, Exact };

const char* to_string(FramePolicy p);
FramePolicy parse_frame_policy(const std::string& s); // throws ValidationError

struct SolveOptions {
    FramePolicy frame{FramePolicy::Auto};
    double matched_tol{1e-12}; // N_s and |M_s| below this count as phase matched
    SteadyStateOptions steady{};
    QuasiSteadyOptions quasi{};
};

FramePolicy resolve_frame(const DerivedParams& d, const SolveOptions& opts);

// Long-time averages of `observables` with the probe at cfg.omega_l_s.
struct LongTimeValues {
    std::vector<double> values;
    FramePolicy frame;
};

LongTimeValues long_time_expectations(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                                      const std::vector<Operator>& observables, const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// deterministic worker pool

// Evaluates f(0..n-1) on up to `workers` threads; results in index order.
// workers <= 0 uses std::thread::hardware_concurrency(). The first exception
// escaping f is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, int workers, F&& f) -> std::vector<decltype(f(std::size_t{}))>
{
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(n, 1));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (nthreads <= 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(body);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// excitation spectrum

struct Peak {
    double position;
    double value;
    double prominence;
};

// Local maxima of `y`, refined by a parabola through the three points around
// each discrete maximum. Peaks with prominence below min_prominence * max(y)
// are dropped. Non-finite samples are skipped as neighbours.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             double min_prominence = 1e-3);

struct SpectrumResult {
    std::vector<double> Delta_s;
    std::vector<double> S;          // NaN where the point failed
    std::vector<double> n_cav;      // raw <a_s^dag a_s>
    std::vector<std::string> error; // empty string where the point succeeded
    double Phi{};
    double Delta_c_tilde{};
    SpaceDims dims{};
    FramePolicy frame{FramePolicy::Auto};
    bool negative_flagged{false};   // some S < -1e-6

    bool complete() const;
    std::vector<Peak> peaks(double min_prominence = 1e-3) const;
};

// S(Delta_s) = (<a_s^dag a_s> - N_s) / n_0, n_0 = 4 eps^2 / kappa^2, with the
// probe at omega_l_s = omega_s - Delta_s.
SpectrumResult excitation_spectrum(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                                   const std::vector<double>& Delta_s, const SolveOptions& opts = {},
                                   int workers = 1);

std::vector<double> linspace(double a, double b, int n);

// ---------------------------------------------------------------------------
// photon correlations

constexpr double kPopulationFloor = 1e-10;

struct G2Result {
    double g2;
    double n;  // <a_s^dag a_s>
    double n2; // <a_s^dag a_s^dag a_s a_s>
    FramePolicy frame;
};

// Steady-state g2(0) with the probe on the single-photon resonance
// Delta_s = g_s^2 / omega_m unless Delta_s is given. Throws
// VanishingPopulationError if <n> < 1e-10.
G2Result g2_steady(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                   std::optional<double> Delta_s = std::nullopt, const SolveOptions& opts = {});

struct TransientOptions {
    std::optional<double> initial_occupancy; // thermal occupancy of a_s at t = 0, default N_s
    std::optional<double> Delta_s;           // default g_s^2 / omega_m
    EvolveOptions evolve{};
};

struct TrajectoryResult {
    std::vector<double> times;
    std::vector<std::optional<double>> g2; // nullopt where <n> < 1e-10
    std::vector<double> n;
    bool exact{false}; // true: full squeezed-frame Hamiltonian with both tones; false: H^d_OMS
    EvolveDiagnostics diagnostics;

    bool empty() const { return times.empty(); }
};

// a_s starts thermal, b in vacuum. exact = false integrates H^d_OMS in the
// probe frame with the secular dissipators; exact = true integrates the full
// Hamiltonian in the omega_d / 2 frame with all dissipators. Returns an empty
// trajectory when the cavity can never be populated (no drive, no noise).
TrajectoryResult g2_transient(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                              const std::vector<double>& t_grid, bool exact, const TransientOptions& opts = {});

// Mean over consecutive windows of length `period`; returns the first window
// end time after which successive window means differ by less than `rel`
// (relative) through the end of the trajectory, or nullopt if never. The
// settled tail must contain at least `min_pairs` window pairs.
std::optional<double> settling_time(const TrajectoryResult& tr, double period, double rel, int min_pairs = 3);

// ---------------------------------------------------------------------------
// sweeps

enum class BlockadeAxis { Phi, n_th_m, Delta_c_tilde };
const char* to_string(BlockadeAxis a);
BlockadeAxis parse_blockade_axis(const std::string& s);

constexpr double kBlockadeThreshold = 0.1;

struct BlockadeOptions {
    SolveOptions solve{};
    // For the n_th_m axis the mechanical truncation is raised to at least
    // base + per_phonon * ceil(n_th); per_phonon = 0 keeps dims as given.
    int mech_base{14};
    int mech_per_phonon{3};
    int workers{1};
};

struct BlockadeMap {
    BlockadeAxis axis;
    std::vector<double> values;
    std::vector<double> g2;         // NaN where the point failed
    std::vector<bool> mask;         // g2 < 0.1
    std::vector<SpaceDims> dims;    // truncation used per point
    std::vector<std::string> error; // empty on success

    // Largest axis value whose contiguous run of masked points starts at the
    // first grid point; nullopt if the first point is not masked.
    std::optional<double> mask_edge() const;
};

SystemConfig with_axis_value(SystemConfig cfg, BlockadeAxis axis, double v);

BlockadeMap blockade_map(const SystemConfig& base, const SpaceDims& dims, BlockadeAxis axis,
                         const std::vector<double>& grid, const BlockadeOptions& opts = {});

enum class CouplingAxis { Lambda, Delta_c };
const char* to_string(CouplingAxis a);
CouplingAxis parse_coupling_axis(const std::string& s);

struct CouplingRow {
    double x;
    double g_s_over_kappa, g_p_over_kappa, omega_s_over_omega_m, g_s_over_omega_m, g_p_over_omega_s;
    std::string skipped; // reason when outside the stability domain
};

std::vector<CouplingRow> coupling_sweep(const SystemConfig& base, CouplingAxis axis, const std::vector<double>& grid);

struct NoiseRow {
    double Phi, delta_r, N_s, abs_M_s;
};

struct NoiseMinimum {
    double Phi;
    double delta_r; // parabolic refinement of the discrete argmin
    double N_s;     // N_s evaluated at the refined delta_r
};

struct NoiseTable {
    std::vector<NoiseRow> rows; // Phi-major
    std::vector<NoiseMinimum> minima;
};

// Closed-form N_s, |M_s| with r_e = r_d + delta_r; points with r_e < 0 are skipped.
// Phi is Phi_e - Phi_d.
NoiseTable noise_sweep(double r_d, double Phi_d, const std::vector<double>& Phi_grid,
                       const std::vector<double>& delta_r_grid);

} // namespace sqz
