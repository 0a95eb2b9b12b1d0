// model.hpp - physical configuration and the closed-form parameter layer
//
// Every frequency is measured in units of the mechanical frequency omega_m.
// The squeezed cavity mode a_s is defined by
//     a = cosh(r_d) a_s - exp(-i Phi_d) sinh(r_d) a_s^dagger,
//     r_d = ln[(Delta_c + 2 Lambda) / (Delta_c - 2 Lambda)] / 4,
// which exists only inside the stability domain Delta_c > 2 Lambda >= 0.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sqzoms/errors.hpp"

namespace sqz {

template <class Real = double>
struct BasicSystemConfig {
    Real omega_m{1};      // the unit; anything else needs rescaling
    Real g0{0.005};       // bare single-photon coupling
    Real kappa{0.05};     // cavity decay
    Real gamma{1e-4};     // mechanical decay
    Real Delta_c{4000.4}; // omega_c - omega_d / 2
    Real Lambda{2000};    // parametric drive amplitude
    Real Phi_d{0};        // parametric drive phase
    Real r_e{0};          // squeezing of the injected vacuum
    Real Phi_e{std::numbers::pi_v<Real>}; // reference phase of the injected vacuum
    Real n_th_m{0};       // mechanical bath occupancy
    Real eps_l{1e-3};     // probe amplitude
    Real omega_l_s{0};    // probe frequency in the omega_d/2 frame
    // When set, r_e is taken equal to r_d (phase-matched squeezing strength).
    bool r_e_tracks_r_d{true};

    Real Delta_c_tilde() const { return Delta_c - 2 * Lambda; }
    Real Phi() const { return Phi_e - Phi_d; }
};

using SystemConfig = BasicSystemConfig<double>;

struct ValidationOptions {
    double min_gap{1e-6};          // required Delta_c - 2 Lambda
    bool rescale{false};           // accept omega_m != 1 by dividing all frequencies by it
    double weak_probe_ratio{0.1};  // eps_l / kappa above this triggers a warning
};

template <class Real = double>
struct BasicSqueezing {
    Real r_d;
    Real omega_s;
    Real F; // force that cancels the squeezing-induced displacement
};

template <class Real = double>
struct BasicCouplings {
    Real g_s;
    Real g_p;
};

template <class Real = double>
struct BasicBathMoments {
    Real N;
    std::complex<Real> M;
};

template <class Real = double>
struct BasicDerivedParams {
    Real r_d;
    Real omega_s;
    Real g_s;
    Real g_p;
    Real F;
    Real N;
    std::complex<Real> M;
    Real N_s;
    std::complex<Real> M_s;
    Real Phi;
    Real r_e; // value actually used (equals r_d when tracking)

    // Zero-phonon (polaron) shift g_s^2 / omega_m.
    Real polaron_shift() const { return g_s * g_s; }
};

using Squeezing = BasicSqueezing<double>;
using Couplings = BasicCouplings<double>;
using BathMoments = BasicBathMoments<double>;
using DerivedParams = BasicDerivedParams<double>;

// Returns a copy with omega_m == 1. Throws ValidationError if omega_m != 1 and
// opts.rescale is not set.
template <class Real>
BasicSystemConfig<Real> normalized(BasicSystemConfig<Real> cfg, const ValidationOptions& opts = {})
{
    if (cfg.omega_m == Real(1)) return cfg;
    if (!opts.rescale) {
        throw ValidationError("omega_m must be 1 (frequencies are in units of omega_m); "
                              "enable rescaling to convert");
    }
    if (!(cfg.omega_m > 0)) throw ValidationError("omega_m must be positive");
    const Real w = cfg.omega_m;
    for (Real* f : {&cfg.g0, &cfg.kappa, &cfg.gamma, &cfg.Delta_c, &cfg.Lambda, &cfg.eps_l, &cfg.omega_l_s}) {
        *f /= w;
    }
    cfg.omega_m = 1;
    return cfg;
}

template <class Real>
void require_stable(const BasicSystemConfig<Real>& cfg, double min_gap = 1e-6)
{
    if (!(cfg.Lambda >= 0)) throw StabilityError("Lambda must be >= 0");
    if (!(cfg.Delta_c - 2 * cfg.Lambda >= Real(min_gap))) {
        std::ostringstream os;
        os << "Delta_c = " << cfg.Delta_c << " and Lambda = " << cfg.Lambda
           << " violate Delta_c > 2 Lambda (required gap " << min_gap
           << "); the squeezing transformation does not exist in or near the critical regime";
        throw StabilityError(os.str());
    }
}

// Checks all invariants of SystemConfig; returns advisory warnings.
template <class Real>
std::vector<std::string> validate(const BasicSystemConfig<Real>& cfg, const ValidationOptions& opts = {})
{
    if (cfg.omega_m != Real(1) && !opts.rescale) {
        throw ValidationError("omega_m must be 1 (frequencies are in units of omega_m)");
    }
    auto need = [](bool ok, const char* msg) {
        if (!ok) throw ValidationError(msg);
    };
    need(cfg.kappa > 0, "kappa must be > 0");
    need(cfg.gamma > 0, "gamma must be > 0");
    need(cfg.g0 >= 0, "g0 must be >= 0");
    need(cfg.eps_l >= 0, "eps_l must be >= 0");
    need(cfg.n_th_m >= 0, "n_th_m must be >= 0");
    need(cfg.r_e >= 0, "r_e must be >= 0");
    need(std::isfinite(static_cast<double>(cfg.Phi_d)) && std::isfinite(static_cast<double>(cfg.Phi_e)),
         "phases must be finite");
    require_stable(cfg, opts.min_gap);

    std::vector<std::string> warnings;
    if (cfg.eps_l > Real(opts.weak_probe_ratio) * cfg.kappa) {
        std::ostringstream os;
        os << "probe is not weak: eps_l / kappa = " << cfg.eps_l / cfg.kappa;
        warnings.push_back(os.str());
    }
    return warnings;
}

template <class Real>
BasicSqueezing<Real> derive_squeezing(const BasicSystemConfig<Real>& cfg, double min_gap = 1e-6)
{
    using std::exp;
    using std::log;
    using std::sinh;
    require_stable(cfg, min_gap);
    const Real lo = cfg.Delta_c - 2 * cfg.Lambda;
    const Real hi = cfg.Delta_c + 2 * cfg.Lambda;
    const Real r_d = log(hi / lo) / 4;
    const Real s = sinh(r_d);
    return {r_d, lo * exp(2 * r_d), cfg.g0 * s * s};
}

// Rational form g0 Delta_c / sqrt(Delta_c^2 - 4 Lambda^2), 2 g0 Lambda / sqrt(...).
template <class Real>
BasicCouplings<Real> couplings(const BasicSystemConfig<Real>& cfg, double min_gap = 1e-6)
{
    using std::sqrt;
    require_stable(cfg, min_gap);
    // (Delta - 2L)(Delta + 2L) avoids cancellation near the critical point
    const Real root = sqrt((cfg.Delta_c - 2 * cfg.Lambda) * (cfg.Delta_c + 2 * cfg.Lambda));
    return {cfg.g0 * cfg.Delta_c / root, 2 * cfg.g0 * cfg.Lambda / root};
}

// Hyperbolic form g0 cosh(2 r_d), g0 sinh(2 r_d).
template <class Real>
BasicCouplings<Real> couplings_from_squeezing(Real g0, Real r_d)
{
    using std::cosh;
    using std::sinh;
    return {g0 * cosh(2 * r_d), g0 * sinh(2 * r_d)};
}

template <class Real>
BasicBathMoments<Real> bath_moments(Real r_e, Real Phi_e)
{
    using std::cosh;
    using std::sinh;
    const Real s = sinh(r_e);
    return {s * s, std::polar(s * cosh(r_e), Phi_e)};
}

template <class Real>
BasicBathMoments<Real> bath_moments(const BasicSystemConfig<Real>& cfg)
{
    return bath_moments(cfg.r_e, cfg.Phi_e);
}

// Noise seen by a_s when the injected vacuum (r_e, Phi_e) is expressed in the
// squeezed-mode basis, Phi = Phi_e - Phi_d:
//   M_s = e^{i Phi_d} X Y,
//   X = cosh r_d cosh r_e + e^{-i Phi} sinh r_d sinh r_e,
//   Y = sinh r_d cosh r_e + e^{+i Phi} cosh r_d sinh r_e,
//   N_s = |Y|^2
//       = sinh^2 r_d cosh^2 r_e + cosh^2 r_d sinh^2 r_e + cos(Phi) sinh(2 r_d) sinh(2 r_e) / 2.
// N_s is evaluated as |Y|^2 so it is nonnegative and vanishes at phase matching
// without cancellation error.
template <class Real>
BasicBathMoments<Real> effective_bath(Real r_d, Real r_e, Real Phi, Real Phi_d)
{
    using std::cosh;
    using std::sinh;
    using C = std::complex<Real>;
    const Real cd_ = cosh(r_d), sd = sinh(r_d), ce = cosh(r_e), se = sinh(r_e);
    const C X = cd_ * ce + std::polar(Real(1), -Phi) * (sd * se);
    const C Y = sd * ce + std::polar(Real(1), Phi) * (cd_ * se);
    return {std::norm(Y), std::polar(Real(1), Phi_d) * X * Y};
}

// Closed forms valid for r_d = r_e = r.
template <class Real>
BasicBathMoments<Real> matched_effective_bath(Real r, Real Phi, Real Phi_d)
{
    using std::cos;
    using std::cosh;
    using std::sinh;
    using C = std::complex<Real>;
    const Real s2 = sinh(2 * r);
    const Real c = cosh(r), s = sinh(r);
    const C M_s = std::polar(Real(1), Phi_d) * s2 * (Real(1) + std::polar(Real(1), Phi))
                  * (c * c + std::polar(Real(1), -Phi) * (s * s)) / Real(2);
    return {s2 * s2 * (1 + cos(Phi)) / 2, M_s};
}

template <class Real>
BasicDerivedParams<Real> derive(const BasicSystemConfig<Real>& cfg, double min_gap = 1e-6)
{
    const auto sq = derive_squeezing(cfg, min_gap);
    const auto cp = couplings(cfg, min_gap);
    const Real r_e = cfg.r_e_tracks_r_d ? sq.r_d : cfg.r_e;
    const auto bath = bath_moments(r_e, cfg.Phi_e);
    const Real Phi = cfg.Phi_e - cfg.Phi_d;
    const auto eff = effective_bath(sq.r_d, r_e, Phi, cfg.Phi_d);
    return {sq.r_d, sq.omega_s, cp.g_s, cp.g_p, sq.F, bath.N, bath.M, eff.N, eff.M, Phi, r_e};
}

// ---------------------------------------------------------------------------
// rotating-wave validity

enum class Regime { RadiationPressure, Parametric, Bare, Neither };

inline const char* to_string(Regime r)
{
    switch (r) {
    case Regime::RadiationPressure: return "radiation-pressure";
    case Regime::Parametric: return "parametric";
    case Regime::Bare: return "bare";
    case Regime::Neither: return "neither";
    }
    return "?";
}

struct RwaThresholds {
    // radiation-pressure RWA: g_p / omega_s and omega_m / omega_s below this
    double radiation_pressure{0.1};
    // parametric RWA: g_s / omega_m and g_p / omega_s below this ...
    double parametric_coupling{0.5};
    // ... and |omega_s - omega_m / 2| / omega_m below this
    double parametric_detuning{0.1};
};

struct RwaReport {
    double g_p_over_omega_s;
    double omega_m_over_omega_s;
    double g_s_over_omega_m;
    double half_resonance_detuning; // |omega_s - omega_m/2| / omega_m
    RwaThresholds thresholds;
    Regime regime;
};

// "bare" means no parametric drive (Lambda = 0) with the radiation-pressure
// ratios satisfied.
template <class Real>
RwaReport rwa_validity(const BasicSystemConfig<Real>& cfg, const BasicDerivedParams<Real>& d,
                       const RwaThresholds& th = {})
{
    RwaReport rep{};
    const double ws = static_cast<double>(d.omega_s);
    const double wm = static_cast<double>(cfg.omega_m);
    rep.g_p_over_omega_s = static_cast<double>(d.g_p) / ws;
    rep.omega_m_over_omega_s = wm / ws;
    rep.g_s_over_omega_m = static_cast<double>(d.g_s) / wm;
    rep.half_resonance_detuning = std::abs(ws - wm / 2) / wm;
    rep.thresholds = th;

    const bool rp = rep.g_p_over_omega_s < th.radiation_pressure
                    && rep.omega_m_over_omega_s < th.radiation_pressure;
    const bool pi = rep.g_s_over_omega_m < th.parametric_coupling
                    && rep.g_p_over_omega_s < th.parametric_coupling
                    && rep.half_resonance_detuning < th.parametric_detuning;
    if (rp) {
        rep.regime = cfg.Lambda == Real(0) ? Regime::Bare : Regime::RadiationPressure;
    } else if (pi) {
        rep.regime = Regime::Parametric;
    } else {
        rep.regime = Regime::Neither;
    }
    return rep;
}

} // namespace sqz
