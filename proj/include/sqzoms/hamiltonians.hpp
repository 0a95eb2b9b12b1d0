// hamiltonians.hpp - Hamiltonians of the squeezed optomechanical system
//
// All builders work in the frame rotating at omega_d / 2 unless stated
// otherwise. Operators act on SpaceDims with the cavity mode first; in every
// builder except build_original the cavity operator is the squeezed mode a_s.
// The parametric term is written phase-free, i.e. the residual Phi_d phase is
// absorbed into a_s; Phi_d then only enters M_s and the counter-rotating probe
// tone.

#pragma once

#include <vector>

#include "sqzoms/fock.hpp"
#include "sqzoms/model.hpp"

namespace sqz {

// One coherent drive: amplitude * exp(-i frequency t) * op + h.c.
struct DriveTerm {
    Operator op;
    cd amplitude;
    double frequency;
};

struct TimeDependentHamiltonian {
    Operator static_part;
    std::vector<DriveTerm> drive_terms;

    const Shape& shape() const { return static_part.shape; }
    Operator at(double t) const;
};

// Delta_c a^dag a + Lambda (a^dag^2 e^{-i Phi_d} + a^2 e^{i Phi_d})
//   + omega_m b^dag b + F (b + b^dag) - g0 a^dag a (b + b^dag)
// in terms of the bare cavity mode a. Differs from build_squeezed by the
// constant zero-point offset (omega_s - Delta_c) / 2.
Operator build_original(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims);

// omega_s n + omega_m b^dag b - g_s n (b + b^dag) + (g_p / 2)(a_s^dag^2 + a_s^2)(b + b^dag)
Operator build_squeezed(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims);

// Radiation-pressure RWA: drops the parametric term of build_squeezed.
Operator build_rwa_oms(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims);

// Parametric RWA: omega_s n + omega_m b^dag b + g_p (a_s^2 b^dag + b a_s^dag^2)
Operator build_parametric_pi(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims);

// Probe at frequency cfg.omega_l_s. rwa = false gives build_squeezed plus
// both tones eps cosh(r_d) a_s^dag e^{-iwt} and -eps sinh(r_d) e^{-i Phi_d} a_s^dag e^{+iwt};
// rwa = true gives build_rwa_oms plus the cosh-weighted tone only.
TimeDependentHamiltonian build_probed(const SystemConfig& cfg, const DerivedParams& d,
                                      const SpaceDims& dims, bool rwa);

// Moves a single-tone probe Hamiltonian into the frame rotating with the
// probe: omega_s -> Delta_s = omega_s - omega_l_s, drive becomes static.
// Throws UnsupportedFrameError for more than one tone.
Operator rotate_probe_frame(const TimeDependentHamiltonian& h);

// Static probe-frame Hamiltonian directly from the config:
// Delta_s n + omega_m b^dag b - g_s n (b + b^dag) + eps cosh(r_d) (a_s + a_s^dag).
Operator build_probe_frame(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims);

// k lowest eigenvalues of a Hermitian operator, ascending. Dense
// diagonalization up to dimension 2000, Lanczos above.
std::vector<double> lowest_eigenvalues(const Operator& h, int k);

// k lowest eigenvalues of the radiation-pressure Hamiltonian build_rwa_oms.
std::vector<double> level_structure(const SystemConfig& cfg, const DerivedParams& d,
                                    const SpaceDims& dims, int k);

// Lowest level of each photon-number sector n = 0..n_max of build_rwa_oms.
// For converged truncations these approach n omega_s - n^2 g_s^2 / omega_m.
std::vector<double> photon_sector_levels(const SystemConfig& cfg, const DerivedParams& d,
                                         const SpaceDims& dims, int n_max);

} // namespace sqz
