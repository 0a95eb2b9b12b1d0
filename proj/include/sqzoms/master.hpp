// master.hpp - Lindblad master equation with squeezed-reservoir dissipators
//
//   d rho/dt = -i[H, rho] + sum_k rate_k K_k[o_k] rho,
//   D[o] rho = o rho o^dag - (o^dag o rho + rho o^dag o) / 2,
//   G[o] rho = o rho o     - (o o rho + rho o o) / 2.
//
// Density matrices are vectorized column-major, vec(A rho B) = (B^T (x) A) vec(rho).

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "sqzoms/fock.hpp"
#include "sqzoms/hamiltonians.hpp"
#include "sqzoms/model.hpp"

namespace sqz {

enum class DissipatorKind { D, G };

struct DissipatorTerm {
    DissipatorKind kind;
    Operator op;
    cd rate; // real and >= 0 for D terms
    std::string label;
};

struct DissipatorSpec {
    std::vector<DissipatorTerm> terms;

    // Drops the G terms, i.e. the two-photon correlations that rotate at
    // twice the optical frequency in the probe frame.
    DissipatorSpec secular() const;
};

// kappa (N_s + 1) D[a_s] + kappa N_s D[a_s^dag] - kappa M_s G[a_s] - kappa M_s^* G[a_s^dag]
//   + gamma n_th D[b^dag] + gamma (n_th + 1) D[b]
DissipatorSpec standard_dissipators(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims);

using SuperMatrix = SparseMatrix<cd>;

namespace superop {

SuperMatrix left(const Operator& a);                       // rho -> a rho
SuperMatrix right(const Operator& b);                      // rho -> rho b
SuperMatrix hamiltonian(const Operator& h);                // rho -> -i [h, rho]
SuperMatrix dissipator(const Operator& o);                 // D[o]
SuperMatrix anomalous(const Operator& o);                  // G[o]

} // namespace superop

struct Liouvillian {
    Shape shape;
    SuperMatrix matrix;

    Eigen::Index hilbert_dim() const { return shape_size(shape); }
};

Liouvillian build_liouvillian(const Operator& h, const DissipatorSpec& diss);

DenseVector<cd> vec(const DenseMatrix<cd>& rho);
DenseMatrix<cd> unvec(const DenseVector<cd>& v, Eigen::Index dim);

// ---------------------------------------------------------------------------
// time evolution

struct EvolveOptions {
    double rtol{1e-8};
    double atol{1e-10};
    double initial_step{0.0}; // 0 picks one automatically
    double min_step{1e-12};
    long max_steps{50'000'000};
    bool keep_states{true};
    bool check_positivity{true};
    std::vector<Operator> observables; // expectation values recorded at each sample
};

struct EvolveDiagnostics {
    double max_trace_drift{0.0};
    double max_hermiticity{0.0};
    double min_eigenvalue{1.0};
    long steps{0};
    long rejected{0};
    bool positivity_flagged{false}; // min eigenvalue below -1e-6
};

struct EvolveResult {
    std::vector<double> times;
    std::vector<DensityMatrix> states;        // empty unless keep_states
    std::vector<std::vector<cd>> expectations; // [observable][sample]
    EvolveDiagnostics diagnostics;
};

// Adaptive Dormand-Prince 5(4) integration. `l` must contain the static
// Hamiltonian; each drive term adds amplitude e^{-i w t} op + h.c. to it.
// Steps are clipped so that every t_grid entry is hit exactly.
EvolveResult evolve(const Liouvillian& l, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                    std::span<const DriveTerm> drives = {}, const EvolveOptions& opts = {});

// ---------------------------------------------------------------------------
// steady state

struct SteadyStateOptions {
    int direct_limit{150};        // Hilbert dimension up to which sparse LU is used
    double residual_tol{1e-10};   // relative to the infinity norm of L
    int max_iterations{4000};
};

struct SteadyStateInfo {
    double residual{0.0}; // ||L vec(rho)||_inf / ||L||_inf
    bool iterative{false};
    int iterations{0};
    double min_eigenvalue{0.0};
};

// Solves L vec(rho) = 0 with the trace condition replacing the first row.
// Keeps the symbolic factorization between calls with identical sparsity.
class SteadyStateSolver {
public:
    explicit SteadyStateSolver(SteadyStateOptions opts = {}) : opts_(opts) {}

    DensityMatrix solve(const Liouvillian& l);
    const SteadyStateInfo& info() const { return info_; }

private:
    SteadyStateOptions opts_;
    SteadyStateInfo info_;
    Eigen::SparseLU<SuperMatrix, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<int> outer_, inner_; // pattern of the analyzed matrix
    bool analyzed_{false};

    DensityMatrix finish(const Liouvillian& l, const SuperMatrix& constrained, const DenseVector<cd>& x);
    [[noreturn]] void degenerate(const Liouvillian& l, const std::string& why) const;
};

DensityMatrix steady_state(const Liouvillian& l, const SteadyStateOptions& opts = {});

// Number of (numerically) independent steady states; -1 if too large to
// compute densely.
int nullity(const Liouvillian& l, double tol = 1e-10);

// ---------------------------------------------------------------------------
// long-time average with time-dependent drive

struct QuasiSteadyOptions {
    std::optional<double> t_end; // default max(20 / kappa, 200 / omega_m)
    int samples_per_period{32};
    double tolerance{1e-4};      // allowed relative change between the last two periods
    EvolveOptions evolve{};
};

struct QuasiSteadyResult {
    double value;
    double previous_period_value;
    double relative_change;
    double t_end;
    double period;
    EvolveDiagnostics diagnostics;
};

// Integrates in the omega_d / 2 frame with the full dissipator set (including
// G terms) and the given drive, starting from the secular probe-frame steady
// state, and averages `observable` over the last drive period.
// Throws ConvergenceError if the last two period averages differ by more than
// opts.tolerance (relative).
QuasiSteadyResult quasi_steady_average(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                                       const TimeDependentHamiltonian& drive, const Operator& observable,
                                       const QuasiSteadyOptions& opts = {});

// Same for several observables sharing one integration.
std::vector<QuasiSteadyResult> quasi_steady_averages(const SystemConfig& cfg, const DerivedParams& d,
                                                     const SpaceDims& dims, const TimeDependentHamiltonian& drive,
                                                     const std::vector<Operator>& observables,
                                                     const QuasiSteadyOptions& opts = {});

// ---------------------------------------------------------------------------
// binary dumps
//
// Little-endian container:
//   char[4]  magic "SQZB"
//   u32      version (1)
//   u32      kind (1 = dense state, 2 = sparse superoperator)
//   u32      mode count, then u32 per mode dimension
//   u64      rows, u64 cols
//   kind 1:  rows*cols complex doubles (re, im), column-major
//   kind 2:  u64 nnz, then nnz records (u64 row, u64 col, f64 re, f64 im)

void write_binary(const std::string& path, const DensityMatrix& rho);
void write_binary(const std::string& path, const Liouvillian& l);
DensityMatrix read_state_binary(const std::string& path);
Liouvillian read_liouvillian_binary(const std::string& path);

} // namespace sqz
