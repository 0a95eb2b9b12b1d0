// master.cpp - Liouvillian assembly, time evolution and steady states

#include "sqzoms/master.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SVD>

namespace sqz {

namespace {

const cd I{0.0, 1.0};

SuperMatrix kron(const SparseMatrix<cd>& a, const SparseMatrix<cd>& b)
{
    return tensor(Operator({static_cast<int>(a.rows())}, a), Operator({static_cast<int>(b.rows())}, b)).matrix;
}

SparseMatrix<cd> eye(Eigen::Index n)
{
    SparseMatrix<cd> m(n, n);
    m.setIdentity();
    return m;
}

} // namespace

// ---------------------------------------------------------------------------
// dissipators

DissipatorSpec DissipatorSpec::secular() const
{
    DissipatorSpec out;
    for (const auto& t : terms) {
        if (t.kind == DissipatorKind::D) out.terms.push_back(t);
    }
    return out;
}

DissipatorSpec standard_dissipators(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims)
{
    dims.validate();
    const ModeOperators m(dims);
    const Operator ad = dagger(m.a);
    const Operator bd = dagger(m.b);
    const double k = cfg.kappa, g = cfg.gamma, n = cfg.n_th_m;
    DissipatorSpec spec;
    spec.terms = {
        {DissipatorKind::D, m.a, cd(k * (d.N_s + 1.0)), "kappa(N_s+1) D[a_s]"},
        {DissipatorKind::D, ad, cd(k * d.N_s), "kappa N_s D[a_s^dag]"},
        {DissipatorKind::G, m.a, -k * d.M_s, "-kappa M_s G[a_s]"},
        {DissipatorKind::G, ad, -k * std::conj(d.M_s), "-kappa M_s^* G[a_s^dag]"},
        {DissipatorKind::D, bd, cd(g * n), "gamma n_th D[b^dag]"},
        {DissipatorKind::D, m.b, cd(g * (n + 1.0)), "gamma(n_th+1) D[b]"},
    };
    return spec;
}

// ---------------------------------------------------------------------------
// superoperators

namespace superop {

SuperMatrix left(const Operator& a)
{
    return kron(eye(a.dim()), a.matrix);
}

SuperMatrix right(const Operator& b)
{
    return kron(SparseMatrix<cd>(b.matrix.transpose()), eye(b.dim()));
}

SuperMatrix hamiltonian(const Operator& h)
{
    return SuperMatrix(-I * (left(h) - right(h)));
}

SuperMatrix dissipator(const Operator& o)
{
    const Operator od = dagger(o);
    const Operator odo = od * o;
    return SuperMatrix(kron(SparseMatrix<cd>(o.matrix.conjugate()), o.matrix) - 0.5 * left(odo) - 0.5 * right(odo));
}

SuperMatrix anomalous(const Operator& o)
{
    const Operator oo = o * o;
    return SuperMatrix(kron(SparseMatrix<cd>(o.matrix.transpose()), o.matrix) - 0.5 * left(oo) - 0.5 * right(oo));
}

} // namespace superop

Liouvillian build_liouvillian(const Operator& h, const DissipatorSpec& diss)
{
    SuperMatrix l = superop::hamiltonian(h);
    for (const auto& term : diss.terms) {
        if (term.op.shape != h.shape) {
            throw DimensionError("build_liouvillian: dissipator " + term.label + " has shape "
                                 + shape_string(term.op.shape) + ", Hamiltonian " + shape_string(h.shape));
        }
        if (term.kind == DissipatorKind::D
            && (term.rate.real() < 0.0 || std::abs(term.rate.imag()) > 1e-14 * std::abs(term.rate))) {
            throw ValidationError("D-term rate must be real and nonnegative: " + term.label);
        }
        if (term.rate == cd(0.0)) continue;
        const SuperMatrix s = term.kind == DissipatorKind::D ? superop::dissipator(term.op)
                                                             : superop::anomalous(term.op);
        l += term.rate * s;
    }
    l.makeCompressed();
    return {h.shape, std::move(l)};
}

DenseVector<cd> vec(const DenseMatrix<cd>& rho)
{
    return Eigen::Map<const DenseVector<cd>>(rho.data(), rho.size());
}

DenseMatrix<cd> unvec(const DenseVector<cd>& v, Eigen::Index dim)
{
    if (v.size() != dim * dim) throw DimensionError("unvec: size mismatch");
    return Eigen::Map<const DenseMatrix<cd>>(v.data(), dim, dim);
}

// ---------------------------------------------------------------------------
// evolution

namespace {

// Drive tones grouped by operator: H_drive(t) = sum_g c_g(t) op_g + h.c.
struct DriveGroup {
    SuperMatrix forward;  // -i[op, .]
    SuperMatrix backward; // -i[op^dag, .]
    std::vector<std::pair<cd, double>> tones;

    cd coefficient(double t) const
    {
        cd c{0.0};
        for (const auto& [amp, w] : tones) c += amp * std::exp(-I * w * t);
        return c;
    }
};

std::vector<DriveGroup> group_drives(std::span<const DriveTerm> drives, const Shape& shape)
{
    std::vector<DriveGroup> groups;
    std::vector<const Operator*> ops;
    for (const auto& term : drives) {
        if (term.op.shape != shape) throw DimensionError("evolve: drive operator shape mismatch");
        auto it = std::find_if(ops.begin(), ops.end(), [&](const Operator* o) {
            return SparseMatrix<cd>(o->matrix - term.op.matrix).norm() == 0.0;
        });
        if (it == ops.end()) {
            groups.push_back({superop::hamiltonian(term.op), superop::hamiltonian(dagger(term.op)), {}});
            ops.push_back(&term.op);
            it = ops.end() - 1;
        }
        groups[static_cast<std::size_t>(it - ops.begin())].tones.emplace_back(term.amplitude, term.frequency);
    }
    return groups;
}

class Rhs {
public:
    Rhs(const SuperMatrix& l, std::vector<DriveGroup> groups) : l_(l), groups_(std::move(groups)) {}

    void operator()(double t, const DenseVector<cd>& y, DenseVector<cd>& out) const
    {
        out.noalias() = l_ * y;
        for (const auto& g : groups_) {
            const cd c = g.coefficient(t);
            out.noalias() += c * (g.forward * y);
            out.noalias() += std::conj(c) * (g.backward * y);
        }
    }

private:
    const SuperMatrix& l_;
    std::vector<DriveGroup> groups_;
};

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double trace_of(const DenseVector<cd>& y, Eigen::Index dim)
{
    cd tr{0.0};
    for (Eigen::Index i = 0; i < dim; ++i) tr += y(i * (dim + 1));
    return std::abs(tr - cd(1.0));
}

} // namespace

EvolveResult evolve(const Liouvillian& l, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                    std::span<const DriveTerm> drives, const EvolveOptions& opts)
{
    if (rho0.shape != l.shape) throw DimensionError("evolve: state and Liouvillian shapes differ");
    if (t_grid.empty()) throw ValidationError("evolve: empty time grid");
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw ValidationError("evolve: time grid must ascend");
    for (const auto& o : opts.observables) {
        if (o.shape != l.shape) throw DimensionError("evolve: observable shape mismatch");
    }

    const Eigen::Index dim = l.hilbert_dim();
    const Rhs rhs(l.matrix, group_drives(drives, l.shape));

    EvolveResult res;
    res.expectations.resize(opts.observables.size());
    auto& diag = res.diagnostics;

    auto record = [&](double t, const DenseVector<cd>& y) {
        DensityMatrix rho{l.shape, unvec(y, dim)};
        res.times.push_back(t);
        for (std::size_t k = 0; k < opts.observables.size(); ++k) {
            res.expectations[k].push_back(expectation(opts.observables[k], rho));
        }
        diag.max_trace_drift = std::max(diag.max_trace_drift, trace_of(y, dim));
        if (opts.check_positivity) {
            const StateCheck c = check_state(rho);
            diag.max_hermiticity = std::max(diag.max_hermiticity, c.hermiticity);
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, c.min_eigenvalue);
            if (c.min_eigenvalue < -1e-6) diag.positivity_flagged = true;
        }
        if (opts.keep_states) res.states.push_back(std::move(rho));
    };

    DenseVector<cd> y = vec(rho0.matrix);
    const Eigen::Index n = y.size();
    DenseVector<cd> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);

    double t = t_grid.front();
    record(t, y);
    rhs(t, y, k1);

    const double span_t = t_grid.back() - t_grid.front();
    double h = opts.initial_step;
    if (h <= 0.0) {
        const double fnorm = k1.cwiseAbs().maxCoeff();
        const double ynorm = y.cwiseAbs().maxCoeff();
        h = fnorm > 0.0 ? 0.01 * ynorm / fnorm : 0.01 * std::max(span_t, 1.0);
        h = std::min(h, std::max(span_t, 1e-3));
    }

    for (std::size_t next = 1; next < t_grid.size(); ++next) {
        const double target = t_grid[next];
        while (t < target) {
            if (diag.steps + diag.rejected >= opts.max_steps) {
                throw StiffnessError("evolve: step budget exhausted at t = " + std::to_string(t));
            }
            bool clipped = false;
            double step = h;
            if (t + step >= target) {
                step = target - t;
                clipped = true;
            }

            tmp = y + step * a21 * k1;
            rhs(t + c2 * step, tmp, k2);
            tmp = y + step * (a31 * k1 + a32 * k2);
            rhs(t + c3 * step, tmp, k3);
            tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * step, tmp, k4);
            tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * step, tmp, k5);
            tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + step, tmp, k6);
            y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + step, y_new, k7);
            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double enorm = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double sc = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
                enorm = std::max(enorm, std::abs(err(i)) / sc);
            }

            const double factor = enorm > 0.0 ? std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0) : 5.0;
            if (enorm <= 1.0) {
                t = clipped ? target : t + step;
                y.swap(y_new);
                k1.swap(k7);
                ++diag.steps;
                // a clipped step says nothing about the natural step size
                if (!clipped || factor < 1.0) h = step * factor;
            } else {
                ++diag.rejected;
                h = step * std::min(factor, 1.0);
                if (h < opts.min_step) {
                    throw StiffnessError("evolve: step size underflow at t = " + std::to_string(t)
                                         + "; reduce the truncation or the bath squeezing");
                }
            }
        }
        record(t, y);
    }
    return res;
}

// ---------------------------------------------------------------------------
// steady state

namespace {

double inf_norm(const SuperMatrix& m)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SuperMatrix::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
    }
    return rows.size() ? rows.maxCoeff() : 0.0;
}

SuperMatrix with_trace_row(const SuperMatrix& l, Eigen::Index dim)
{
    std::vector<Eigen::Triplet<cd>> trips;
    trips.reserve(static_cast<std::size_t>(l.nonZeros() + dim));
    for (Eigen::Index k = 0; k < l.outerSize(); ++k) {
        for (SuperMatrix::InnerIterator it(l, k); it; ++it) {
            if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < dim; ++i) trips.emplace_back(0, i * (dim + 1), cd(1.0));
    SuperMatrix out(l.rows(), l.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

} // namespace

int nullity(const Liouvillian& l, double tol)
{
    if (l.matrix.rows() > 2500) return -1;
    const DenseMatrix<cd> dense(l.matrix);
    Eigen::BDCSVD<DenseMatrix<cd>> svd(dense);
    const auto& sv = svd.singularValues();
    const double cut = tol * std::max(sv.size() ? sv(0) : 0.0, 1e-300);
    int count = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) count += sv(i) <= cut ? 1 : 0;
    return count;
}

void SteadyStateSolver::degenerate(const Liouvillian& l, const std::string& why) const
{
    const int k = nullity(l);
    std::ostringstream os;
    os << "steady state is not unique or not resolvable (" << why << "); null-space dimension ";
    if (k >= 0) os << k; else os << "unknown (problem too large to measure)";
    throw DegeneracyError(os.str(), k);
}

DensityMatrix SteadyStateSolver::solve(const Liouvillian& l)
{
    const Eigen::Index dim = l.hilbert_dim();
    const SuperMatrix a = with_trace_row(l.matrix, dim);
    DenseVector<cd> rhs = DenseVector<cd>::Zero(a.rows());
    rhs(0) = 1.0;
    info_ = {};

    if (dim > opts_.direct_limit) {
        Eigen::BiCGSTAB<SuperMatrix, Eigen::IncompleteLUT<cd>> it;
        it.preconditioner().setDroptol(1e-6);
        it.preconditioner().setFillfactor(20);
        it.setMaxIterations(opts_.max_iterations);
        it.setTolerance(1e-13);
        it.compute(a);
        if (it.info() == Eigen::Success) {
            DenseVector<cd> x = it.solve(rhs);
            if (it.info() == Eigen::Success) {
                info_.iterative = true;
                info_.iterations = static_cast<int>(it.iterations());
                try {
                    return finish(l, a, x);
                } catch (const DegeneracyError&) {
                    // fall through to the direct solver
                }
            }
        }
        warn("steady_state: iterative solve did not reach the residual target, using sparse LU");
    }

    const bool same_pattern = analyzed_ && a.nonZeros() == static_cast<Eigen::Index>(inner_.size())
                              && std::equal(outer_.begin(), outer_.end(), a.outerIndexPtr())
                              && std::equal(inner_.begin(), inner_.end(), a.innerIndexPtr());
    if (!same_pattern) {
        lu_.analyzePattern(a);
        outer_.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
        inner_.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
        analyzed_ = true;
    }
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success) degenerate(l, "singular constrained Liouvillian");
    const DenseVector<cd> x = lu_.solve(rhs);
    return finish(l, a, x);
}

DensityMatrix SteadyStateSolver::finish(const Liouvillian& l, const SuperMatrix&, const DenseVector<cd>& x)
{
    const Eigen::Index dim = l.hilbert_dim();
    DenseMatrix<cd> rho = unvec(x, dim);
    if (!rho.allFinite()) degenerate(l, "non-finite solution");
    rho = (rho + rho.adjoint()).eval() / 2.0;
    rho /= rho.trace();

    const double norm = inf_norm(l.matrix);
    info_.residual = (l.matrix * vec(rho)).cwiseAbs().maxCoeff() / (norm > 0.0 ? norm : 1.0);
    if (!(info_.residual < opts_.residual_tol)) {
        std::ostringstream os;
        os << "relative residual " << info_.residual;
        degenerate(l, os.str());
    }
    DensityMatrix out{l.shape, std::move(rho)};
    info_.min_eigenvalue = check_state(out).min_eigenvalue;
    if (info_.min_eigenvalue < -1e-6) {
        warn("steady_state: minimum eigenvalue " + std::to_string(info_.min_eigenvalue)
             + " indicates a truncation problem");
    }
    return out;
}

DensityMatrix steady_state(const Liouvillian& l, const SteadyStateOptions& opts)
{
    SteadyStateSolver solver(opts);
    return solver.solve(l);
}

// ---------------------------------------------------------------------------
// long-time averages

std::vector<QuasiSteadyResult> quasi_steady_averages(const SystemConfig& cfg, const DerivedParams& d,
                                                     const SpaceDims& dims, const TimeDependentHamiltonian& drive,
                                                     const std::vector<Operator>& observables,
                                                     const QuasiSteadyOptions& opts)
{
    const DissipatorSpec diss = standard_dissipators(cfg, d, dims);
    const Liouvillian lab = build_liouvillian(drive.static_part, diss);
    std::vector<QuasiSteadyResult> out;

    if (drive.drive_terms.empty()) {
        const DensityMatrix rho = steady_state(lab);
        for (const auto& o : observables) {
            const double v = expectation(o, rho).real();
            out.push_back({v, v, 0.0, 0.0, 0.0, {}});
        }
        return out;
    }

    const double omega = std::abs(drive.drive_terms.front().frequency);
    if (!(omega > 0.0)) throw UnsupportedFrameError("quasi_steady_average: drive frequency must be nonzero");
    const double period = 2.0 * std::numbers::pi / omega;
    const double t_end = std::max(opts.t_end.value_or(std::max(20.0 / cfg.kappa, 200.0 / cfg.omega_m)), 2.0 * period);

    // warm start: secular steady state in the probe frame coincides with the
    // lab-frame state at t = 0
    const Liouvillian rotating = build_liouvillian(build_probe_frame(cfg, d, dims), diss.secular());
    const DensityMatrix rho0 = steady_state(rotating);

    const int per = opts.samples_per_period;
    std::vector<double> grid{0.0};
    for (int k = 0; k < 2 * per; ++k) grid.push_back(t_end - 2.0 * period + k * period / per);

    EvolveOptions eo = opts.evolve;
    eo.keep_states = false;
    eo.observables = observables;
    const EvolveResult run = evolve(lab, rho0, grid, drive.drive_terms, eo);

    for (std::size_t i = 0; i < observables.size(); ++i) {
        double first = 0.0, second = 0.0;
        for (int k = 0; k < per; ++k) {
            first += run.expectations[i][static_cast<std::size_t>(1 + k)].real();
            second += run.expectations[i][static_cast<std::size_t>(1 + per + k)].real();
        }
        first /= per;
        second /= per;
        const double change = std::abs(second - first) / std::max(std::abs(second), 1e-300);
        if (change > opts.tolerance) {
            std::ostringstream os;
            os << "quasi_steady_average: period averages differ by " << change << " (relative) at t_end = "
               << t_end << "; increase t_end";
            throw ConvergenceError(os.str());
        }
        out.push_back({second, first, change, t_end, period, run.diagnostics});
    }
    return out;
}

QuasiSteadyResult quasi_steady_average(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims,
                                       const TimeDependentHamiltonian& drive, const Operator& observable,
                                       const QuasiSteadyOptions& opts)
{
    return quasi_steady_averages(cfg, d, dims, drive, {observable}, opts).front();
}

// ---------------------------------------------------------------------------
// binary dumps

namespace {

constexpr std::array<char, 4> kMagic{'S', 'Q', 'Z', 'B'};

void put_u64(std::ostream& os, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u32(std::ostream& os, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        const int c = is.get();
        if (c == EOF) throw ValidationError("binary dump: unexpected end of file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

std::uint32_t get_u32(std::istream& is)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        const int c = is.get();
        if (c == EOF) throw ValidationError("binary dump: unexpected end of file");
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_header(std::ostream& os, std::uint32_t kind, const Shape& shape, Eigen::Index rows, Eigen::Index cols)
{
    os.write(kMagic.data(), 4);
    put_u32(os, 1);
    put_u32(os, kind);
    put_u32(os, static_cast<std::uint32_t>(shape.size()));
    for (int s : shape) put_u32(os, static_cast<std::uint32_t>(s));
    put_u64(os, static_cast<std::uint64_t>(rows));
    put_u64(os, static_cast<std::uint64_t>(cols));
}

struct Header {
    std::uint32_t kind;
    Shape shape;
    Eigen::Index rows, cols;
};

Header get_header(std::istream& is)
{
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || magic != kMagic) throw ValidationError("binary dump: bad magic");
    if (get_u32(is) != 1) throw ValidationError("binary dump: unsupported version");
    Header h{};
    h.kind = get_u32(is);
    const std::uint32_t modes = get_u32(is);
    for (std::uint32_t i = 0; i < modes; ++i) h.shape.push_back(static_cast<int>(get_u32(is)));
    h.rows = static_cast<Eigen::Index>(get_u64(is));
    h.cols = static_cast<Eigen::Index>(get_u64(is));
    return h;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    return os;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open " + path);
    return is;
}

} // namespace

void write_binary(const std::string& path, const DensityMatrix& rho)
{
    auto os = open_out(path);
    put_header(os, 1, rho.shape, rho.matrix.rows(), rho.matrix.cols());
    for (Eigen::Index j = 0; j < rho.matrix.cols(); ++j) {
        for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i) {
            put_f64(os, rho.matrix(i, j).real());
            put_f64(os, rho.matrix(i, j).imag());
        }
    }
}

void write_binary(const std::string& path, const Liouvillian& l)
{
    auto os = open_out(path);
    put_header(os, 2, l.shape, l.matrix.rows(), l.matrix.cols());
    put_u64(os, static_cast<std::uint64_t>(l.matrix.nonZeros()));
    for (Eigen::Index k = 0; k < l.matrix.outerSize(); ++k) {
        for (SuperMatrix::InnerIterator it(l.matrix, k); it; ++it) {
            put_u64(os, static_cast<std::uint64_t>(it.row()));
            put_u64(os, static_cast<std::uint64_t>(it.col()));
            put_f64(os, it.value().real());
            put_f64(os, it.value().imag());
        }
    }
}

DensityMatrix read_state_binary(const std::string& path)
{
    auto is = open_in(path);
    const Header h = get_header(is);
    if (h.kind != 1) throw ValidationError("binary dump: not a dense state");
    DensityMatrix rho{h.shape, DenseMatrix<cd>(h.rows, h.cols)};
    for (Eigen::Index j = 0; j < h.cols; ++j) {
        for (Eigen::Index i = 0; i < h.rows; ++i) {
            const double re = get_f64(is);
            rho.matrix(i, j) = cd(re, get_f64(is));
        }
    }
    return rho;
}

Liouvillian read_liouvillian_binary(const std::string& path)
{
    auto is = open_in(path);
    const Header h = get_header(is);
    if (h.kind != 2) throw ValidationError("binary dump: not a superoperator");
    const std::uint64_t nnz = get_u64(is);
    std::vector<Eigen::Triplet<cd>> trips;
    trips.reserve(nnz);
    for (std::uint64_t k = 0; k < nnz; ++k) {
        const auto r = static_cast<Eigen::Index>(get_u64(is));
        const auto c = static_cast<Eigen::Index>(get_u64(is));
        const double re = get_f64(is);
        trips.emplace_back(r, c, cd(re, get_f64(is)));
    }
    SuperMatrix m(h.rows, h.cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return {h.shape, std::move(m)};
}

} // namespace sqz
