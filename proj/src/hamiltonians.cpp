// hamiltonians.cpp - Hamiltonian builders and spectra

#include "sqzoms/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sqz {

namespace {

const cd I{0.0, 1.0};

void check_regime(const SystemConfig& cfg, const DerivedParams& d, Regime wanted, const char* who)
{
    const auto rep = rwa_validity(cfg, d);
    const bool ok = rep.regime == wanted
                    || (wanted == Regime::RadiationPressure && rep.regime == Regime::Bare);
    if (!ok) {
        warn(std::string(who) + ": parameters are in the " + to_string(rep.regime)
             + " regime, the rotating-wave approximation may not hold");
    }
}

Operator free_part(double omega_a, double omega_m, const ModeOperators& m)
{
    return omega_a * m.n_a + omega_m * m.n_b;
}

} // namespace

Operator TimeDependentHamiltonian::at(double t) const
{
    Operator h = static_part;
    for (const auto& term : drive_terms) {
        const cd c = term.amplitude * std::exp(-I * term.frequency * t);
        const Operator drive = c * term.op;
        h = h + drive + dagger(drive);
    }
    return h;
}

Operator build_original(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims)
{
    dims.validate();
    if (dims.n_cav < 4) {
        warn("build_original: n_cav < 4 cannot represent parametric pumping meaningfully");
    }
    const ModeOperators m(dims);
    const Operator ad = dagger(m.a);
    const Operator x = m.b + dagger(m.b);
    const cd pump = cfg.Lambda * std::exp(-I * cfg.Phi_d);
    return cfg.Delta_c * m.n_a + pump * (ad * ad) + std::conj(pump) * (m.a * m.a)
           + cfg.omega_m * m.n_b + d.F * x - cfg.g0 * (m.n_a * x);
}

Operator build_squeezed(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims)
{
    dims.validate();
    const ModeOperators m(dims);
    const Operator ad = dagger(m.a);
    const Operator x = m.b + dagger(m.b);
    return free_part(d.omega_s, cfg.omega_m, m) - d.g_s * (m.n_a * x)
           + (0.5 * d.g_p) * ((ad * ad + m.a * m.a) * x);
}

Operator build_rwa_oms(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims)
{
    dims.validate();
    const ModeOperators m(dims);
    return free_part(d.omega_s, cfg.omega_m, m) - d.g_s * (m.n_a * (m.b + dagger(m.b)));
}

Operator build_parametric_pi(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims)
{
    dims.validate();
    check_regime(cfg, d, Regime::Parametric, "build_parametric_pi");
    const ModeOperators m(dims);
    const Operator down = (m.a * m.a) * dagger(m.b);
    return free_part(d.omega_s, cfg.omega_m, m) + d.g_p * (down + dagger(down));
}

TimeDependentHamiltonian build_probed(const SystemConfig& cfg, const DerivedParams& d,
                                      const SpaceDims& dims, bool rwa)
{
    TimeDependentHamiltonian h;
    if (rwa) check_regime(cfg, d, Regime::RadiationPressure, "build_probed");
    h.static_part = rwa ? build_rwa_oms(cfg, d, dims) : build_squeezed(cfg, d, dims);
    if (cfg.eps_l == 0.0) return h;

    const Operator ad = dagger(on_cavity(annihilator(dims.n_cav), dims));
    h.drive_terms.push_back({ad, cd(cfg.eps_l * std::cosh(d.r_d)), cfg.omega_l_s});
    if (!rwa && d.r_d != 0.0) {
        h.drive_terms.push_back(
            {ad, -cfg.eps_l * std::sinh(d.r_d) * std::exp(-I * cfg.Phi_d), -cfg.omega_l_s});
    }
    return h;
}

Operator rotate_probe_frame(const TimeDependentHamiltonian& h)
{
    if (h.drive_terms.size() > 1) {
        throw UnsupportedFrameError("rotate_probe_frame: two drive tones cannot be made static "
                                    "in a single rotating frame");
    }
    if (h.shape().size() != 2) throw DimensionError("rotate_probe_frame: expected cavity x mechanics shape");
    const SpaceDims dims{h.shape()[0], h.shape()[1]};
    if (h.drive_terms.empty()) return h.static_part;

    const DriveTerm& tone = h.drive_terms.front();
    const Operator n_a = on_cavity(number(dims.n_cav), dims);
    const Operator drive = tone.amplitude * tone.op;
    return h.static_part - tone.frequency * n_a + drive + dagger(drive);
}

Operator build_probe_frame(const SystemConfig& cfg, const DerivedParams& d, const SpaceDims& dims)
{
    return rotate_probe_frame(build_probed(cfg, d, dims, true));
}

namespace {

using DenseC = DenseMatrix<cd>;
using VecC = DenseVector<cd>;

std::vector<double> dense_lowest(const DenseC& h, int k)
{
    Eigen::SelfAdjointEigenSolver<DenseC> es(h, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + k};
}

// Lanczos with full reorthogonalization; grows the Krylov space until the k
// lowest Ritz values stop moving.
std::vector<double> lanczos_lowest(const SparseMatrix<cd>& h, int k)
{
    const Eigen::Index n = h.rows();
    const Eigen::Index max_m = std::min<Eigen::Index>(n, 600);
    DenseC basis(n, max_m);
    VecC v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cd(1.0 + 0.01 * std::sin(1.0 + i), 0.0);
    v.normalize();

    std::vector<double> alpha, beta;
    std::vector<double> previous;
    for (Eigen::Index j = 0; j < max_m; ++j) {
        basis.col(j) = v;
        VecC w = h * v;
        alpha.push_back(v.dot(w).real());
        for (int pass = 0; pass < 2; ++pass) {
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
        }
        const double b = w.norm();

        const Eigen::Index m = j + 1;
        if (m >= k && (m % 10 == 0 || b < 1e-12 || m == max_m)) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                t(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
            std::vector<double> ritz(es.eigenvalues().data(), es.eigenvalues().data() + k);
            bool settled = previous.size() == ritz.size();
            for (std::size_t i = 0; settled && i < ritz.size(); ++i) {
                settled = std::abs(ritz[i] - previous[i]) <= 1e-12 * std::max(1.0, std::abs(ritz[i]));
            }
            if (settled || b < 1e-12 || m == max_m) return ritz;
            previous = std::move(ritz);
        }
        beta.push_back(b);
        v = w / b;
    }
    throw ConvergenceError("Lanczos did not converge");
}

} // namespace

std::vector<double> lowest_eigenvalues(const Operator& h, int k)
{
    if (k < 0 || k > h.dim()) throw DimensionError("lowest_eigenvalues: k exceeds dimension");
    if (k == 0) return {};
    if (h.dim() <= 2000) return dense_lowest(h.dense(), k);
    return lanczos_lowest(h.matrix, k);
}

std::vector<double> level_structure(const SystemConfig& cfg, const DerivedParams& d,
                                    const SpaceDims& dims, int k)
{
    return lowest_eigenvalues(build_rwa_oms(cfg, d, dims), k);
}

std::vector<double> photon_sector_levels(const SystemConfig& cfg, const DerivedParams& d,
                                         const SpaceDims& dims, int n_max)
{
    dims.validate();
    if (n_max >= dims.n_cav) throw DimensionError("photon_sector_levels: n_max outside truncation");
    const Operator b = annihilator(dims.n_mech);
    const DenseC x = (b + dagger(b)).dense();
    const DenseC nb = number(dims.n_mech).dense();
    std::vector<double> out;
    for (int n = 0; n <= n_max; ++n) {
        const DenseC block = cfg.omega_m * nb - (d.g_s * n) * x;
        out.push_back(n * d.omega_s + dense_lowest(block, 1).front());
    }
    return out;
}

} // namespace sqz
