// fock.hpp - truncated bosonic Fock-space operators, states and expectation values
//
// Composite basis ordering is cavity-major: i = i_cav * n_mech + i_mech.
// Operators are sparse, density matrices dense.

#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sqzoms/errors.hpp"

namespace sqz {

using cd = std::complex<double>;
using Shape = std::vector<int>;

inline constexpr int kDefaultDimensionCap = 4096;

inline long shape_size(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), 1L, std::multiplies<long>());
}

std::string shape_string(const Shape& shape);

struct SpaceDims {
    int n_cav{6};   // photon levels 0..n_cav-1
    int n_mech{14}; // phonon levels 0..n_mech-1

    int total() const { return n_cav * n_mech; }
    Shape shape() const { return {n_cav, n_mech}; }
    int index(int i_cav, int i_mech) const { return i_cav * n_mech + i_mech; }

    void validate(int cap = kDefaultDimensionCap) const;

    SpaceDims enlarged(int extra_cav, int extra_mech) const
    {
        return {n_cav + extra_cav, n_mech + extra_mech};
    }

    friend bool operator==(const SpaceDims&, const SpaceDims&) = default;
};

template <class Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;
template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct BasicOperator {
    Shape shape;
    SparseMatrix<Scalar> matrix;

    BasicOperator() = default;
    BasicOperator(Shape shape_, SparseMatrix<Scalar> matrix_)
        : shape(std::move(shape_)), matrix(std::move(matrix_))
    {
        if (matrix.rows() != matrix.cols()) {
            throw DimensionError("operator matrix must be square");
        }
        if (shape_size(shape) != matrix.rows()) {
            throw DimensionError("operator shape " + shape_string(shape)
                                 + " does not match matrix size " + std::to_string(matrix.rows()));
        }
    }

    Eigen::Index dim() const { return matrix.rows(); }
    Scalar operator()(Eigen::Index row, Eigen::Index col) const { return matrix.coeff(row, col); }
    DenseMatrix<Scalar> dense() const { return DenseMatrix<Scalar>(matrix); }
};

template <class Scalar>
struct BasicDensityMatrix {
    Shape shape;
    DenseMatrix<Scalar> matrix;

    Eigen::Index dim() const { return matrix.rows(); }
};

template <class Scalar>
struct BasicStateVector {
    Shape shape;
    DenseVector<Scalar> amplitudes;

    BasicStateVector() = default;
    // Normalizes on construction.
    BasicStateVector(Shape shape_, DenseVector<Scalar> amps)
        : shape(std::move(shape_)), amplitudes(std::move(amps))
    {
        if (shape_size(shape) != amplitudes.size()) {
            throw DimensionError("state shape does not match amplitude count");
        }
        const auto norm = amplitudes.norm();
        if (!(norm > 0)) {
            throw DimensionError("cannot normalize a zero state vector");
        }
        amplitudes /= norm;
    }
};

using Operator = BasicOperator<cd>;
using DensityMatrix = BasicDensityMatrix<cd>;
using StateVector = BasicStateVector<cd>;

namespace detail {

inline void require_same_shape(const Shape& a, const Shape& b, const char* what)
{
    if (a != b) {
        throw DimensionError(std::string(what) + ": shape mismatch " + shape_string(a) + " vs "
                             + shape_string(b));
    }
}

inline void require_dim(int dim)
{
    if (dim < 2) {
        throw DimensionError("mode truncation must be >= 2, got " + std::to_string(dim));
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// single-mode builders

template <class Scalar = cd>
BasicOperator<Scalar> identity(int dim)
{
    SparseMatrix<Scalar> m(dim, dim);
    m.setIdentity();
    return {{dim}, std::move(m)};
}

// <n-1|a|n> = sqrt(n)
template <class Scalar = cd>
BasicOperator<Scalar> annihilator(int dim)
{
    detail::require_dim(dim);
    std::vector<Eigen::Triplet<Scalar>> trips;
    trips.reserve(static_cast<std::size_t>(dim));
    for (int n = 1; n < dim; ++n) {
        using std::sqrt;
        trips.emplace_back(n - 1, n, Scalar(sqrt(static_cast<typename Eigen::NumTraits<Scalar>::Real>(n))));
    }
    SparseMatrix<Scalar> m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return {{dim}, std::move(m)};
}

template <class Scalar = cd>
BasicOperator<Scalar> number(int dim)
{
    detail::require_dim(dim);
    std::vector<Eigen::Triplet<Scalar>> trips;
    for (int n = 1; n < dim; ++n) trips.emplace_back(n, n, Scalar(n));
    SparseMatrix<Scalar> m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return {{dim}, std::move(m)};
}

// ---------------------------------------------------------------------------
// algebra

template <class Scalar>
BasicOperator<Scalar> dagger(const BasicOperator<Scalar>& a)
{
    return {a.shape, SparseMatrix<Scalar>(a.matrix.adjoint())};
}

template <class Scalar>
BasicOperator<Scalar> operator+(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b)
{
    detail::require_same_shape(a.shape, b.shape, "operator+");
    return {a.shape, SparseMatrix<Scalar>(a.matrix + b.matrix)};
}

template <class Scalar>
BasicOperator<Scalar> operator-(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b)
{
    detail::require_same_shape(a.shape, b.shape, "operator-");
    return {a.shape, SparseMatrix<Scalar>(a.matrix - b.matrix)};
}

template <class Scalar>
BasicOperator<Scalar> operator*(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b)
{
    detail::require_same_shape(a.shape, b.shape, "operator*");
    return {a.shape, SparseMatrix<Scalar>(a.matrix * b.matrix)};
}

template <class Scalar, class Factor>
BasicOperator<Scalar> operator*(const Factor& s, const BasicOperator<Scalar>& a)
{
    return {a.shape, SparseMatrix<Scalar>(Scalar(s) * a.matrix)};
}

template <class Scalar>
BasicOperator<Scalar> commutator(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b)
{
    return a * b - b * a;
}

// Kronecker product; the left factor is the slow index.
template <class Scalar>
BasicOperator<Scalar> tensor(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b)
{
    const Eigen::Index nb = b.dim();
    std::vector<Eigen::Triplet<Scalar>> trips;
    trips.reserve(static_cast<std::size_t>(a.matrix.nonZeros() * b.matrix.nonZeros()));
    for (Eigen::Index ka = 0; ka < a.matrix.outerSize(); ++ka) {
        for (typename SparseMatrix<Scalar>::InnerIterator ia(a.matrix, ka); ia; ++ia) {
            for (Eigen::Index kb = 0; kb < b.matrix.outerSize(); ++kb) {
                for (typename SparseMatrix<Scalar>::InnerIterator ib(b.matrix, kb); ib; ++ib) {
                    trips.emplace_back(ia.row() * nb + ib.row(), ia.col() * nb + ib.col(),
                                       ia.value() * ib.value());
                }
            }
        }
    }
    SparseMatrix<Scalar> m(a.dim() * nb, a.dim() * nb);
    m.setFromTriplets(trips.begin(), trips.end());
    Shape shape = a.shape;
    shape.insert(shape.end(), b.shape.begin(), b.shape.end());
    return {std::move(shape), std::move(m)};
}

// Largest |A - A^dagger| entry.
template <class Scalar>
double hermiticity_defect(const BasicOperator<Scalar>& a)
{
    const SparseMatrix<Scalar> diff = a.matrix - SparseMatrix<Scalar>(a.matrix.adjoint());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
        for (typename SparseMatrix<Scalar>::InnerIterator it(diff, k); it; ++it) {
            worst = std::max(worst, static_cast<double>(std::abs(it.value())));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// embedding into the cavity (x) mechanics space

template <class Scalar>
BasicOperator<Scalar> on_cavity(const BasicOperator<Scalar>& op, const SpaceDims& dims)
{
    if (op.shape != Shape{dims.n_cav}) throw DimensionError("on_cavity: operator is not a cavity operator");
    return tensor(op, identity<Scalar>(dims.n_mech));
}

template <class Scalar>
BasicOperator<Scalar> on_mechanics(const BasicOperator<Scalar>& op, const SpaceDims& dims)
{
    if (op.shape != Shape{dims.n_mech}) throw DimensionError("on_mechanics: operator is not a mechanical operator");
    return tensor(identity<Scalar>(dims.n_cav), op);
}

// The ladder operators every Hamiltonian and dissipator is built from.
struct ModeOperators {
    Operator a;    // squeezed (or bare) cavity mode
    Operator b;    // mechanical mode
    Operator id;
    Operator n_a;
    Operator n_b;

    explicit ModeOperators(const SpaceDims& dims)
        : a(on_cavity(annihilator(dims.n_cav), dims)),
          b(on_mechanics(annihilator(dims.n_mech), dims)),
          id(tensor(identity(dims.n_cav), identity(dims.n_mech))),
          n_a(on_cavity(number(dims.n_cav), dims)),
          n_b(on_mechanics(number(dims.n_mech), dims))
    {
    }
};

// ---------------------------------------------------------------------------
// states

template <class Scalar>
BasicDensityMatrix<Scalar> projector(const BasicStateVector<Scalar>& psi)
{
    return {psi.shape, psi.amplitudes * psi.amplitudes.adjoint()};
}

// Truncated Bose-Einstein distribution p_n ~ nbar^n / (nbar+1)^(n+1),
// renormalized to unit trace.
template <class Scalar = cd>
BasicDensityMatrix<Scalar> thermal_state(double nbar, int dim)
{
    detail::require_dim(dim);
    if (!(nbar >= 0.0)) throw ValidationError("thermal occupancy must be >= 0");
    DenseMatrix<Scalar> rho = DenseMatrix<Scalar>::Zero(dim, dim);
    const double ratio = nbar / (nbar + 1.0);
    double weight = 1.0;
    double total = 0.0;
    for (int n = 0; n < dim; ++n) {
        rho(n, n) = Scalar(weight);
        total += weight;
        weight *= ratio;
    }
    rho /= Scalar(total);
    return {{dim}, std::move(rho)};
}

template <class Scalar>
BasicDensityMatrix<Scalar> tensor(const BasicDensityMatrix<Scalar>& a, const BasicDensityMatrix<Scalar>& b)
{
    const Eigen::Index na = a.dim(), nb = b.dim();
    DenseMatrix<Scalar> m(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < na; ++j) {
            m.block(i * nb, j * nb, nb, nb) = a.matrix(i, j) * b.matrix;
        }
    }
    Shape shape = a.shape;
    shape.insert(shape.end(), b.shape.begin(), b.shape.end());
    return {std::move(shape), std::move(m)};
}

template <class Scalar = cd>
BasicStateVector<Scalar> fock_state(int n_c, int n_m, const SpaceDims& dims)
{
    if (n_c < 0 || n_m < 0 || n_c >= dims.n_cav || n_m >= dims.n_mech) {
        throw DimensionError("fock_state: index outside truncation");
    }
    DenseVector<Scalar> amps = DenseVector<Scalar>::Zero(dims.total());
    amps(dims.index(n_c, n_m)) = Scalar(1);
    return {dims.shape(), std::move(amps)};
}

template <class Scalar = cd>
BasicDensityMatrix<Scalar> vacuum(const SpaceDims& dims)
{
    return projector(fock_state<Scalar>(0, 0, dims));
}

// Tr(A rho)
template <class Scalar>
Scalar expectation(const BasicOperator<Scalar>& a, const BasicDensityMatrix<Scalar>& rho)
{
    detail::require_same_shape(a.shape, rho.shape, "expectation");
    Scalar acc(0);
    for (Eigen::Index k = 0; k < a.matrix.outerSize(); ++k) {
        for (typename SparseMatrix<Scalar>::InnerIterator it(a.matrix, k); it; ++it) {
            acc += it.value() * rho.matrix(it.col(), it.row());
        }
    }
    return acc;
}

template <class Scalar>
Scalar expectation(const BasicOperator<Scalar>& a, const BasicStateVector<Scalar>& psi)
{
    detail::require_same_shape(a.shape, psi.shape, "expectation");
    return psi.amplitudes.dot(a.matrix * psi.amplitudes);
}

struct StateCheck {
    double hermiticity{0.0}; // max |rho - rho^dagger|
    double trace_error{0.0}; // |Tr rho - 1|
    double min_eigenvalue{0.0};
};

template <class Scalar>
StateCheck check_state(const BasicDensityMatrix<Scalar>& rho)
{
    StateCheck out;
    out.hermiticity = static_cast<double>((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff());
    out.trace_error = static_cast<double>(std::abs(rho.matrix.trace() - Scalar(1)));
    const DenseMatrix<Scalar> herm = (rho.matrix + rho.matrix.adjoint()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(herm, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = static_cast<double>(es.eigenvalues().minCoeff());
    return out;
}

// Throws if rho violates Hermiticity (1e-10), unit trace (1e-10) or
// numerical positivity (-1e-8).
template <class Scalar>
void validate_state(const BasicDensityMatrix<Scalar>& rho)
{
    if (shape_size(rho.shape) != rho.dim() || rho.matrix.rows() != rho.matrix.cols()) {
        throw DimensionError("density matrix shape mismatch");
    }
    const StateCheck c = check_state(rho);
    if (c.hermiticity > 1e-10) throw ValidationError("density matrix is not Hermitian");
    if (c.trace_error > 1e-10) throw ValidationError("density matrix trace differs from 1");
    if (c.min_eigenvalue < -1e-8) throw ValidationError("density matrix has a negative eigenvalue");
}

} // namespace sqz
