// helpers.hpp - shared fixtures for the unit tests
#pragma once

#include <complex>
#include <random>

#include "sqzoms/fock.hpp"

namespace sqz::test {

inline DenseMatrix<cd> random_matrix(int n, std::mt19937& rng)
{
    std::normal_distribution<double> g;
    DenseMatrix<cd> m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = {g(rng), g(rng)};
    return m;
}

// Random full-rank density matrix on `shape`.
inline DensityMatrix random_state(const Shape& shape, std::mt19937& rng)
{
    const int n = static_cast<int>(shape_size(shape));
    const DenseMatrix<cd> x = random_matrix(n, rng);
    DenseMatrix<cd> rho = x * x.adjoint();
    rho /= rho.trace();
    return {shape, rho};
}

inline DenseMatrix<cd> kron(const DenseMatrix<cd>& a, const DenseMatrix<cd>& b)
{
    DenseMatrix<cd> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace sqz::test
