#pragma once

// Random instances and small helpers shared by the test suites.

#include "trinl/qalg.hpp"

#include <array>
#include <random>

namespace trinl::testutil {

inline StateVector random_state(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorStore v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
    return StateVector::normalized(v);
}

/// Random mixed state of the given rank: normalized G G^dagger.
inline DensityMatrix random_density(std::mt19937_64& rng, int dim, int rank = 0) {
    if (rank <= 0) rank = dim;
    std::normal_distribution<double> g(0.0, 1.0);
    MatrixStore m = MatrixStore::Zero(dim, dim);
    for (int r = 0; r < rank; ++r) {
        VectorStore v(dim);
        for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
        m += v * v.adjoint();
    }
    m /= m.trace().real();
    m = 0.5 * (m + m.adjoint().eval());
    return DensityMatrix(ComplexMatrix(m));
}

/// Amplitudes of psi with its qubits relabeled: new qubit q carries old qubit perm[q] (0-based).
inline StateVector permute_qubits(const StateVector& psi, const std::array<int, 3>& perm) {
    VectorStore v(8);
    for (int b = 0; b < 8; ++b) {
        const std::array<int, 3> bits{(b >> 2) & 1, (b >> 1) & 1, b & 1};
        std::array<int, 3> old{};
        for (int q = 0; q < 3; ++q) old[static_cast<std::size_t>(perm[static_cast<std::size_t>(q)])] = bits[static_cast<std::size_t>(q)];
        v(b) = psi[old[0] * 4 + old[1] * 2 + old[2]];
    }
    return StateVector(v);
}

}  // namespace trinl::testutil
