#pragma once

// Small-dimension complex linear algebra for one to three qubits.
//
// Basis convention: index b = 4*q1 + 2*q2 + q3, i.e. qubit 1 is the most
// significant bit and the leftmost tensor factor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinl {

using cplx = std::complex<double>;

/// Raised whenever an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxDim = 8;

using MatrixStore = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using VectorStore = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

namespace detail {

inline bool is_supported_dim(Eigen::Index d) { return d == 1 || d == 2 || d == 4 || d == 8; }

inline int qubits_of(int dim) {
    switch (dim) {
        case 1: return 0;
        case 2: return 1;
        case 4: return 2;
        case 8: return 3;
        default: throw InvalidArgument("dimension must be 1, 2, 4 or 8, got " + std::to_string(dim));
    }
}

}  // namespace detail

/// Square complex matrix of dimension 1, 2, 4 or 8 with finite entries.
class ComplexMatrix {
  public:
    ComplexMatrix() : m_(MatrixStore::Zero(1, 1)) {}

    explicit ComplexMatrix(MatrixStore m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || !detail::is_supported_dim(m_.rows())) {
            throw InvalidArgument("matrix must be square with dimension 1, 2, 4 or 8");
        }
        if (!m_.allFinite()) throw InvalidArgument("matrix has non-finite entries");
    }

    /// Row-major initializer, e.g. ComplexMatrix({{1, 0}, {0, -1}}).
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        const auto n = static_cast<Eigen::Index>(rows.size());
        MatrixStore m(n, n);
        Eigen::Index i = 0;
        for (const auto& row : rows) {
            if (static_cast<Eigen::Index>(row.size()) != n) throw InvalidArgument("ragged matrix initializer");
            Eigen::Index j = 0;
            for (const auto& v : row) m(i, j++) = v;
            ++i;
        }
        *this = ComplexMatrix(std::move(m));
    }

    static ComplexMatrix identity(int dim) { return ComplexMatrix(MatrixStore::Identity(dim, dim)); }
    static ComplexMatrix zero(int dim) { return ComplexMatrix(MatrixStore::Zero(dim, dim)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const MatrixStore& data() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

    cplx trace() const { return m_.trace(); }
    ComplexMatrix adjoint() const { return ComplexMatrix(m_.adjoint()); }

    /// Largest |m(i,j) - conj(m(j,i))|.
    double hermitian_defect() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    bool is_hermitian(double tol = 1e-12) const { return hermitian_defect() <= tol; }

    friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
        check_same(a, b);
        return ComplexMatrix(a.m_ + b.m_);
    }
    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
        check_same(a, b);
        return ComplexMatrix(a.m_ - b.m_);
    }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        check_same(a, b);
        return ComplexMatrix(a.m_ * b.m_);
    }
    friend ComplexMatrix operator*(cplx s, const ComplexMatrix& a) { return ComplexMatrix(s * a.m_); }
    friend ComplexMatrix operator*(double s, const ComplexMatrix& a) { return ComplexMatrix(s * a.m_); }

    /// Largest entrywise modulus of a - b.
    friend double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
        check_same(a, b);
        return (a.m_ - b.m_).cwiseAbs().maxCoeff();
    }

  private:
    static void check_same(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.dim() != b.dim()) throw InvalidArgument("matrix dimension mismatch");
    }

    MatrixStore m_;
};

/// Unit-norm pure state on one to three qubits.
class StateVector {
  public:
    explicit StateVector(VectorStore amplitudes, double tol = 1e-12) : v_(std::move(amplitudes)) {
        if (v_.size() < 2 || !detail::is_supported_dim(v_.size())) {
            throw InvalidArgument("state vector dimension must be 2, 4 or 8");
        }
        if (!v_.allFinite()) throw InvalidArgument("state vector has non-finite amplitudes");
        if (std::abs(v_.squaredNorm() - 1.0) > tol) {
            throw InvalidArgument("state vector is not normalized (squared norm " + std::to_string(v_.squaredNorm()) +
                                  ")");
        }
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    static StateVector normalized(VectorStore amplitudes) {
        const double n = amplitudes.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero or non-finite vector");
        return StateVector(amplitudes / n);
    }

    /// Sparse construction from (basis index, amplitude) pairs; must already be normalized.
    static StateVector from_terms(int dim, std::initializer_list<std::pair<int, cplx>> terms) {
        VectorStore v = VectorStore::Zero(dim);
        for (const auto& [idx, amp] : terms) {
            if (idx < 0 || idx >= dim) throw InvalidArgument("basis index out of range");
            v(idx) += amp;
        }
        return StateVector(std::move(v), 1e-10);
    }

    int dim() const { return static_cast<int>(v_.size()); }
    const VectorStore& data() const { return v_; }
    cplx operator[](int i) const { return v_(i); }

    ComplexMatrix projector() const { return ComplexMatrix(v_ * v_.adjoint()); }

  private:
    VectorStore v_;
};

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityMatrix {
  public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kEigenTol = 1e-10;

    explicit DensityMatrix(ComplexMatrix m);
    explicit DensityMatrix(const StateVector& psi) : m_(psi.projector()) {}

    static DensityMatrix maximally_mixed(int dim) { return DensityMatrix((1.0 / dim) * ComplexMatrix::identity(dim)); }

    int dim() const { return m_.dim(); }
    int qubits() const { return detail::qubits_of(m_.dim()); }
    const ComplexMatrix& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

  private:
    ComplexMatrix m_;
};

/// Real spectrum of a Hermitian matrix in descending order.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m, double tol = 1e-10) {
    if (!m.is_hermitian(tol)) throw InvalidArgument("eigenvalues requested for a non-Hermitian matrix");
    const MatrixStore h = 0.5 * (m.data() + m.data().adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixStore> solver(h, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

inline DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.dim() < 2) throw InvalidArgument("density matrix dimension must be 2, 4 or 8");
    if (!m_.is_hermitian(kHermitianTol)) {
        throw InvalidArgument("density matrix is not Hermitian (defect " + std::to_string(m_.hermitian_defect()) + ")");
    }
    const cplx tr = m_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw InvalidArgument("density matrix trace is " + std::to_string(tr.real()) + ", expected 1");
    }
    const auto ev = hermitian_eigenvalues(m_);
    if (ev.back() < -kEigenTol) {
        throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(ev.back()));
    }
}

/// Eigenvalues in [-1e-10, 0) are set to zero before logs and square roots.
inline double clamp_eigenvalue(double x) { return (x < 0.0 && x >= -DensityMatrix::kEigenTol) ? 0.0 : x; }

/// Kronecker product; `a` is the more significant (left) factor.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int da = a.dim();
    const int db = b.dim();
    if (da * db > kMaxDim) throw InvalidArgument("tensor product exceeds dimension 8");
    MatrixStore out(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a(i, j) * b.data();
    return ComplexMatrix(std::move(out));
}

inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    return tensor(tensor(a, b), c);
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    if (a.dim() * b.dim() > kMaxDim) throw InvalidArgument("tensor product exceeds dimension 8");
    VectorStore v(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i) v.segment(i * b.dim(), b.dim()) = a[i] * b.data();
    return StateVector(std::move(v), 1e-10);
}

/// Single-qubit Pauli matrix; index 0 is the identity, 1..3 are x, y, z.
inline ComplexMatrix pauli(int index) {
    const cplx i{0.0, 1.0};
    switch (index) {
        case 0: return ComplexMatrix({{1, 0}, {0, 1}});
        case 1: return ComplexMatrix({{0, 1}, {1, 0}});
        case 2: return ComplexMatrix({{0, -i}, {i, 0}});
        case 3: return ComplexMatrix({{1, 0}, {0, -1}});
        default: throw InvalidArgument("Pauli index must be 0..3");
    }
}

/// Embeds a single-qubit operator on `qubit` (1-based) of an n-qubit register.
inline ComplexMatrix embed(const ComplexMatrix& op, int qubit, int qubits) {
    if (op.dim() != 2) throw InvalidArgument("embed expects a single-qubit operator");
    if (qubit < 1 || qubit > qubits) throw InvalidArgument("qubit index out of range");
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (int q = 1; q <= qubits; ++q) out = tensor(out, q == qubit ? op : ComplexMatrix::identity(2));
    return out;
}

/// Reduced state on the qubits listed in `keep` (1-based, any order; output keeps register order).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
    const int n = rho.qubits();
    std::sort(keep.begin(), keep.end());
    if (keep.empty() || static_cast<int>(keep.size()) >= n) {
        throw InvalidArgument("partial trace needs a non-empty proper subset of qubits");
    }
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw InvalidArgument("partial trace subset has repeated qubits");
    }
    for (int q : keep) {
        if (q < 1 || q > n) throw InvalidArgument("partial trace qubit index out of range");
    }
    std::vector<int> traced;
    for (int q = 1; q <= n; ++q) {
        if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);
    }
    const auto bit = [n](int q) { return n - q; };
    // Scatter the bits of a reduced index into the kept (or traced) positions.
    const auto spread = [&](int value, const std::vector<int>& qs) {
        int full = 0;
        const int k = static_cast<int>(qs.size());
        for (int t = 0; t < k; ++t) {
            if ((value >> (k - 1 - t)) & 1) full |= 1 << bit(qs[t]);
        }
        return full;
    };
    const int dk = 1 << keep.size();
    const int dt = 1 << traced.size();
    MatrixStore out = MatrixStore::Zero(dk, dk);
    for (int i = 0; i < dk; ++i)
        for (int j = 0; j < dk; ++j) {
            cplx s = 0.0;
            for (int e = 0; e < dt; ++e) {
                const int env = spread(e, traced);
                s += rho(spread(i, keep) | env, spread(j, keep) | env);
            }
            out(i, j) = s;
        }
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(ComplexMatrix(std::move(out)));
}

/// Binary Shannon entropy in bits, with 0 log 0 = 0.
inline double binary_entropy(double p) {
    const auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
    return term(p) + term(1.0 - p);
}

/// Von Neumann entropy in bits.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (double lam : hermitian_eigenvalues(rho.matrix())) {
        lam = clamp_eigenvalue(lam);
        if (lam > 0.0) s -= lam * std::log2(lam);
    }
    return std::max(0.0, s);
}

}  // namespace trinl
