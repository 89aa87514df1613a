#pragma once

// Single-qubit Kraus channels on three-qubit states, plus two two-level
// closed forms for channel-degraded GGHZ states kept for comparison.

#include "trinl/qalg.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace trinl {

enum class ChannelKind { DEPOLARIZE, AMPLITUDE_DAMP };

struct ChannelSpec {
    ChannelKind kind = ChannelKind::DEPOLARIZE;
    std::array<double, 3> strengths{0.0, 0.0, 0.0};  // per qubit 1, 2, 3
};

namespace detail {

inline void check_strength(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("channel strength must lie in [0, 1]");
}

inline DensityMatrix apply_kraus(const DensityMatrix& rho, int qubit, const std::vector<ComplexMatrix>& kraus) {
    const int n = rho.qubits();
    if (qubit < 1 || qubit > n) throw InvalidArgument("qubit index out of range");
    MatrixStore out = MatrixStore::Zero(rho.dim(), rho.dim());
    for (const auto& k : kraus) {
        const MatrixStore big = embed(k, qubit, n).data();
        out += big * rho.matrix().data() * big.adjoint();
    }
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(ComplexMatrix(std::move(out)));
}

}  // namespace detail

/// Kraus set {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
inline std::vector<ComplexMatrix> depolarizing_kraus(double p) {
    detail::check_strength(p);
    const double a = std::sqrt(1.0 - 0.75 * p);
    const double b = std::sqrt(0.25 * p);
    return {a * pauli(0), b * pauli(1), b * pauli(2), b * pauli(3)};
}

/// E0 = diag(1, sqrt(1-g)), E1 = sqrt(g)|0><1|.
inline std::vector<ComplexMatrix> amplitude_damping_kraus(double gamma) {
    detail::check_strength(gamma);
    return {ComplexMatrix({{1, 0}, {0, std::sqrt(1.0 - gamma)}}), ComplexMatrix({{0, std::sqrt(gamma)}, {0, 0}})};
}

inline DensityMatrix depolarize_qubit(const DensityMatrix& rho, int qubit, double p) {
    return detail::apply_kraus(rho, qubit, depolarizing_kraus(p));
}

inline DensityMatrix amplitude_damp_qubit(const DensityMatrix& rho, int qubit, double gamma) {
    return detail::apply_kraus(rho, qubit, amplitude_damping_kraus(gamma));
}

/// Independent channels on qubits 1, 2, 3 (they commute, so order is immaterial).
inline DensityMatrix apply_channel_spec(const DensityMatrix& rho, const ChannelSpec& spec) {
    if (rho.dim() != 8) throw InvalidArgument("channel specs act on three-qubit states");
    for (double s : spec.strengths) detail::check_strength(s);
    DensityMatrix out = rho;
    for (int q = 1; q <= 3; ++q) {
        const double s = spec.strengths[static_cast<std::size_t>(q - 1)];
        out = spec.kind == ChannelKind::DEPOLARIZE ? depolarize_qubit(out, q, s) : amplitude_damp_qubit(out, q, s);
    }
    return out;
}

/// A closed-form state. It is an arbitrary matrix until checked:
/// `hermitized` is set when asymmetric off-diagonals were averaged, and
/// `min_eigenvalue` tells whether the result is positive semidefinite.
struct ClosedFormState {
    ComplexMatrix matrix;
    bool hermitized = false;
    double off_diagonal_asymmetry = 0.0;
    double min_eigenvalue = 0.0;

    bool is_density_matrix() const { return min_eigenvalue >= -DensityMatrix::kEigenTol; }
};

namespace detail {

inline ClosedFormState two_level_state(double p000, double p111, double c01, double c10) {
    MatrixStore m = MatrixStore::Zero(8, 8);
    m(0, 0) = p000;
    m(7, 7) = p111;
    const double sym = 0.5 * (c01 + c10);
    m(0, 7) = sym;
    m(7, 0) = sym;
    ClosedFormState out{ComplexMatrix(std::move(m))};
    out.off_diagonal_asymmetry = std::abs(c01 - c10);
    out.hermitized = out.off_diagonal_asymmetry > 0.0;
    out.min_eigenvalue = hermitian_eigenvalues(out.matrix).back();
    return out;
}

inline void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= std::numbers::pi / 2 + 1e-12)) throw InvalidArgument("eta out of range");
}

}  // namespace detail

/// Two-level form of a GGHZ state after independent depolarization,
/// with J1 = prod(1 - 3p_i/4) and J2 = p1 p2 p3 / 64, normalized by J1 + 3 J2.
inline ClosedFormState closed_form_depolarized_gghz(double eta, double p1, double p2, double p3) {
    detail::check_eta(eta);
    for (double p : {p1, p2, p3}) detail::check_strength(p);
    const double j1 = (1 - 0.75 * p1) * (1 - 0.75 * p2) * (1 - 0.75 * p3);
    const double j2 = p1 * p2 * p3 / 64.0;
    const double c2 = std::cos(eta) * std::cos(eta);
    const double s2 = std::sin(eta) * std::sin(eta);
    const double norm = j1 + 3 * j2;
    const double off = 0.5 * (j1 - j2) * std::sin(2 * eta) / norm;
    return detail::two_level_state(((j1 + j2) * c2 + 2 * j2 * s2) / norm, ((j1 + j2) * s2 + 2 * j2 * c2) / norm, off,
                                   off);
}

/// Two-level form of a GGHZ state after independent amplitude damping,
/// D1 = sqrt(prod(1 - g_i)), D2 = g1 g2 g3. Its two off-diagonals differ
/// ((D1 + D2)/2 above, D1/2 below) and are averaged.
inline ClosedFormState closed_form_damped_gghz(double eta, double g1, double g2, double g3) {
    detail::check_eta(eta);
    for (double g : {g1, g2, g3}) detail::check_strength(g);
    const double d1 = std::sqrt((1 - g1) * (1 - g2) * (1 - g3));
    const double d2 = g1 * g2 * g3;
    const double c2 = std::cos(eta) * std::cos(eta);
    const double s2 = std::sin(eta) * std::sin(eta);
    const double norm = c2 + d1 * d1 * s2;
    const double s2eta = std::sin(2 * eta);
    return detail::two_level_state(c2 / norm, d1 * d1 * s2 / norm, 0.5 * (d1 + d2) * s2eta / norm,
                                   0.5 * d1 * s2eta / norm);
}

}  // namespace trinl
