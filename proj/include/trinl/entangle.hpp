#pragma once

// Entanglement and quantum-correlation measures: Wootters concurrence, the
// pure-state three-tangle, quantum discord under projective qubit
// measurements, and the discord monogamy score.

#include "trinl/qalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace trinl {

struct TangleValue {
    double tau = 0.0;
};

struct MonogamyScore {
    double delta_d = 0.0;
    double d_a_bc = 0.0;  // D(rho_A:BC)
    double d_ab = 0.0;    // D(rho_AB)
    double d_ac = 0.0;    // D(rho_AC)
};

namespace detail {

inline double clamp_unit(double x, double tol = 1e-10) {
    if (x < 0.0 && x >= -tol) return 0.0;
    if (x > 1.0 && x <= 1.0 + tol) return 1.0;
    return x;
}

inline MatrixStore hermitian_sqrt(const MatrixStore& m) {
    Eigen::SelfAdjointEigenSolver<MatrixStore> es(0.5 * (m + m.adjoint()));
    auto ev = es.eigenvalues().eval();
    // Round-off eigenvalues of rank-deficient states would otherwise leak in at sqrt(eps).
    const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), l_i the square roots of the
/// eigenvalues of rho (Y x Y) rho* (Y x Y) in descending order.
inline double concurrence(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw InvalidArgument("concurrence needs a two-qubit state");
    const MatrixStore yy = tensor(pauli(2), pauli(2)).data();
    // l_i are the singular values of sqrt(rho) (Y x Y) sqrt(rho)*.
    const MatrixStore sr = detail::hermitian_sqrt(rho.matrix().data());
    const MatrixStore m = sr * yy * sr.conjugate();
    const Eigen::VectorXd l = Eigen::JacobiSVD<MatrixStore>(m).singularValues();
    return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

namespace detail {

// Concurrence of the pair (q1, q2) of a pure three-qubit state. The pair marginal is
// V V^dagger with V the 4x2 slice over the third qubit, and C = |s1 - s2| for the
// singular values of V^T (Y x Y) V. Avoids square roots of vanishing eigenvalues.
inline double pure_pair_concurrence(const StateVector& psi, int q1, int q2) {
    const int q3 = 6 - q1 - q2;
    Eigen::Matrix<cplx, 4, 2> v;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                int idx = 0;
                idx |= a << (3 - q1);
                idx |= b << (3 - q2);
                idx |= c << (3 - q3);
                v(2 * a + b, c) = psi[idx];
            }
    Eigen::Matrix4cd yy;
    yy.setZero();
    yy(0, 3) = -1.0;
    yy(3, 0) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    const Eigen::Matrix2cd t = v.transpose() * yy * v;
    const Eigen::Vector2d s = Eigen::JacobiSVD<Eigen::Matrix2cd>(t).singularValues();
    return std::abs(s(0) - s(1));
}

}  // namespace detail

/// Three-tangle of a pure three-qubit state: 4 det(rho_1) - C_12^2 - C_13^2.
inline TangleValue three_tangle_pure(const StateVector& psi) {
    if (psi.dim() != 8) throw InvalidArgument("three-tangle needs a three-qubit state");
    const DensityMatrix r1 = partial_trace(DensityMatrix(psi), {1});
    const double det1 = (r1(0, 0) * r1(1, 1) - r1(0, 1) * r1(1, 0)).real();
    const double c12 = detail::pure_pair_concurrence(psi, 1, 2);
    const double c13 = detail::pure_pair_concurrence(psi, 1, 3);
    const double tau = 4.0 * det1 - c12 * c12 - c13 * c13;
    return {std::clamp(detail::clamp_unit(tau), 0.0, 1.0)};
}

/// Closed form for a|011> + b|101> + c|110> + d|000> + h e^{i gamma}|111>:
/// 4 d sqrt((d h^2 - 4abc)^2 + 16 abcd h^2 cos^2 gamma).
inline TangleValue three_tangle_symmetric(double a, double b, double c, double d, double h, double gamma) {
    const double norm = a * a + b * b + c * c + d * d + h * h;
    if (std::abs(norm - 1.0) > 1e-10) throw InvalidArgument("amplitudes are not normalized");
    const double abc = a * b * c;
    const double cg = std::cos(gamma);
    const double inner = std::pow(d * h * h - 4 * abc, 2) + 16 * abc * d * h * h * cg * cg;
    return {std::clamp(4 * d * std::sqrt(std::max(0.0, inner)), 0.0, 1.0)};
}

enum class MeasuredSide { A, B };

namespace detail {

// Entropy (bits) weighted by probability for an unnormalized conditional state:
// p * S(sigma / p) = -sum l log2(l / p).
inline double weighted_entropy(const MatrixStore& sigma) {
    Eigen::SelfAdjointEigenSolver<MatrixStore> es(0.5 * (sigma + sigma.adjoint()), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double p = ev.sum();
    if (p <= 0.0) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double l = ev(i);
        if (l > 0.0) s -= l * std::log2(l / p);
    }
    return s;
}

inline MatrixStore reduce_to_a(const MatrixStore& r, int da, int db) {
    MatrixStore out = MatrixStore::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k) out(i, j) += r(i * db + k, j * db + k);
    return out;
}

inline MatrixStore reduce_to_b(const MatrixStore& r, int da, int db) {
    MatrixStore out = MatrixStore::Zero(db, db);
    for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
            for (int i = 0; i < da; ++i) out(k, l) += r(i * db + k, i * db + l);
    return out;
}

// Unmeasured-side state conditioned on projector `proj` on the measured qubit (unnormalized).
inline MatrixStore conditional_state(const MatrixStore& r, int da, int db, MeasuredSide side, const MatrixStore& proj) {
    if (side == MeasuredSide::B) {
        MatrixStore out = MatrixStore::Zero(da, da);
        for (int i = 0; i < da; ++i)
            for (int j = 0; j < da; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) out(i, j) += r(i * 2 + k, j * 2 + l) * proj(l, k);
        return out;
    }
    MatrixStore out = MatrixStore::Zero(db, db);
    for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) out(k, l) += proj(j, i) * r(i * db + k, j * db + l);
    return out;
}

inline MatrixStore bloch_projector(double theta, double phi, double sign) {
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);
    MatrixStore p(2, 2);
    p(0, 0) = 0.5 * (1.0 + sign * nz);
    p(1, 1) = 0.5 * (1.0 - sign * nz);
    p(0, 1) = 0.5 * sign * cplx(nx, -ny);
    p(1, 0) = 0.5 * sign * cplx(nx, ny);
    return p;
}

inline double entropy_bits(const MatrixStore& m) { return weighted_entropy(m); }

}  // namespace detail

/// Minimum over rank-1 projective measurements on the measured qubit of the
/// average entropy of the unmeasured side. Dense (theta, phi) grid followed by
/// coordinate-descent refinement.
inline double min_conditional_entropy(const DensityMatrix& rho, int dim_a, MeasuredSide side) {
    const int dim_b = rho.dim() / dim_a;
    if (dim_a * dim_b != rho.dim() || dim_a < 2 || dim_b < 2) throw InvalidArgument("invalid bipartition");
    if ((side == MeasuredSide::A ? dim_a : dim_b) != 2) throw InvalidArgument("measured side must be a single qubit");
    const MatrixStore& r = rho.matrix().data();
    const auto cond = [&](double theta, double phi) {
        return detail::weighted_entropy(
                   detail::conditional_state(r, dim_a, dim_b, side, detail::bloch_projector(theta, phi, +1.0))) +
               detail::weighted_entropy(
                   detail::conditional_state(r, dim_a, dim_b, side, detail::bloch_projector(theta, phi, -1.0)));
    };
    constexpr int kPhi = 64;
    constexpr int kTheta = 32;
    const double pi = std::numbers::pi;
    double best = cond(0.0, 0.0);
    double bt = 0.0;
    double bp = 0.0;
    for (int it = 0; it < kTheta; ++it) {
        const double theta = pi * it / (kTheta - 1);
        for (int ip = 0; ip < kPhi; ++ip) {
            const double phi = 2 * pi * ip / kPhi;
            const double v = cond(theta, phi);
            if (v < best) {
                best = v;
                bt = theta;
                bp = phi;
            }
        }
    }
    double step = pi / (kTheta - 1);
    while (step > 1e-10) {
        bool improved = false;
        for (const auto& [dt, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
            const double t = bt + dt * step;
            const double p = bp + dp * step;
            const double v = cond(t, p);
            if (v < best) {
                best = v;
                bt = t;
                bp = p;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

/// Quantum discord D = I - J in bits for a bipartite state of dimensions
/// dim_a x (dim / dim_a), measuring the named single-qubit side.
inline double discord_numeric(const DensityMatrix& rho, int dim_a = 2, MeasuredSide side = MeasuredSide::B) {
    const int dim_b = rho.dim() / dim_a;
    if (dim_a * dim_b != rho.dim() || dim_a < 2 || dim_b < 2) throw InvalidArgument("invalid bipartition");
    if ((side == MeasuredSide::A ? dim_a : dim_b) != 2) throw InvalidArgument("measured side must be a single qubit");
    const MatrixStore& r = rho.matrix().data();
    const double s_ab = von_neumann_entropy(rho);
    const MatrixStore measured =
        side == MeasuredSide::B ? detail::reduce_to_b(r, dim_a, dim_b) : detail::reduce_to_a(r, dim_a, dim_b);
    const double s_measured = detail::entropy_bits(measured);
    // D = S(measured) - S(AB) + min conditional entropy of the unmeasured side.
    return s_measured - s_ab + min_conditional_entropy(rho, dim_a, side);
}

/// X-state closed form for the discord of rho_AB of l0|000> + l3|110> + l4|111>,
/// with r = sqrt(1 + 4 l0^4 + 4 l0^2 (l3^2 - 1)). The log inside the second group is
/// taken as natural, which is the only reading consistent with the ln2 * ln4 divisor.
inline double discord_xstate_closed_form(double l0, double l3) {
    const double ln2 = std::log(2.0);
    const double ln4 = std::log(4.0);
    const double a = l0 * l0;
    const auto xlnx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    const double r = std::sqrt(std::max(0.0, 1 + 4 * a * a + 4 * a * (-1 + l3 * l3)));
    const auto term = [](double w, double x) { return x > 0.0 ? w * std::log(x) : 0.0; };
    const double first = -ln4 * (xlnx(a) + xlnx(1 - a));
    const double second = ln2 * (term(1 + r, (1 + r) / 2) + term(1 - r, (1 - r) / 2));
    return (first + second) / (ln2 * ln4);
}

/// delta_D = D(A:BC) - D(AB) - D(AC) for a pure three-qubit state.
inline MonogamyScore discord_monogamy_score(const StateVector& psi) {
    if (psi.dim() != 8) throw InvalidArgument("monogamy score needs a three-qubit state");
    const DensityMatrix rho(psi);
    MonogamyScore out;
    // A is the measured party in all three terms (for A|BC it is the only qubit side).
    out.d_a_bc = discord_numeric(rho, 2, MeasuredSide::A);
    out.d_ab = discord_numeric(partial_trace(rho, {1, 2}), 2, MeasuredSide::A);
    out.d_ac = discord_numeric(partial_trace(rho, {1, 3}), 2, MeasuredSide::A);
    out.delta_d = out.d_a_bc - out.d_ab - out.d_ac;
    return out;
}

/// GGHZ monogamy score -(cos^2 log2 cos^2 + sin^2 log2 sin^2).
inline double delta_d_gghz(double eta) {
    const double c = std::cos(eta) * std::cos(eta);
    const double s = std::sin(eta) * std::sin(eta);
    const auto t = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
    return -(t(c) + t(s));
}

/// Subclass-S monogamy score in closed form, natural logs over ln 4.
inline double delta_d_subclass_s(double tau) {
    if (!(tau >= -1e-12 && tau <= 1.0 + 1e-12)) throw InvalidArgument("tau must lie in [0, 1]");
    const double s = std::sqrt(std::max(0.0, 1.0 - tau));
    const auto t = [](double w, double x) { return x > 0.0 ? w * std::log(x) : 0.0; };
    return -(t(1 - s, (1 - s) / 2) + t(1 + s, (1 + s) / 2)) / std::log(4.0);
}

}  // namespace trinl
