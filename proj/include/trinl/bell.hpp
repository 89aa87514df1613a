#pragma once

// Bell operators (Svetlichny, the 99th NS2 facet, CHSH), their evaluation on
// quantum states, multi-start maximization over projective measurements, and
// the closed-form bounds for the state families.

#include "trinl/optimize.hpp"
#include "trinl/qalg.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace trinl {

using Vec3 = std::array<double, 3>;

inline Vec3 bloch_vector(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// v . sigma for a Bloch vector v.
inline ComplexMatrix spin_observable(const Vec3& v) {
    return v[0] * pauli(1) + v[1] * pauli(2) + v[2] * pauli(3);
}

/// Two dichotomic settings per party, each a Bloch unit vector given by its
/// polar angle theta and azimuth phi. Angles for party p, setting s live at
/// indices 4p + 2s (theta) and 4p + 2s + 1 (phi).
class MeasurementScenario {
  public:
    explicit MeasurementScenario(int parties = 3) : parties_(check_parties(parties)) {}

    MeasurementScenario(int parties, const std::vector<double>& angles) : parties_(check_parties(parties)) {
        if (static_cast<int>(angles.size()) != 4 * parties) throw InvalidArgument("scenario needs 4 angles per party");
        std::copy(angles.begin(), angles.end(), angles_.begin());
        canonicalize();
    }

    /// All settings along +z.
    static MeasurementScenario all_z(int parties = 3) { return MeasurementScenario(parties); }

    int parties() const { return parties_; }
    double theta(int party, int setting) const { return angles_[static_cast<std::size_t>(4 * party + 2 * setting)]; }
    double phi(int party, int setting) const { return angles_[static_cast<std::size_t>(4 * party + 2 * setting + 1)]; }
    Vec3 vector(int party, int setting) const { return bloch_vector(theta(party, setting), phi(party, setting)); }
    std::vector<double> angles() const {
        return {angles_.begin(), angles_.begin() + 4 * parties_};
    }

    void set(int party, int setting, double theta, double phi) {
        angles_[static_cast<std::size_t>(4 * party + 2 * setting)] = theta;
        angles_[static_cast<std::size_t>(4 * party + 2 * setting + 1)] = phi;
        canonicalize();
    }

  private:
    static int check_parties(int n) {
        if (n != 2 && n != 3) throw InvalidArgument("scenarios have two or three parties");
        return n;
    }

    // theta in [0, pi], phi in [0, 2 pi)
    void canonicalize() {
        const double two_pi = 2 * std::numbers::pi;
        for (int i = 0; i < 2 * parties_; ++i) {
            double& t = angles_[static_cast<std::size_t>(2 * i)];
            double& p = angles_[static_cast<std::size_t>(2 * i + 1)];
            t = std::fmod(t, two_pi);
            if (t < 0) t += two_pi;
            if (t > std::numbers::pi) {
                t = two_pi - t;
                p += std::numbers::pi;
            }
            p = std::fmod(p, two_pi);
            if (p < 0) p += two_pi;
        }
    }

    int parties_;
    std::array<double, 12> angles_{};
};

/// Observable slot of a correlator: a Bloch vector, or nullopt for the identity.
using ObservableSlot = std::optional<Vec3>;

/// Tr[rho (A x B x C)] by direct matrix evaluation.
inline double correlator(const DensityMatrix& rho, const std::array<ObservableSlot, 3>& obs) {
    if (rho.dim() != 8) throw InvalidArgument("three-party correlator needs a three-qubit state");
    bool any = false;
    ComplexMatrix op = ComplexMatrix::identity(1);
    for (const auto& slot : obs) {
        any = any || slot.has_value();
        op = tensor(op, slot ? spin_observable(*slot) : ComplexMatrix::identity(2));
    }
    if (!any) throw InvalidArgument("correlator needs at least one non-identity slot");
    return (rho.matrix() * op).trace().real();
}

/// Real Pauli expansion T[i1..in] = Tr[rho sigma_i1 x ... x sigma_in] of a
/// Hermitian operator on two or three qubits.
class CorrelationTensor {
  public:
    explicit CorrelationTensor(const ComplexMatrix& h) : parties_(detail::qubits_of(h.dim())) {
        if (parties_ < 2) throw InvalidArgument("correlation tensor needs two or three qubits");
        if (!h.is_hermitian(1e-10)) throw InvalidArgument("correlation tensor needs a Hermitian operator");
        const int count = 1 << (2 * parties_);
        t_.assign(static_cast<std::size_t>(count), 0.0);
        for (int idx = 0; idx < count; ++idx) {
            ComplexMatrix op = ComplexMatrix::identity(1);
            for (int p = 0; p < parties_; ++p) op = tensor(op, pauli((idx >> (2 * (parties_ - 1 - p))) & 3));
            t_[static_cast<std::size_t>(idx)] = (h * op).trace().real();
        }
    }
    explicit CorrelationTensor(const DensityMatrix& rho) : CorrelationTensor(rho.matrix()) {}

    int parties() const { return parties_; }

    double at(int i, int j) const { return t_[static_cast<std::size_t>(4 * i + j)]; }
    double at(int i, int j, int k) const { return t_[static_cast<std::size_t>(16 * i + 4 * j + k)]; }

    /// Full contraction with one 4-vector (c0, c1, c2, c3) per party, c0 weighting the identity.
    double contract(const std::array<double, 4>* coeffs) const {
        if (parties_ == 2) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) {
                if (coeffs[0][i] == 0.0) continue;
                double inner = 0.0;
                for (int j = 0; j < 4; ++j) inner += coeffs[1][j] * at(i, j);
                s += coeffs[0][i] * inner;
            }
            return s;
        }
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            if (coeffs[0][i] == 0.0) continue;
            double si = 0.0;
            for (int j = 0; j < 4; ++j) {
                if (coeffs[1][j] == 0.0) continue;
                double sj = 0.0;
                for (int k = 0; k < 4; ++k) sj += coeffs[2][k] * at(i, j, k);
                si += coeffs[1][j] * sj;
            }
            s += coeffs[0][i] * si;
        }
        return s;
    }

  private:
    int parties_;
    std::vector<double> t_;
};

enum class OperatorKind { SVETLICHNY, NS99, CHSH };

/// One correlator term: per-party setting index (0 or 1), or -1 for identity.
struct BellTerm {
    std::array<int, 3> settings{-1, -1, -1};
    int sign = 1;
};

struct BellOperator {
    OperatorKind kind;
    int parties;
    std::vector<BellTerm> terms;
    double classical_bound;
    const char* name;
};

/// <X0Y0Z0> + <X1Y0Z0> - <X0Y1Z0> + <X1Y1Z0> + <X0Y0Z1> - <X1Y0Z1> + <X0Y1Z1> + <X1Y1Z1> <= 4
inline const BellOperator& svetlichny_operator() {
    static const BellOperator op{OperatorKind::SVETLICHNY,
                                 3,
                                 {{{0, 0, 0}, +1},
                                  {{1, 0, 0}, +1},
                                  {{0, 1, 0}, -1},
                                  {{1, 1, 0}, +1},
                                  {{0, 0, 1}, +1},
                                  {{1, 0, 1}, -1},
                                  {{0, 1, 1}, +1},
                                  {{1, 1, 1}, +1}},
                                 4.0,
                                 "svetlichny"};
    return op;
}

/// <X1Y1> + <X0Y0Z0> + <Y1Z0> + <X1Z1> - <X0Y0Z1> <= 3
inline const BellOperator& ns99_operator() {
    static const BellOperator op{OperatorKind::NS99,
                                 3,
                                 {{{1, 1, -1}, +1}, {{0, 0, 0}, +1}, {{-1, 1, 0}, +1}, {{1, -1, 1}, +1}, {{0, 0, 1}, -1}},
                                 3.0,
                                 "ns99"};
    return op;
}

/// <A0B0> + <A0B1> + <A1B0> - <A1B1> <= 2
inline const BellOperator& chsh_operator() {
    static const BellOperator op{OperatorKind::CHSH,
                                 2,
                                 {{{0, 0, -1}, +1}, {{0, 1, -1}, +1}, {{1, 0, -1}, +1}, {{1, 1, -1}, -1}},
                                 2.0,
                                 "chsh"};
    return op;
}

inline const BellOperator& bell_operator(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::SVETLICHNY: return svetlichny_operator();
        case OperatorKind::NS99: return ns99_operator();
        case OperatorKind::CHSH: return chsh_operator();
    }
    throw InvalidArgument("unknown operator");
}

inline std::optional<OperatorKind> parse_operator(std::string_view name) {
    if (name == "svetlichny" || name == "svet") return OperatorKind::SVETLICHNY;
    if (name == "ns99" || name == "ns") return OperatorKind::NS99;
    if (name == "chsh") return OperatorKind::CHSH;
    return std::nullopt;
}

namespace detail {

// Evaluates an operator from per-party Bloch vectors [party][setting].
inline double operator_from_vectors(const CorrelationTensor& t, const BellOperator& op, const Vec3 (*vecs)[2]) {
    double total = 0.0;
    std::array<std::array<double, 4>, 3> coeffs{};
    for (const auto& term : op.terms) {
        for (int p = 0; p < op.parties; ++p) {
            const int s = term.settings[static_cast<std::size_t>(p)];
            auto& c = coeffs[static_cast<std::size_t>(p)];
            if (s < 0) {
                c = {1.0, 0.0, 0.0, 0.0};
            } else {
                const Vec3& v = vecs[p][s];
                c = {0.0, v[0], v[1], v[2]};
            }
        }
        total += term.sign * t.contract(coeffs.data());
    }
    return total;
}

inline void check_parties(const CorrelationTensor& t, const BellOperator& op) {
    if (t.parties() != op.parties) throw InvalidArgument(std::string(op.name) + " needs a state with matching qubits");
}

}  // namespace detail

inline double operator_value(const CorrelationTensor& t, const MeasurementScenario& sc, const BellOperator& op) {
    detail::check_parties(t, op);
    if (sc.parties() != op.parties) throw InvalidArgument("scenario party count does not match the operator");
    Vec3 vecs[3][2];
    for (int p = 0; p < op.parties; ++p)
        for (int s = 0; s < 2; ++s) vecs[p][s] = sc.vector(p, s);
    return detail::operator_from_vectors(t, op, vecs);
}

inline double operator_value(const DensityMatrix& rho, const MeasurementScenario& sc, const BellOperator& op) {
    return operator_value(CorrelationTensor(rho), sc, op);
}

struct OptimizeOptions {
    int restarts = 64;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int max_iterations = 2000;
    int threads = 0;
};

struct ViolationReport {
    OperatorKind kind = OperatorKind::NS99;
    double value = 0.0;
    MeasurementScenario scenario;
    double classical_bound = 0.0;
    bool violated = false;
    int restarts_used = 0;
    bool converged = false;
    double restart_spread = 0.0;  // best minus second-best restart value
};

inline constexpr double kViolationMargin = 1e-9;
inline constexpr double kSpreadTolerance = 1e-6;

/// Multi-start Nelder-Mead over all measurement angles. The value is a lower
/// bound on the projective maximum; `converged` is false when the best
/// restart did not shrink its simplex or the two best restarts disagree.
inline ViolationReport optimize_operator(const CorrelationTensor& t, const BellOperator& op,
                                         const OptimizeOptions& options = {}) {
    detail::check_parties(t, op);
    const int n = 4 * op.parties;
    const auto objective = [&](const std::vector<double>& x) {
        Vec3 vecs[3][2];
        for (int p = 0; p < op.parties; ++p)
            for (int s = 0; s < 2; ++s) {
                const auto i = static_cast<std::size_t>(4 * p + 2 * s);
                vecs[p][s] = bloch_vector(x[i], x[i + 1]);
            }
        return detail::operator_from_vectors(t, op, vecs);
    };
    const auto sampler = [n](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; i += 2) {
            x[static_cast<std::size_t>(i)] = std::acos(1.0 - 2.0 * u(rng));
            x[static_cast<std::size_t>(i + 1)] = 2 * std::numbers::pi * u(rng);
        }
        return x;
    };
    MultiStartOptions ms;
    ms.restarts = options.restarts;
    ms.seed = options.seed;
    ms.threads = options.threads;
    ms.local.tolerance = options.tol;
    ms.local.max_iterations = options.max_iterations;
    const MultiStartResult res = multistart_maximize(objective, sampler, ms);

    std::vector<double> vals = res.restart_values;
    std::sort(vals.begin(), vals.end(), std::greater<>());
    ViolationReport rep;
    rep.kind = op.kind;
    rep.value = res.best.value;
    rep.scenario = MeasurementScenario(op.parties, res.best.x);
    rep.classical_bound = op.classical_bound;
    rep.violated = rep.value > op.classical_bound + kViolationMargin;
    rep.restarts_used = options.restarts;
    rep.restart_spread = vals.size() > 1 ? vals[0] - vals[1] : 0.0;
    rep.converged = res.best.converged && rep.restart_spread <= kSpreadTolerance;
    return rep;
}

inline ViolationReport optimize_operator(const DensityMatrix& rho, const BellOperator& op,
                                         const OptimizeOptions& options = {}) {
    return optimize_operator(CorrelationTensor(rho), op, options);
}

// ---------------------------------------------------------------------------
// Closed-form bounds.

namespace detail {

inline void check_unit(double x, const char* what) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

inline void check_pair(double tau, double c12sq) {
    check_unit(tau, "tau");
    check_unit(c12sq, "C12^2");
    if (tau + c12sq > 1.0 + 1e-12) throw InvalidArgument("infeasible pair: tau + C12^2 exceeds 1");
}

inline double sqrt0(double x) { return std::sqrt(std::max(0.0, x)); }

}  // namespace detail

/// 99th-facet maximum for GGHZ and MS states: 1 + 2 sqrt(1 + tau).
inline double bound_b1_b3(double tau) {
    detail::check_unit(tau, "tau");
    return 1.0 + 2.0 * detail::sqrt0(1.0 + tau);
}

/// Svetlichny maximum for GGHZ states.
inline double bound_b2(double tau) {
    detail::check_unit(tau, "tau");
    return tau <= 1.0 / 3.0 ? 4.0 * detail::sqrt0(1.0 - tau) : 4.0 * detail::sqrt0(2.0 * tau);
}

/// Svetlichny maximum for subclass S.
inline double bound_b4(double tau, double c12sq) {
    detail::check_pair(tau, c12sq);
    return tau <= (1.0 - c12sq) / 3.0 ? 4.0 * detail::sqrt0(1.0 - tau) : 4.0 * detail::sqrt0(c12sq + 2.0 * tau);
}

/// 1 + sqrt(A + 2C) + sqrt(A - 2C) with A = 1 + tau, C = sqrt(C12^2 (1 - tau - C12^2)).
inline double ns_ext_s_branch(double tau, double c12sq) {
    detail::check_pair(tau, c12sq);
    const double a = 1.0 + tau;
    const double c = detail::sqrt0(c12sq * (1.0 - tau - c12sq));
    return 1.0 + detail::sqrt0(a + 2 * c) + detail::sqrt0(a - 2 * c);
}

/// 99th-facet maximum for subclass S.
inline double bound_b5(double tau, double c12sq) {
    detail::check_pair(tau, c12sq);
    const double threshold = c12sq * (1.0 - c12sq) / (1.0 + c12sq);
    return tau <= threshold ? 3.0 : ns_ext_s_branch(tau, c12sq);
}

/// rho4 bound (2 sqrt(16p^2 - 8p + 10) + |1 - 4p|)/3.
inline double bound_rho4(double p) {
    detail::check_unit(p, "p");
    return (2 * detail::sqrt0(16 * p * p - 8 * p + 10) + std::abs(1 - 4 * p)) / 3.0;
}

/// rho5 bound (2 sqrt(37p^2 - 4p + 17) + |1 - 6p|)/5.
inline double bound_rho5(double p) {
    detail::check_unit(p, "p");
    return (2 * detail::sqrt0(37 * p * p - 4 * p + 17) + std::abs(1 - 6 * p)) / 5.0;
}

enum class Table2Family { RHO6, RHO7, RHO8 };

namespace detail {

inline double rho6_radical(double p) {
    return std::sqrt(std::pow(1 + 10 * p, 2) + std::pow(6 * (1 - p) + std::abs(3 - 14 * p), 2));
}

inline double rho7_bound(double p) {
    using std::abs;
    using std::sqrt;
    const double b = (1 - p) / 2 + abs(0.26470 - 1.26470 * p);
    return sqrt(std::pow(-.11765 + 1.11765 * p, 2) + b * b) + sqrt(std::pow(.11765 + 0.8824 * p, 2) + b * b) + 0.0588 +
           0.9412 * p;
}

inline double rho8_bound(double p) {
    using std::abs;
    using std::sqrt;
    const double c = 0.4572 * (1 - p) + abs(.2571 - 1.2571 * p);
    return sqrt(std::pow(0.0857 + 0.9143 * p, 2) + c * c) + sqrt(std::pow(-0.1428 + 1.1429 * p, 2) + c * c) + 0.0857 +
           0.9142 * p;
}

}  // namespace detail

/// Piecewise 99th-facet bounds for rho6, rho7, rho8. The rho6 radical carries
/// a factor 2 (the two symmetric radicals of the rho4/rho5 pattern), which
/// makes the bound reach 1 + 2 sqrt(2) at p = 1.
inline double bound_table2(Table2Family family, double p) {
    detail::check_unit(p, "p");
    switch (family) {
        case Table2Family::RHO6: return (2.0 * detail::rho6_radical(p) + std::abs(12 * p - 1)) / 11.0;
        case Table2Family::RHO7: return detail::rho7_bound(p);
        case Table2Family::RHO8: return detail::rho8_bound(p);
    }
    throw InvalidArgument("unknown family");
}

/// Same, with a single rho6 radical; kept for comparison, it falls short of the GHZ value at p = 1.
inline double bound_table2_single_radical(Table2Family family, double p) {
    detail::check_unit(p, "p");
    if (family == Table2Family::RHO6) return (detail::rho6_radical(p) + std::abs(12 * p - 1)) / 11.0;
    return bound_table2(family, p);
}

/// Maximal CHSH value of a pure two-qubit state with squared concurrence c12sq.
inline double chsh_pure_max(double c12sq) {
    detail::check_unit(c12sq, "C12^2");
    return 2.0 * detail::sqrt0(1.0 + c12sq);
}

/// Family of pure states whose noisy visibility threshold has a closed form.
enum class VisibilityFamily { GGHZ, EXT_S };

/// Classical bound divided by the pure-state maximum along the formula branch
/// that can exceed it. A ratio >= 1 means no violation for any visibility.
inline double visibility_ratio(VisibilityFamily family, double tau, double c12sq, OperatorKind op) {
    if (op == OperatorKind::CHSH) throw InvalidArgument("visibility thresholds are defined for three-party operators");
    if (family == VisibilityFamily::GGHZ) {
        if (op == OperatorKind::NS99) return 3.0 / bound_b1_b3(tau);
        return bound_b2(tau) > 4.0 ? 1.0 / std::sqrt(2.0 * tau) : 4.0 / bound_b2(tau);
    }
    if (op == OperatorKind::NS99) return 3.0 / ns_ext_s_branch(tau, c12sq);
    return bound_b4(tau, c12sq) > 4.0 ? 1.0 / std::sqrt(2.0 * tau + c12sq) : 4.0 / bound_b4(tau, c12sq);
}

/// Smallest visibility above which white-noise mixtures violate the operator,
/// or nullopt when the pure state itself does not violate it.
inline std::optional<double> visibility_threshold(VisibilityFamily family, double tau, double c12sq,
                                                  OperatorKind op) {
    const double r = visibility_ratio(family, tau, c12sq, op);
    if (r >= 1.0) return std::nullopt;
    return r;
}

}  // namespace trinl
