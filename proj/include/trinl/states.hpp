#pragma once

// Pure and mixed three-qubit state families, white-noise mixing and the JSON
// state document format.

#include "trinl/qalg.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace trinl {

enum class Family {
    GGHZ,
    MS,
    EXT_S,
    GHZ,
    W,
    WTILDE,
    RHO2,
    RHO3,
    RHO4,
    RHO5,
    RHO6,
    RHO7,
    RHO8,
    LAMBDA_BASIS,
};

/// Parameters for every family; each family reads only the fields it needs.
struct FamilyParams {
    Family family = Family::GHZ;
    double eta = 0.0;                            // GGHZ, MS
    std::array<double, 3> lambdas{1.0, 0.0, 0.0};  // EXT_S: (l0, l3, l4)
    double p = 1.0;                              // RHO2..RHO8
    int k = 1;                                   // RHO3
    int basis_index = 1;                         // LAMBDA_BASIS: 1..4
    bool plus = true;                            // LAMBDA_BASIS sign
};

inline constexpr double kPi = std::numbers::pi;

/// cos(eta)|000> + sin(eta)|111>, eta in [0, pi/4].
inline StateVector gghz(double eta) {
    if (!(eta >= 0.0 && eta <= kPi / 4 + 1e-12)) throw InvalidArgument("GGHZ parameter must lie in [0, pi/4]");
    return StateVector::from_terms(8, {{0, std::cos(eta)}, {7, std::sin(eta)}});
}

/// l0|000> + l3|110> + l4|111>.
inline StateVector extended_ghz(double l0, double l3, double l4) {
    for (double l : {l0, l3, l4}) {
        if (!(l >= -1.0 && l <= 1.0)) throw InvalidArgument("extended GHZ coefficients must lie in [-1, 1]");
    }
    if (std::abs(l0 * l0 + l3 * l3 + l4 * l4 - 1.0) > 1e-10) {
        throw InvalidArgument("extended GHZ coefficients are not normalized");
    }
    VectorStore v = VectorStore::Zero(8);
    v(0) = l0;
    v(6) = l3;
    v(7) = l4;
    return StateVector(v / v.norm());
}

/// True when eta lies in the nominal maximal-slice range [0, pi/4].
inline bool ms_in_nominal_range(double eta) { return eta >= 0.0 && eta <= kPi / 4 + 1e-12; }

/// (|000> + cos(eta)|110> + sin(eta)|111>)/sqrt(2). Accepts eta in [0, pi/2];
/// callers may use ms_in_nominal_range to warn beyond pi/4.
inline StateVector ms(double eta) {
    if (!(eta >= 0.0 && eta <= kPi / 2 + 1e-12)) throw InvalidArgument("MS parameter must lie in [0, pi/2]");
    const double r = 1.0 / std::sqrt(2.0);
    return extended_ghz(r, r * std::cos(eta), r * std::sin(eta));
}

enum class NamedState { GHZ, W, WTILDE };

inline StateVector named_pure(NamedState name) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = 1.0 / std::sqrt(3.0);
    switch (name) {
        case NamedState::GHZ: return StateVector::from_terms(8, {{0, r2}, {7, r2}});
        case NamedState::W: return StateVector::from_terms(8, {{1, r3}, {2, r3}, {4, r3}});
        case NamedState::WTILDE: return StateVector::from_terms(8, {{3, r3}, {6, r3}, {5, r3}});
    }
    throw InvalidArgument("unknown named state");
}

/// |Lambda,i +/-> = (|u> +/- |u'>)/sqrt(2) with (u, u') = (000,111), (110,001), (101,010), (011,100).
inline StateVector lambda_basis(int index, bool plus) {
    static constexpr std::array<std::array<int, 2>, 4> kPairs{{{0, 7}, {6, 1}, {5, 2}, {3, 4}}};
    if (index < 1 || index > 4) throw InvalidArgument("Lambda basis index must be 1..4");
    const double r2 = 1.0 / std::sqrt(2.0);
    const auto [u, v] = kPairs[static_cast<std::size_t>(index - 1)];
    return StateVector::from_terms(8, {{u, r2}, {v, plus ? r2 : -r2}});
}

/// alpha * rho + (1 - alpha) * I/dim.
inline DensityMatrix white_noise_mix(const DensityMatrix& rho, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("visibility must lie in [0, 1]");
    const int d = rho.dim();
    return DensityMatrix(alpha * rho.matrix() + ((1.0 - alpha) / d) * ComplexMatrix::identity(d));
}

namespace detail {

inline ComplexMatrix proj(const StateVector& psi) { return psi.projector(); }

// Omega = |L1+><L1+| + |L1-><L1-|
inline ComplexMatrix omega() { return proj(lambda_basis(1, true)) + proj(lambda_basis(1, false)); }

// Pi = sum over i = 2, 3, 4 of |Li+><Li+|
inline ComplexMatrix pi_block() {
    return proj(lambda_basis(2, true)) + proj(lambda_basis(3, true)) + proj(lambda_basis(4, true));
}

inline void check_weight(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("mixing weight p must lie in [0, 1]");
}

}  // namespace detail

/// Mixed families rho2 .. rho8 as convex mixtures of named projectors.
inline DensityMatrix mixed_family(const FamilyParams& fp) {
    using detail::proj;
    const double p = fp.p;
    detail::check_weight(p);
    const ComplexMatrix ghz = proj(named_pure(NamedState::GHZ));
    switch (fp.family) {
        case Family::RHO2: return DensityMatrix(p * ghz + (1 - p) * proj(named_pure(NamedState::W)));
        case Family::RHO3: {
            if (fp.k < 1) throw InvalidArgument("rho3 requires a positive integer k");
            const double q = (1 - p) / fp.k;
            const double rest = 1 - p - q;
            if (rest < -1e-15) throw InvalidArgument("rho3 weights are not a probability distribution");
            return DensityMatrix(p * ghz + q * proj(named_pure(NamedState::W)) +
                                 std::max(rest, 0.0) * proj(named_pure(NamedState::WTILDE)));
        }
        case Family::RHO4: return DensityMatrix(p * proj(lambda_basis(1, true)) + ((1 - p) / 3) * detail::pi_block());
        case Family::RHO5:
            return DensityMatrix(p * proj(lambda_basis(1, true)) +
                                 ((1 - p) / 10) * (proj(lambda_basis(1, false)) + 3.0 * detail::pi_block()));
        case Family::RHO6:
            return DensityMatrix(p * proj(lambda_basis(2, false)) +
                                 ((1 - p) / 11) * (detail::omega() + 3.0 * detail::pi_block()));
        case Family::RHO7:
            return DensityMatrix(p * proj(lambda_basis(3, false)) +
                                 ((1 - p) / 34) *
                                     (proj(lambda_basis(2, false)) + 3.0 * detail::omega() + 9.0 * detail::pi_block()));
        case Family::RHO8:
            return DensityMatrix(p * proj(lambda_basis(4, false)) +
                                 ((1 - p) / 35) * (proj(lambda_basis(2, false)) + proj(lambda_basis(3, false)) +
                                                   3.0 * detail::omega() + 9.0 * detail::pi_block()));
        default: throw InvalidArgument("mixed_family called with a pure-state family");
    }
}

inline bool is_pure_family(Family f) {
    switch (f) {
        case Family::GGHZ:
        case Family::MS:
        case Family::EXT_S:
        case Family::GHZ:
        case Family::W:
        case Family::WTILDE:
        case Family::LAMBDA_BASIS: return true;
        default: return false;
    }
}

inline StateVector pure_family(const FamilyParams& fp) {
    switch (fp.family) {
        case Family::GGHZ: return gghz(fp.eta);
        case Family::MS: return ms(fp.eta);
        case Family::EXT_S: return extended_ghz(fp.lambdas[0], fp.lambdas[1], fp.lambdas[2]);
        case Family::GHZ: return named_pure(NamedState::GHZ);
        case Family::W: return named_pure(NamedState::W);
        case Family::WTILDE: return named_pure(NamedState::WTILDE);
        case Family::LAMBDA_BASIS: return lambda_basis(fp.basis_index, fp.plus);
        default: throw InvalidArgument("pure_family called with a mixed family");
    }
}

/// Density matrix of any family (projector for the pure ones).
inline DensityMatrix family_state(const FamilyParams& fp) {
    return is_pure_family(fp.family) ? DensityMatrix(pure_family(fp)) : mixed_family(fp);
}

inline std::optional<Family> parse_family(std::string_view name) {
    struct Entry {
        std::string_view name;
        Family family;
    };
    static constexpr Entry kNames[] = {
        {"gghz", Family::GGHZ}, {"ms", Family::MS},     {"ext_s", Family::EXT_S}, {"ghz", Family::GHZ},
        {"w", Family::W},       {"wtilde", Family::WTILDE}, {"rho2", Family::RHO2}, {"rho3", Family::RHO3},
        {"rho4", Family::RHO4}, {"rho5", Family::RHO5}, {"rho6", Family::RHO6},   {"rho7", Family::RHO7},
        {"rho8", Family::RHO8}, {"lambda", Family::LAMBDA_BASIS},
    };
    for (const auto& e : kNames) {
        if (e.name == name) return e.family;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// State documents: {"amplitudes": [[re, im] x 8]} or {"density": [[[re, im] x 8] x 8]}.

namespace detail {

inline cplx parse_complex(const nlohmann::json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InvalidArgument("complex entries must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// A state read from a document. Amplitude vectors are rescaled to unit norm;
/// `input_norm` records the norm found in the file.
struct StateDocument {
    DensityMatrix rho;
    std::optional<StateVector> pure;
    double input_norm = 1.0;
};

inline StateDocument parse_state_document(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("state document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidArgument("state document must be a JSON object");
    const bool has_amp = doc.contains("amplitudes");
    const bool has_rho = doc.contains("density");
    if (has_amp == has_rho) throw InvalidArgument("state document needs exactly one of 'amplitudes' or 'density'");
    if (has_amp) {
        const auto& a = doc["amplitudes"];
        if (!a.is_array() || a.size() != 8) throw InvalidArgument("'amplitudes' must hold 8 entries");
        VectorStore v(8);
        for (int i = 0; i < 8; ++i) v(i) = detail::parse_complex(a[static_cast<std::size_t>(i)]);
        const double norm = v.norm();
        StateVector psi = StateVector::normalized(v);
        return StateDocument{DensityMatrix(psi), psi, norm};
    }
    const auto& d = doc["density"];
    if (!d.is_array() || d.size() != 8) throw InvalidArgument("'density' must be an 8x8 array");
    MatrixStore m(8, 8);
    for (int i = 0; i < 8; ++i) {
        const auto& row = d[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != 8) throw InvalidArgument("'density' must be an 8x8 array");
        for (int j = 0; j < 8; ++j) m(i, j) = detail::parse_complex(row[static_cast<std::size_t>(j)]);
    }
    return StateDocument{DensityMatrix(ComplexMatrix(std::move(m))), std::nullopt, 1.0};
}

inline std::string write_state_document(const StateVector& psi) {
    nlohmann::json amps = nlohmann::json::array();
    for (int i = 0; i < psi.dim(); ++i) amps.push_back({psi[i].real(), psi[i].imag()});
    return nlohmann::json{{"amplitudes", amps}}.dump();
}

inline std::string write_state_document(const DensityMatrix& rho) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < rho.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < rho.dim(); ++j) row.push_back({rho(i, j).real(), rho(i, j).imag()});
        rows.push_back(row);
    }
    return nlohmann::json{{"density", rows}}.dump();
}

}  // namespace trinl
