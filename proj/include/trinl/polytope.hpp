#pragma once

// Behaviors P(abc|xyz) for two settings and two outcomes per party, and LP
// membership oracles for the fully local, NS2 and S2 hybrid models.

#include "trinl/bell.hpp"
#include "trinl/lp.hpp"
#include "trinl/ns_vertices.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace trinl {

/// Conditional probability table. Outcome 0 is the +1 eigenvalue.
class Behavior {
  public:
    static constexpr std::size_t kSize = 64;

    static constexpr std::size_t index(int a, int b, int c, int x, int y, int z) {
        return static_cast<std::size_t>((((x * 2 + y) * 2 + z) * 8) + a * 4 + b * 2 + c);
    }

    Behavior() = default;

    explicit Behavior(const std::array<double, kSize>& p, double tol = 1e-10) : p_(p) {
        for (double v : p_) {
            if (!std::isfinite(v) || v < -1e-12) throw InvalidArgument("behavior has a negative or non-finite entry");
        }
        for (int s = 0; s < 8; ++s) {
            double sum = 0.0;
            for (int o = 0; o < 8; ++o) sum += p_[static_cast<std::size_t>(s * 8 + o)];
            if (std::abs(sum - 1.0) > tol) throw InvalidArgument("behavior is not normalized for every setting");
        }
    }

    double operator()(int a, int b, int c, int x, int y, int z) const { return p_[index(a, b, c, x, y, z)]; }
    const std::array<double, kSize>& data() const { return p_; }

    /// Largest violation of three-party no-signaling (every marginal independent of the other inputs).
    double signaling_defect() const {
        double worst = 0.0;
        // Marginal of party q given all settings; compare across the other parties' settings.
        for (int q = 0; q < 3; ++q)
            for (int sq = 0; sq < 2; ++sq)
                for (int o = 0; o < 2; ++o) {
                    double lo = 1e300;
                    double hi = -1e300;
                    for (int s1 = 0; s1 < 2; ++s1)
                        for (int s2 = 0; s2 < 2; ++s2) {
                            std::array<int, 3> xyz{};
                            xyz[static_cast<std::size_t>(q)] = sq;
                            xyz[static_cast<std::size_t>((q + 1) % 3)] = s1;
                            xyz[static_cast<std::size_t>((q + 2) % 3)] = s2;
                            double m = 0.0;
                            for (int oo = 0; oo < 8; ++oo) {
                                if (((oo >> (2 - q)) & 1) == o)
                                    m += p_[static_cast<std::size_t>(((xyz[0] * 2 + xyz[1]) * 2 + xyz[2]) * 8 + oo)];
                            }
                            lo = std::min(lo, m);
                            hi = std::max(hi, m);
                        }
                    worst = std::max(worst, hi - lo);
                }
        return worst;
    }

    /// Expectation of the product of the +/-1 outcomes of the parties with a
    /// setting (-1 marks an unmeasured party, whose input is averaged over).
    double correlator(const std::array<int, 3>& settings) const {
        double total = 0.0;
        int combos = 0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int z = 0; z < 2; ++z) {
                    const std::array<int, 3> xyz{x, y, z};
                    bool match = true;
                    for (std::size_t q = 0; q < 3; ++q) {
                        if (settings[q] >= 0 && settings[q] != xyz[q]) match = false;
                    }
                    if (!match) continue;
                    ++combos;
                    for (int o = 0; o < 8; ++o) {
                        int parity = 0;
                        for (int q = 0; q < 3; ++q) {
                            if (settings[static_cast<std::size_t>(q)] >= 0) parity ^= (o >> (2 - q)) & 1;
                        }
                        total += (parity ? -1.0 : 1.0) * p_[static_cast<std::size_t>(((x * 2 + y) * 2 + z) * 8 + o)];
                    }
                }
        return total / combos;
    }

  private:
    std::array<double, kSize> p_{};
};

inline double operator_value(const Behavior& beh, const BellOperator& op) {
    if (op.parties != 3) throw InvalidArgument("behaviors are three-party");
    double s = 0.0;
    for (const auto& term : op.terms) s += term.sign * beh.correlator(term.settings);
    return s;
}

/// Born-rule behavior for projective measurements Pi_a = (I + (-1)^a v.sigma)/2.
inline Behavior quantum_behavior(const CorrelationTensor& t, const MeasurementScenario& sc) {
    if (t.parties() != 3 || sc.parties() != 3) throw InvalidArgument("quantum_behavior needs three parties");
    std::array<double, Behavior::kSize> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int o = 0; o < 8; ++o) {
                    const std::array<int, 3> set{x, y, z};
                    std::array<std::array<double, 4>, 3> c{};
                    for (int q = 0; q < 3; ++q) {
                        const double sgn = ((o >> (2 - q)) & 1) ? -0.5 : 0.5;
                        const Vec3 v = sc.vector(q, set[static_cast<std::size_t>(q)]);
                        c[static_cast<std::size_t>(q)] = {0.5, sgn * v[0], sgn * v[1], sgn * v[2]};
                    }
                    const double val = t.contract(c.data());
                    p[static_cast<std::size_t>(((x * 2 + y) * 2 + z) * 8 + o)] = std::abs(val) < 1e-15 ? 0.0 : val;
                }
    for (double& v : p) v = std::max(v, 0.0);
    return Behavior(p, 1e-9);
}

inline Behavior quantum_behavior(const DensityMatrix& rho, const MeasurementScenario& sc) {
    return quantum_behavior(CorrelationTensor(rho), sc);
}

// ---------------------------------------------------------------------------
// Vertices.

enum class ModelKind { FULLY_LOCAL, NS2, S2 };

inline std::optional<ModelKind> parse_model(std::string_view name) {
    if (name == "local" || name == "fully_local") return ModelKind::FULLY_LOCAL;
    if (name == "ns2") return ModelKind::NS2;
    if (name == "s2") return ModelKind::S2;
    return std::nullopt;
}

/// Bipartite box P(ab|xy), index (x*2 + y)*4 + a*2 + b.
using BipartiteBox = std::array<double, 16>;

/// Vertices of the two-input two-output bipartite no-signaling polytope by
/// brute-force enumeration: every choice of 8 tight positivity constraints
/// that, together with normalization and no-signaling, pins a unique point.
inline std::vector<BipartiteBox> enumerate_ns_bipartite_vertices() {
    // Equalities: normalization (4), Alice's marginal independent of y (4), Bob's independent of x (4).
    Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(12, 16);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(12);
    const auto idx = [](int a, int b, int x, int y) { return (x * 2 + y) * 4 + a * 2 + b; };
    int row = 0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) eq(row, idx(a, b, x, y)) = 1.0;
            rhs(row++) = 1.0;
        }
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                eq(row, idx(a, b, x, 0)) += 1.0;
                eq(row, idx(a, b, x, 1)) -= 1.0;
            }
            ++row;
        }
    for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 2; ++b) {
            for (int a = 0; a < 2; ++a) {
                eq(row, idx(a, b, 0, y)) += 1.0;
                eq(row, idx(a, b, 1, y)) -= 1.0;
            }
            ++row;
        }

    std::vector<BipartiteBox> out;
    std::map<std::array<long, 16>, bool> seen;
    for (unsigned mask = 0; mask < (1u << 16); ++mask) {
        if (__builtin_popcount(mask) != 8) continue;
        Eigen::MatrixXd sys(20, 16);
        Eigen::VectorXd r(20);
        sys.topRows(12) = eq;
        r.head(12) = rhs;
        int k = 12;
        for (int j = 0; j < 16; ++j) {
            if (mask & (1u << j)) {
                sys.row(k).setZero();
                sys(k, j) = 1.0;
                r(k++) = 0.0;
            }
        }
        Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(sys);
        if (qr.rank() < 16) continue;
        const Eigen::VectorXd sol = qr.solve(r);
        if ((sys * sol - r).cwiseAbs().maxCoeff() > 1e-9 || sol.minCoeff() < -1e-9) continue;
        BipartiteBox box{};
        std::array<long, 16> key{};
        for (int j = 0; j < 16; ++j) {
            box[static_cast<std::size_t>(j)] = std::abs(sol(j)) < 1e-12 ? 0.0 : sol(j);
            key[static_cast<std::size_t>(j)] = std::lround(sol(j) * 1e8);
        }
        if (seen.emplace(key, true).second) out.push_back(box);
    }
    return out;
}

/// The cached vertex table (see ns_vertices.hpp).
inline std::vector<BipartiteBox> ns_bipartite_vertices() {
    std::vector<BipartiteBox> out;
    for (const auto& v : kNsBipartiteVertices) {
        BipartiteBox box{};
        for (std::size_t j = 0; j < 16; ++j) box[j] = v[j];
        out.push_back(box);
    }
    return out;
}

/// Deterministic bipartite boxes (a, b) = f(x, y), signaling allowed: 256 of them.
inline std::vector<BipartiteBox> deterministic_signaling_boxes() {
    std::vector<BipartiteBox> out;
    for (int f = 0; f < 256; ++f) {
        BipartiteBox box{};
        for (int xy = 0; xy < 4; ++xy) {
            const int ab = (f >> (2 * xy)) & 3;
            box[static_cast<std::size_t>(xy * 4 + ab)] = 1.0;
        }
        out.push_back(box);
    }
    return out;
}

namespace detail {

// Deterministic single-party response c = g(z), g in {0, 1, z, 1 - z}.
inline int single_party_output(int g, int z) {
    switch (g) {
        case 0: return 0;
        case 1: return 1;
        case 2: return z;
        default: return 1 - z;
    }
}

// Product of a bipartite box on the pair and a deterministic point on the
// remaining party. `lone` is the index (0, 1, 2) of the single party.
inline Behavior product_vertex(const BipartiteBox& box, int lone, int g) {
    std::array<double, Behavior::kSize> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c) {
                            const std::array<int, 3> in{x, y, z};
                            const std::array<int, 3> out{a, b, c};
                            const auto L = static_cast<std::size_t>(lone);
                            if (out[L] != single_party_output(g, in[L])) continue;
                            const std::size_t i = (lone + 1) % 3 < (lone + 2) % 3 ? (lone + 1) % 3 : (lone + 2) % 3;
                            const std::size_t j = 3 - L - i;
                            p[Behavior::index(a, b, c, x, y, z)] =
                                box[static_cast<std::size_t>((in[i] * 2 + in[j]) * 4 + out[i] * 2 + out[j])];
                        }
    return Behavior(p);
}

inline std::array<long, Behavior::kSize> behavior_key(const Behavior& b) {
    std::array<long, Behavior::kSize> k{};
    for (std::size_t i = 0; i < Behavior::kSize; ++i) k[i] = std::lround(b.data()[i] * 1e8);
    return k;
}

}  // namespace detail

/// Vertices of the model's polytope, de-duplicated across bipartitions.
inline std::vector<Behavior> enumerate_vertices(ModelKind kind) {
    std::vector<Behavior> out;
    if (kind == ModelKind::FULLY_LOCAL) {
        for (int ga = 0; ga < 4; ++ga)
            for (int gb = 0; gb < 4; ++gb)
                for (int gc = 0; gc < 4; ++gc) {
                    std::array<double, Behavior::kSize> p{};
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y)
                            for (int z = 0; z < 2; ++z)
                                p[Behavior::index(detail::single_party_output(ga, x), detail::single_party_output(gb, y),
                                                  detail::single_party_output(gc, z), x, y, z)] = 1.0;
                    out.emplace_back(p);
                }
        return out;
    }
    const auto boxes = kind == ModelKind::NS2 ? ns_bipartite_vertices() : deterministic_signaling_boxes();
    std::map<std::array<long, Behavior::kSize>, bool> seen;
    for (int lone = 2; lone >= 0; --lone)  // AB|C, AC|B, BC|A
        for (const auto& box : boxes)
            for (int g = 0; g < 4; ++g) {
                Behavior v = detail::product_vertex(box, lone, g);
                if (seen.emplace(detail::behavior_key(v), true).second) out.push_back(std::move(v));
            }
    return out;
}

enum class MembershipStatus { Inside, Outside, NumericalFailure };

struct Membership {
    MembershipStatus status = MembershipStatus::NumericalFailure;
    std::vector<std::pair<std::size_t, double>> decomposition;  // (vertex index, weight), weights > 0
    double residual = 0.0;
    double infeasibility = 0.0;
};

/// LP feasibility: nonnegative weights over the model's vertices, summing to
/// one, reproducing the behavior to 1e-8.
inline Membership membership(const Behavior& beh, const std::vector<Behavior>& vertices) {
    const auto n = static_cast<Eigen::Index>(vertices.size());
    Eigen::MatrixXd a(Behavior::kSize + 1, n);
    Eigen::VectorXd b(Behavior::kSize + 1);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& v = vertices[static_cast<std::size_t>(j)].data();
        for (std::size_t i = 0; i < Behavior::kSize; ++i) a(static_cast<Eigen::Index>(i), j) = v[i];
        a(Behavior::kSize, j) = 1.0;
    }
    for (std::size_t i = 0; i < Behavior::kSize; ++i) b(static_cast<Eigen::Index>(i)) = beh.data()[i];
    b(Behavior::kSize) = 1.0;
    const lp::FeasibilityResult r = lp::find_feasible_point(a, b);
    Membership m;
    m.residual = r.residual;
    m.infeasibility = r.infeasibility;
    switch (r.status) {
        case lp::Status::Feasible: m.status = MembershipStatus::Inside; break;
        case lp::Status::Infeasible: m.status = MembershipStatus::Outside; break;
        case lp::Status::NumericalFailure: m.status = MembershipStatus::NumericalFailure; break;
    }
    if (m.status == MembershipStatus::Inside) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (r.w(j) > 0.0) m.decomposition.emplace_back(static_cast<std::size_t>(j), r.w(j));
        }
    }
    return m;
}

inline Membership membership(const Behavior& beh, ModelKind kind) { return membership(beh, enumerate_vertices(kind)); }

// ---------------------------------------------------------------------------
// Plain-text behavior tables: one "x y z a b c probability" row per entry.

inline std::string write_behavior(const Behavior& beh) {
    std::ostringstream os;
    os << "# x y z a b c probability\n";
    char buf[64];
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c) {
                            std::snprintf(buf, sizeof buf, "%d %d %d %d %d %d %.17g\n", x, y, z, a, b, c,
                                          beh(a, b, c, x, y, z));
                            os << buf;
                        }
    return os.str();
}

inline Behavior read_behavior(const std::string& text) {
    std::array<double, Behavior::kSize> p{};
    std::array<bool, Behavior::kSize> filled{};
    std::istringstream is(text);
    std::string line;
    int count = 0;
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int x, y, z, a, b, c;
        double v;
        if (!(ls >> x >> y >> z >> a >> b >> c >> v)) throw InvalidArgument("malformed behavior row: " + line);
        for (int bit : {x, y, z, a, b, c}) {
            if (bit != 0 && bit != 1) throw InvalidArgument("behavior indices must be 0 or 1");
        }
        const std::size_t i = Behavior::index(a, b, c, x, y, z);
        if (filled[i]) throw InvalidArgument("duplicate behavior row: " + line);
        filled[i] = true;
        p[i] = v;
        ++count;
    }
    if (count != static_cast<int>(Behavior::kSize)) throw InvalidArgument("behavior table needs 64 rows");
    return Behavior(p);
}

}  // namespace trinl
