#pragma once

// Higher-level studies built on the state, channel, entanglement and Bell
// layers: violation thresholds along mixing parameters, the reference
// threshold tables, noisy-channel examples, visibility checks and sweeps.

#include "trinl/bell.hpp"
#include "trinl/channels.hpp"
#include "trinl/entangle.hpp"
#include "trinl/states.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinl {

/// Raised when a numeric procedure cannot produce a trustworthy answer
/// (no crossing in a bracket, non-convergence).
class NumericalFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Fixed-point text with 9 decimals, trailing zeros stripped.
inline std::string format_number(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("refusing to format a non-finite number");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x);
    std::string s(buf);
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

// ---------------------------------------------------------------------------
// Pure-state invariants and closed-form dispatch.

struct PureInvariants {
    double tau = 0.0;
    double c12sq = 0.0;
};

inline PureInvariants pure_invariants(const StateVector& psi) {
    PureInvariants out;
    out.tau = three_tangle_pure(psi).tau;
    const double c = concurrence(partial_trace(DensityMatrix(psi), {1, 2}));
    out.c12sq = c * c;
    return out;
}

/// Subclass-S coefficients with the given three-tangle and squared
/// concurrence: tau = 4 l0^2 l4^2, C12^2 = 4 l0^2 l3^2, taking l0^2 >= 1/2.
inline std::array<double, 3> ext_s_lambdas(double tau, double c12sq) {
    if (!(tau >= 0.0 && c12sq >= 0.0 && tau + c12sq <= 1.0 + 1e-12))
        throw InvalidArgument("need tau >= 0, C12^2 >= 0 and tau + C12^2 <= 1");
    const double u = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - tau - c12sq)));
    const double l3 = std::sqrt(c12sq / (4.0 * u));
    const double l4 = std::sqrt(tau / (4.0 * u));
    const double l0 = std::sqrt(std::max(0.0, 1.0 - l3 * l3 - l4 * l4));
    return {l0, l3, l4};
}

inline std::optional<VisibilityFamily> visibility_family(Family f) {
    switch (f) {
        case Family::GGHZ:
        case Family::GHZ: return VisibilityFamily::GGHZ;
        case Family::MS:
        case Family::EXT_S: return VisibilityFamily::EXT_S;
        default: return std::nullopt;
    }
}

/// Closed-form maximum of the operator on the family member, when one exists.
inline std::optional<double> closed_form_bound(const FamilyParams& fp, OperatorKind op) {
    if (op == OperatorKind::CHSH) return std::nullopt;
    const bool ns = op == OperatorKind::NS99;
    switch (fp.family) {
        case Family::GGHZ:
        case Family::GHZ: {
            const double tau = fp.family == Family::GHZ ? 1.0 : std::pow(std::sin(2 * fp.eta), 2);
            return ns ? bound_b1_b3(tau) : bound_b2(tau);
        }
        case Family::MS:
        case Family::EXT_S: {
            const PureInvariants inv = pure_invariants(pure_family(fp));
            const double tau = std::min(inv.tau, 1.0 - inv.c12sq);
            return ns ? bound_b5(tau, inv.c12sq) : bound_b4(tau, inv.c12sq);
        }
        case Family::RHO4:
            if (ns) return bound_rho4(fp.p);
            return std::nullopt;
        case Family::RHO5:
            if (ns) return bound_rho5(fp.p);
            return std::nullopt;
        case Family::RHO6: return ns ? std::optional(bound_table2(Table2Family::RHO6, fp.p)) : std::nullopt;
        case Family::RHO7: return ns ? std::optional(bound_table2(Table2Family::RHO7, fp.p)) : std::nullopt;
        case Family::RHO8: return ns ? std::optional(bound_table2(Table2Family::RHO8, fp.p)) : std::nullopt;
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Violation thresholds in the mixing weight p.

struct ThresholdQuery {
    FamilyParams family;
    OperatorKind op = OperatorKind::NS99;
    std::optional<double> target;  // defaults to the operator's classical bound
    double lo = 0.0;
    double hi = 1.0;
    double tol = 1e-5;
    int restarts = 64;
    int root_restarts = 128;  // used once the bracket is narrower than root_width
    double root_width = 0.01;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct ThresholdResult {
    double p = 0.0;
    double target = 0.0;
    int evaluations = 0;
    bool monotone = true;
    std::vector<std::pair<double, double>> spot_checks;  // (p, optimized value)
};

inline ThresholdResult find_threshold(const ThresholdQuery& q) {
    if (is_pure_family(q.family.family)) throw InvalidArgument("thresholds are taken over mixed families");
    if (!(q.lo >= 0.0 && q.hi <= 1.0 && q.lo < q.hi)) throw InvalidArgument("bracket must satisfy 0 <= lo < hi <= 1");
    if (!(q.tol >= 1e-7)) throw InvalidArgument("tolerance must be at least 1e-7");
    const BellOperator& op = bell_operator(q.op);
    if (op.parties != 3) throw InvalidArgument("thresholds are for three-party operators");

    ThresholdResult res;
    res.target = q.target.value_or(op.classical_bound);
    const auto value = [&](double p, int restarts) {
        FamilyParams fp = q.family;
        fp.p = p;
        OptimizeOptions o;
        o.restarts = restarts;
        o.seed = q.seed;
        o.threads = q.threads;
        ++res.evaluations;
        return optimize_operator(mixed_family(fp), op, o).value;
    };
    const auto violates = [&](double v) { return v > res.target + kViolationMargin; };

    if (!violates(value(q.hi, q.root_restarts))) throw NumericalFailure("no violation at the upper end of the bracket");
    if (violates(value(q.lo, q.root_restarts))) throw NumericalFailure("already violated at the lower end of the bracket");

    double lo = q.lo;
    double hi = q.hi;
    while (hi - lo > q.tol) {
        const double mid = 0.5 * (lo + hi);
        const int r = hi - lo < q.root_width ? q.root_restarts : q.restarts;
        (violates(value(mid, r)) ? hi : lo) = mid;
    }
    res.p = 0.5 * (lo + hi);

    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 5; ++i) {
        const double p = q.lo + (q.hi - q.lo) * i / 6.0;
        const double v = value(p, q.restarts);
        res.spot_checks.emplace_back(p, v);
        if (v < prev - 1e-6) res.monotone = false;
        prev = v;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Reference threshold tables.

struct ReferenceRow {
    const char* state;
    Family family;
    int k;
    double tau_positive;  // reference constant, not recomputed
    double ns99;
    double svetlichny;
};

inline const std::vector<ReferenceRow>& reference_table(int which) {
    static const std::vector<ReferenceRow> kOne{
        {"rho2", Family::RHO2, 1, 0.6268, 0.811876, 0.707109},
        {"rho3^2", Family::RHO3, 2, 0.75, 0.819964, 0.70719},
        {"rho3^3", Family::RHO3, 3, 0.7452, 0.818825, 0.707109},
        {"rho3^10", Family::RHO3, 10, 0.7452, 0.814789, 0.707109},
    };
    static const std::vector<ReferenceRow> kTwo{
        {"rho4", Family::RHO4, 1, 0.75, 0.726, 0.72},
        {"rho5", Family::RHO5, 1, 0.737, 0.729157, 0.710858},
        {"rho6", Family::RHO6, 1, 0.2143, 0.756458, 0.765134},
        {"rho7", Family::RHO7, 1, 0.2062, 0.759185, 0.76444},
        {"rho8", Family::RHO8, 1, 0.2490, 0.75843, 0.763645},
    };
    if (which == 1) return kOne;
    if (which == 2) return kTwo;
    throw InvalidArgument("table must be 1 or 2");
}

struct TableCell {
    std::string state;
    OperatorKind op = OperatorKind::NS99;
    double reference = 0.0;
    double recomputed = 0.0;
    double tau_positive = 0.0;
    bool monotone = true;

    double difference() const { return std::abs(recomputed - reference); }
    bool within(double tol = 2e-3) const { return difference() <= tol; }
};

/// Threshold query used for the tables. The bracket starts at p = 0.5 because
/// the p = 0 ends of several families (the W-type mixtures) violate on their own.
inline ThresholdQuery table_query() {
    ThresholdQuery q;
    q.lo = 0.5;
    return q;
}

inline TableCell reproduce_cell(const ReferenceRow& row, OperatorKind op, ThresholdQuery base = table_query()) {
    base.family.family = row.family;
    base.family.k = row.k;
    base.op = op;
    const ThresholdResult r = find_threshold(base);
    TableCell c;
    c.state = row.state;
    c.op = op;
    c.reference = op == OperatorKind::NS99 ? row.ns99 : row.svetlichny;
    c.recomputed = r.p;
    c.tau_positive = row.tau_positive;
    c.monotone = r.monotone;
    return c;
}

inline std::vector<TableCell> reproduce_table(int which, const ThresholdQuery& base = table_query()) {
    std::vector<TableCell> out;
    for (const auto& row : reference_table(which))
        for (OperatorKind op : {OperatorKind::NS99, OperatorKind::SVETLICHNY}) out.push_back(reproduce_cell(row, op, base));
    return out;
}

// ---------------------------------------------------------------------------
// Noisy-channel examples: does the 99th facet detect what Svetlichny misses?

struct ChannelExample {
    std::string name;
    StateVector state;
    ChannelSpec channel;
    std::optional<double> gghz_eta;  // set when the GGHZ two-level closed form applies
};

inline std::vector<ChannelExample> channel_examples() {
    std::vector<ChannelExample> out;
    const ChannelSpec depol{ChannelKind::DEPOLARIZE, {0.8, 0.7, 0.6}};
    out.push_back({"gghz(0.69) depolarized (0.8, 0.7, 0.6)", gghz(0.69), depol, 0.69});
    out.push_back({"ms(0.69) depolarized (0.8, 0.7, 0.6)", ms(0.69), depol, std::nullopt});
    const double eta = std::atan2(0.099, 0.995);
    out.push_back({"0.995|000> + 0.099|111> damped (0.1, 0.08, 0.09)", gghz(eta),
                   ChannelSpec{ChannelKind::AMPLITUDE_DAMP, {0.1, 0.08, 0.09}}, eta});
    VectorStore v = VectorStore::Zero(8);
    v(0) = 1.0;
    v(6) = 0.955;
    v(7) = 0.296;
    out.push_back({"(|000> + 0.955|110> + 0.296|111>)/sqrt2 damped (0.33, 0.15, 0.09)", StateVector::normalized(v),
                   ChannelSpec{ChannelKind::AMPLITUDE_DAMP, {0.33, 0.15, 0.09}}, std::nullopt});
    return out;
}

struct ChannelOutcome {
    double ns99 = 0.0;
    double svetlichny = 0.0;
    bool ns_violated = false;
    bool svet_violated = false;
    bool physical = true;  // the evaluated matrix is a density matrix
    double min_eigenvalue = 0.0;

    /// The claim: NS99 is violated while Svetlichny is not.
    bool claim_holds() const { return ns_violated && !svet_violated; }
};

struct ChannelClaim {
    std::string name;
    ChannelOutcome kraus;
    std::optional<ChannelOutcome> closed_form;
};

inline ChannelOutcome evaluate_outcome(const CorrelationTensor& t, const OptimizeOptions& opt) {
    ChannelOutcome o;
    const ViolationReport ns = optimize_operator(t, ns99_operator(), opt);
    const ViolationReport sv = optimize_operator(t, svetlichny_operator(), opt);
    o.ns99 = ns.value;
    o.svetlichny = sv.value;
    o.ns_violated = ns.violated;
    o.svet_violated = sv.violated;
    return o;
}

inline ChannelClaim evaluate_channel_example(const ChannelExample& ex, const OptimizeOptions& opt = {}) {
    ChannelClaim c;
    c.name = ex.name;
    const DensityMatrix noisy = apply_channel_spec(DensityMatrix(ex.state), ex.channel);
    c.kraus = evaluate_outcome(CorrelationTensor(noisy), opt);
    c.kraus.min_eigenvalue = hermitian_eigenvalues(noisy.matrix()).back();
    if (ex.gghz_eta) {
        const auto& s = ex.channel.strengths;
        const ClosedFormState cf = ex.channel.kind == ChannelKind::DEPOLARIZE
                                       ? closed_form_depolarized_gghz(*ex.gghz_eta, s[0], s[1], s[2])
                                       : closed_form_damped_gghz(*ex.gghz_eta, s[0], s[1], s[2]);
        ChannelOutcome o = evaluate_outcome(CorrelationTensor(cf.matrix), opt);
        o.physical = cf.is_density_matrix();
        o.min_eigenvalue = cf.min_eigenvalue;
        c.closed_form = o;
    }
    return c;
}

inline std::vector<ChannelClaim> evaluate_channel_claims(const OptimizeOptions& opt = {}) {
    std::vector<ChannelClaim> out;
    for (const auto& ex : channel_examples()) out.push_back(evaluate_channel_example(ex, opt));
    return out;
}

// ---------------------------------------------------------------------------
// Visibility thresholds with numeric confirmation.

struct VisibilityCheck {
    std::optional<double> alpha;
    double below = 0.0;  // optimized value at alpha - delta
    double above = 0.0;  // optimized value at alpha + delta
    bool below_violated = false;
    bool above_violated = false;

    bool confirmed() const { return alpha.has_value() && !below_violated && above_violated; }
};

inline VisibilityCheck check_visibility(const StateVector& psi, VisibilityFamily family, OperatorKind op,
                                        double delta = 0.01, const OptimizeOptions& opt = {}) {
    const PureInvariants inv = pure_invariants(psi);
    const double tau = std::min(inv.tau, 1.0 - inv.c12sq);
    VisibilityCheck c;
    c.alpha = visibility_threshold(family, tau, family == VisibilityFamily::GGHZ ? 0.0 : inv.c12sq, op);
    if (!c.alpha) return c;
    const DensityMatrix rho(psi);
    const BellOperator& bop = bell_operator(op);
    const double a_lo = std::max(0.0, *c.alpha - delta);
    const double a_hi = std::min(1.0, *c.alpha + delta);
    const ViolationReport lo = optimize_operator(white_noise_mix(rho, a_lo), bop, opt);
    const ViolationReport hi = optimize_operator(white_noise_mix(rho, a_hi), bop, opt);
    c.below = lo.value;
    c.above = hi.value;
    c.below_violated = lo.violated;
    c.above_violated = hi.violated;
    return c;
}

// ---------------------------------------------------------------------------
// Parameter sweeps as CSV.

enum class SweepColumn { NS_BOUND, SVET_BOUND, NS_OPT, SVET_OPT, TAU, C12SQ, DELTA_D, VISIBILITY_NS, VISIBILITY_SVET };

inline std::optional<SweepColumn> parse_sweep_column(std::string_view s) {
    struct Entry {
        std::string_view name;
        SweepColumn col;
    };
    static constexpr Entry kNames[] = {
        {"ns_bound", SweepColumn::NS_BOUND}, {"svet_bound", SweepColumn::SVET_BOUND},
        {"ns_opt", SweepColumn::NS_OPT},     {"svet_opt", SweepColumn::SVET_OPT},
        {"tau", SweepColumn::TAU},           {"c12sq", SweepColumn::C12SQ},
        {"delta_d", SweepColumn::DELTA_D},   {"visibility_ns", SweepColumn::VISIBILITY_NS},
        {"visibility_svet", SweepColumn::VISIBILITY_SVET},
    };
    for (const auto& e : kNames) {
        if (e.name == s) return e.col;
    }
    return std::nullopt;
}

inline const char* sweep_column_name(SweepColumn c) {
    switch (c) {
        case SweepColumn::NS_BOUND: return "ns_bound";
        case SweepColumn::SVET_BOUND: return "svet_bound";
        case SweepColumn::NS_OPT: return "ns_opt";
        case SweepColumn::SVET_OPT: return "svet_opt";
        case SweepColumn::TAU: return "tau";
        case SweepColumn::C12SQ: return "c12sq";
        case SweepColumn::DELTA_D: return "delta_d";
        case SweepColumn::VISIBILITY_NS: return "visibility_ns";
        case SweepColumn::VISIBILITY_SVET: return "visibility_svet";
    }
    return "?";
}

struct SweepSpec {
    FamilyParams family;
    std::string parameter;  // eta, tau (gghz, ms, ext_s) or p (mixed families)
    double from = 0.0;
    double to = 1.0;
    int steps = 11;
    double c12sq = 0.0;  // held fixed when sweeping tau over subclass S
    std::vector<SweepColumn> columns;
    OptimizeOptions optimize;
};

/// Family member at parameter value x.
inline FamilyParams sweep_point(const SweepSpec& spec, double x) {
    FamilyParams fp = spec.family;
    const Family f = fp.family;
    if (spec.parameter == "p") {
        if (is_pure_family(f)) throw InvalidArgument("parameter p applies to mixed families");
        fp.p = x;
    } else if (spec.parameter == "eta") {
        if (f != Family::GGHZ && f != Family::MS) throw InvalidArgument("parameter eta applies to gghz and ms");
        fp.eta = x;
    } else if (spec.parameter == "tau") {
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("tau must lie in [0, 1]");
        if (f == Family::GGHZ) {
            fp.eta = 0.5 * std::asin(std::sqrt(x));
        } else if (f == Family::MS) {
            fp.eta = std::asin(std::sqrt(x));
        } else if (f == Family::EXT_S) {
            fp.lambdas = ext_s_lambdas(x, spec.c12sq);
        } else {
            throw InvalidArgument("parameter tau applies to gghz, ms and ext_s");
        }
    } else {
        throw InvalidArgument("unknown sweep parameter: " + spec.parameter);
    }
    return fp;
}

inline double sweep_value(const SweepSpec& spec, const FamilyParams& fp, SweepColumn col) {
    const auto need_pure = [&] {
        if (!is_pure_family(fp.family)) throw InvalidArgument(std::string(sweep_column_name(col)) + " needs a pure family");
    };
    const auto need_closed = [&](OperatorKind op) {
        const auto b = closed_form_bound(fp, op);
        if (!b) throw InvalidArgument(std::string(sweep_column_name(col)) + " has no closed form for this family");
        return *b;
    };
    const auto visibility = [&](OperatorKind op) {
        const auto vf = visibility_family(fp.family);
        if (!vf) throw InvalidArgument("visibility columns apply to gghz, ms and ext_s");
        const PureInvariants inv = pure_invariants(pure_family(fp));
        const double tau = std::min(inv.tau, 1.0 - inv.c12sq);
        return visibility_ratio(*vf, tau, *vf == VisibilityFamily::GGHZ ? 0.0 : inv.c12sq, op);
    };
    switch (col) {
        case SweepColumn::NS_BOUND: return need_closed(OperatorKind::NS99);
        case SweepColumn::SVET_BOUND: return need_closed(OperatorKind::SVETLICHNY);
        case SweepColumn::NS_OPT: return optimize_operator(family_state(fp), ns99_operator(), spec.optimize).value;
        case SweepColumn::SVET_OPT:
            return optimize_operator(family_state(fp), svetlichny_operator(), spec.optimize).value;
        case SweepColumn::TAU: need_pure(); return pure_invariants(pure_family(fp)).tau;
        case SweepColumn::C12SQ: need_pure(); return pure_invariants(pure_family(fp)).c12sq;
        case SweepColumn::DELTA_D: need_pure(); return discord_monogamy_score(pure_family(fp)).delta_d;
        case SweepColumn::VISIBILITY_NS: return visibility(OperatorKind::NS99);
        case SweepColumn::VISIBILITY_SVET: return visibility(OperatorKind::SVETLICHNY);
    }
    throw InvalidArgument("unknown column");
}

/// CSV with a header row: the swept parameter, then the requested columns.
inline std::string run_sweep(const SweepSpec& spec) {
    if (spec.steps < 2) throw InvalidArgument("a sweep needs at least 2 steps");
    if (!(spec.from < spec.to)) throw InvalidArgument("sweep range must satisfy from < to");
    if (spec.columns.empty()) throw InvalidArgument("a sweep needs at least one column");
    std::ostringstream os;
    os << spec.parameter;
    for (SweepColumn c : spec.columns) os << ',' << sweep_column_name(c);
    os << '\n';
    for (int i = 0; i < spec.steps; ++i) {
        const double x = i + 1 == spec.steps ? spec.to : spec.from + (spec.to - spec.from) * i / (spec.steps - 1);
        const FamilyParams fp = sweep_point(spec, x);
        os << format_number(x);
        for (SweepColumn c : spec.columns) {
            const double v = sweep_value(spec, fp, c);
            if (!std::isfinite(v)) throw NumericalFailure("non-finite sweep value");
            os << ',' << format_number(v);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace trinl
