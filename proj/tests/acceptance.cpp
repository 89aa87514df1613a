// Acceptance run: one PASS/FAIL line per criterion, indented details below it.
// Exit status is nonzero only when a criterion outside kKnownFailures fails.

#include "support.hpp"
#include "trinl/analysis.hpp"
#include "trinl/polytope.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace trinl;

namespace {

// Criteria expected to fail: reference thresholds and claims that neither the
// closed forms nor the optimizer reproduce.
const std::set<int> kKnownFailures{5, 9};

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class... A>
std::string fmtn(const char* f, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

const double kPi4 = kPi / 4;

double opt_value(const DensityMatrix& rho, const BellOperator& op) { return optimize_operator(rho, op).value; }

FamilyParams mixed_params(Family f, double p, int k = 1) {
    FamilyParams fp;
    fp.family = f;
    fp.p = p;
    fp.k = k;
    return fp;
}

Outcome criterion1() {
    Outcome o;
    double worst_ns = 0, worst_sv = 0;
    for (int i = 0; i < 20; ++i) {
        const double eta = kPi4 * i / 19;
        const double tau = std::pow(std::sin(2 * eta), 2);
        const DensityMatrix rho(gghz(eta));
        worst_ns = std::max(worst_ns, std::abs(opt_value(rho, ns99_operator()) - (1 + 2 * std::sqrt(1 + tau))));
        const double sv_ref = std::max(4 * std::sqrt(1 - tau), 4 * std::sqrt(2 * tau));
        worst_sv = std::max(worst_sv, std::abs(opt_value(rho, svetlichny_operator()) - sv_ref));
    }
    o.check(worst_ns <= 1e-3, fmt("NS99 max |opt - 1+2sqrt(1+tau)| = %.3g (tol 1e-3)", worst_ns));
    o.check(worst_sv <= 1e-3, fmt("Svetlichny max |opt - max(4sqrt(1-tau), 4sqrt(2tau))| = %.3g (tol 1e-3)", worst_sv));
    return o;
}

Outcome criterion2() {
    Outcome o;
    double worst = 0, worst_swap = 0;
    for (int i = 0; i < 20; ++i) {
        const double eta = kPi4 * i / 19;
        const StateVector s = ms(eta);
        const double v = opt_value(DensityMatrix(s), ns99_operator());
        const double w = opt_value(DensityMatrix(testutil::permute_qubits(s, {0, 2, 1})), ns99_operator());
        worst = std::max(worst, std::abs(v - (1 + 2 * std::sqrt(1 + std::pow(std::sin(eta), 2)))));
        worst_swap = std::max(worst_swap, std::abs(v - w));
    }
    o.check(worst <= 1e-3, fmt("NS99 max |opt - 1+2sqrt(1+sin^2 eta)| = %.3g (tol 1e-3)", worst));
    o.check(worst_swap <= 1e-4, fmt("qubit 2<->3 swap max difference = %.3g (tol 1e-4)", worst_swap));
    return o;
}

Outcome criterion3() {
    Outcome o;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    double ns_dev = 0, ns_over = -1e9, sv_dev = 0, sv_over = -1e9;
    int sv_branch = 0;
    for (int i = 0; i < 50; ++i) {
        double l0 = std::abs(g(rng)), l3 = std::abs(g(rng)), l4 = std::abs(g(rng));
        const double n = std::sqrt(l0 * l0 + l3 * l3 + l4 * l4);
        const StateVector s = extended_ghz(l0 / n, l3 / n, l4 / n);
        const PureInvariants inv = pure_invariants(s);
        const double tau = std::min(inv.tau, 1.0 - inv.c12sq);
        const DensityMatrix rho(s);
        const double ns_ref = std::max(3.0, bound_b5(tau, inv.c12sq));
        const double ns = opt_value(rho, ns99_operator());
        ns_dev = std::max(ns_dev, std::abs(ns - ns_ref));
        ns_over = std::max(ns_over, ns - ns_ref);
        const double b4 = bound_b4(tau, inv.c12sq);
        const double sv = opt_value(rho, svetlichny_operator());
        sv_over = std::max(sv_over, sv - std::max(4.0, b4));
        if (b4 > 4.0) {
            ++sv_branch;
            sv_dev = std::max(sv_dev, std::abs(sv - b4));
        }
    }
    o.check(ns_dev <= 2e-3, fmt("NS99 max |opt - max(3, B5)| = %.3g (tol 2e-3)", ns_dev));
    o.check(ns_over <= 1e-3, fmt("NS99 max overshoot above max(3, B5) = %.3g (tol 1e-3)", ns_over));
    o.check(sv_dev <= 2e-3, fmtn("Svetlichny max |opt - B4| where B4 > 4 (%d states) = %.3g (tol 2e-3)", sv_branch, sv_dev));
    o.check(sv_over <= 1e-3, fmt("Svetlichny max overshoot above max(4, B4) = %.3g (tol 1e-3)", sv_over));
    return o;
}

void table_cells(Outcome& o, int which) {
    for (const TableCell& c : reproduce_table(which)) {
        o.check(c.within(2e-3), fmtn("%-8s %-10s recomputed %.6f, reference %.6f, |diff| %.2g%s", c.state.c_str(),
                                     c.op == OperatorKind::NS99 ? "ns99" : "svetlichny", c.recomputed, c.reference,
                                     c.difference(), c.monotone ? "" : " (non-monotone spot checks)"));
    }
}

Outcome criterion4() {
    Outcome o;
    table_cells(o, 1);
    return o;
}

Outcome criterion5() {
    Outcome o;
    table_cells(o, 2);
    const std::pair<Family, const char*> fams[] = {
        {Family::RHO4, "rho4"}, {Family::RHO5, "rho5"}, {Family::RHO6, "rho6"}, {Family::RHO7, "rho7"}, {Family::RHO8, "rho8"}};
    for (const auto& [f, fname] : fams) {
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            const FamilyParams fp = mixed_params(f, (i + 1) / 10.0);
            worst = std::max(worst, std::abs(opt_value(mixed_family(fp), ns99_operator()) -
                                             *closed_form_bound(fp, OperatorKind::NS99)));
        }
        o.check(worst <= 2e-3, fmtn("%s closed form vs optimizer on p = 0.1..1: max |diff| %.3g (tol 2e-3)",
                                    fname, worst));
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    double worst_g = 0, worst_s = 0, worst_marg = 0;
    for (int i = 0; i < 20; ++i) {
        const double eta = kPi4 * i / 19;
        const StateVector g = gghz(eta);
        worst_g = std::max(worst_g, std::abs(discord_monogamy_score(g).delta_d - delta_d_gghz(eta)));
        const DensityMatrix rho(g);
        worst_marg = std::max({worst_marg, std::abs(discord_numeric(partial_trace(rho, {1, 2}))),
                               std::abs(discord_numeric(partial_trace(rho, {1, 3})))});
        // Subclass S along a tau grid at fixed C12^2 = 0.1 (tau up to 0.9).
        const double tau = 0.9 * i / 19;
        const auto l = ext_s_lambdas(tau, 0.1);
        const StateVector s = extended_ghz(l[0], l[1], l[2]);
        worst_s = std::max(worst_s, std::abs(discord_monogamy_score(s).delta_d -
                                             delta_d_subclass_s(three_tangle_pure(s).tau)));
    }
    o.check(worst_g <= 1e-5, fmt("GGHZ max |numeric - closed form| = %.3g (tol 1e-5)", worst_g));
    o.check(worst_s <= 1e-5, fmt("subclass S max |numeric - closed form| = %.3g (tol 1e-5)", worst_s));
    o.check(worst_marg <= 1e-8, fmt("GGHZ two-qubit marginal discord max = %.3g (tol 1e-8)", worst_marg));
    return o;
}

Outcome criterion7() {
    Outcome o;
    struct Case {
        const char* label;
        StateVector psi;
        VisibilityFamily family;
    };
    const auto ext = [](double tau, double c2) {
        const auto l = ext_s_lambdas(tau, c2);
        return extended_ghz(l[0], l[1], l[2]);
    };
    const std::vector<Case> cases{
        {"gghz tau=0.5", gghz(kPi / 8), VisibilityFamily::GGHZ},
        {"gghz tau=1", gghz(kPi4), VisibilityFamily::GGHZ},
        {"ext_s tau=0.5 C12^2=0.2", ext(0.5, 0.2), VisibilityFamily::EXT_S},
        {"ext_s tau=1 C12^2=0", ext(1.0, 0.0), VisibilityFamily::EXT_S},
    };
    for (const Case& c : cases)
        for (OperatorKind op : {OperatorKind::NS99, OperatorKind::SVETLICHNY}) {
            const char* name = op == OperatorKind::NS99 ? "ns99" : "svetlichny";
            const VisibilityCheck v = check_visibility(c.psi, c.family, op);
            if (!v.alpha) {
                o.note(fmtn("%-24s %-10s no threshold below 1 (pure state does not violate)", c.label, name));
                continue;
            }
            o.check(v.confirmed(), fmtn("%-24s %-10s alpha* %.6f: value %.6f below, %.6f above", c.label, name, *v.alpha,
                                        v.below, v.above));
        }
    return o;
}

Outcome criterion8() {
    Outcome o;
    VectorStore v = VectorStore::Zero(8);
    v(0) = 0.966;
    v(7) = 0.259;
    const StateVector s = StateVector::normalized(v);
    const DensityMatrix rho(s);
    const double ns = opt_value(rho, ns99_operator());
    const double sv = opt_value(rho, svetlichny_operator());
    o.note(fmt("tau = %.6f", three_tangle_pure(s).tau));
    o.check(ns > 3.0, fmt("NS99 optimum %.6f > 3", ns));
    o.check(sv < 4.0, fmt("Svetlichny optimum %.6f < 4", sv));
    return o;
}

std::string outcome_text(const ChannelOutcome& c) {
    return fmtn("ns99 %.6f%s, svetlichny %.6f%s, claim %s", c.ns99, c.ns_violated ? " (violated)" : "", c.svetlichny,
                c.svet_violated ? " (violated)" : "", c.claim_holds() ? "holds" : "fails");
}

Outcome criterion9() {
    Outcome o;
    for (const ChannelClaim& c : evaluate_channel_claims()) {
        o.note(c.name);
        o.note("  Kraus model:       " + outcome_text(c.kraus));
        if (c.closed_form) {
            const bool disagree = c.closed_form->claim_holds() != c.kraus.claim_holds();
            o.check(c.closed_form->claim_holds(),
                    "  closed-form model: " + outcome_text(*c.closed_form) +
                        (c.closed_form->physical ? "" : fmt(" [not PSD, min eigenvalue %.3g]", c.closed_form->min_eigenvalue)) +
                        (disagree ? " [models disagree]" : ""));
        } else {
            o.check(c.kraus.claim_holds(), "  no closed form; claim under Kraus model");
        }
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    const auto local = enumerate_vertices(ModelKind::FULLY_LOCAL);
    const auto ns2 = enumerate_vertices(ModelKind::NS2);
    double max_ns = -1e9, max_sv = -1e9;
    for (const Behavior& b : local) {
        max_ns = std::max(max_ns, operator_value(b, ns99_operator()));
        max_sv = std::max(max_sv, operator_value(b, svetlichny_operator()));
    }
    o.check(local.size() == 64 && max_ns == 3.0 && max_sv == 4.0,
            fmtn("%zu deterministic strategies: max NS99 %.17g, max Svetlichny %.17g", local.size(), max_ns, max_sv));

    // Random settings rarely approach the facet, so noisy GHZ at its optimal
    // settings supplies behaviors on both sides of it.
    const DensityMatrix ghz(named_pure(NamedState::GHZ));
    const ViolationReport r = optimize_operator(ghz, ns99_operator());
    std::vector<Behavior> behaviors;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    for (int i = 0; i < 30; ++i) {
        std::vector<double> a(12);
        for (double& x : a) x = u(rng);
        const DensityMatrix rho = white_noise_mix(testutil::random_density(rng, 8, 1 + i % 2), 0.5 + 0.5 * u(rng) / (2 * kPi));
        behaviors.push_back(quantum_behavior(rho, MeasurementScenario(3, a)));
        behaviors.push_back(quantum_behavior(white_noise_mix(ghz, 0.6 + 0.4 * i / 29), r.scenario));
    }
    int inside = 0;
    double worst = -1e9;
    bool failure = false;
    for (const Behavior& b : behaviors) {
        const Membership m = membership(b, ns2);
        if (m.status == MembershipStatus::NumericalFailure) failure = true;
        if (m.status == MembershipStatus::Inside) {
            ++inside;
            worst = std::max(worst, operator_value(b, ns99_operator()));
        }
    }
    o.check(!failure && inside > 0 && worst <= 3.0 + 1e-7,
            fmtn("%d of %zu behaviors inside NS2, max NS99 among them %.9f (bound 3 + 1e-7)", inside, behaviors.size(),
                 worst));

    const Membership m = membership(quantum_behavior(ghz, r.scenario), ns2);
    o.check(m.status == MembershipStatus::Outside, fmt("GHZ at its NS99 optimum (%.6f) certified outside NS2", r.value));
    return o;
}

Outcome criterion11() {
    Outcome o;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    double trace_err = 0, min_eig = 1;
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix rho = testutil::random_density(rng, 8, 1 + i % 8);
        const ChannelKind k = i % 2 ? ChannelKind::DEPOLARIZE : ChannelKind::AMPLITUDE_DAMP;
        const DensityMatrix out = apply_channel_spec(rho, {k, {u(rng), u(rng), u(rng)}});
        trace_err = std::max(trace_err, std::abs(out.matrix().trace().real() - 1.0));
        min_eig = std::min(min_eig, hermitian_eigenvalues(out.matrix()).back());
    }
    o.check(trace_err <= 1e-12 && min_eig >= -1e-10,
            fmtn("channels: max trace error %.3g, min eigenvalue %.3g (100 instances)", trace_err, min_eig));

    double perm = 0;
    const std::array<std::array<int, 3>, 5> perms{{{0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int i = 0; i < 100; ++i) {
        const StateVector s = testutil::random_state(rng, 8);
        const double t = three_tangle_pure(s).tau;
        for (const auto& p : perms) perm = std::max(perm, std::abs(three_tangle_pure(testutil::permute_qubits(s, p)).tau - t));
    }
    o.check(perm <= 1e-9, fmt("three-tangle permutation invariance: max deviation %.3g (tol 1e-9, 100 states)", perm));

    double pure_s = 0;
    bool mixed_ok = true;
    for (int i = 0; i < 100; ++i) {
        pure_s = std::max(pure_s, std::abs(von_neumann_entropy(DensityMatrix(testutil::random_state(rng, 8)))));
        const double sm = von_neumann_entropy(testutil::random_density(rng, 8, 2 + i % 7));
        mixed_ok = mixed_ok && sm > 1e-10 && sm <= 3.0 + 1e-12;
    }
    const bool edges = binary_entropy(0.0) == 0.0 && binary_entropy(1.0) == 0.0 &&
                       std::abs(von_neumann_entropy(DensityMatrix::maximally_mixed(8)) - 3.0) < 1e-12;
    o.check(pure_s <= 1e-8 && mixed_ok && edges,
            fmt("entropy: pure states max %.3g, mixed states in (0, 3], edge values exact (100 instances)", pure_s));

    int identical = 0;
    OptimizeOptions serial;
    serial.threads = 1;
    serial.restarts = 16;
    OptimizeOptions parallel = serial;
    parallel.threads = 0;
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix rho = testutil::random_density(rng, 8, 1 + i % 3);
        const BellOperator& op = i % 2 ? ns99_operator() : svetlichny_operator();
        const ViolationReport a = optimize_operator(rho, op, serial);
        const ViolationReport b = optimize_operator(rho, op, parallel);
        if (a.value == b.value && a.scenario.angles() == b.scenario.angles() && a.converged == b.converged) ++identical;
    }
    o.check(identical == 100, fmtn("optimizer determinism: %d of 100 reports bit-identical across runs", identical));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"GGHZ bound recovery", criterion1},
        {"MS bound recovery and swap symmetry", criterion2},
        {"subclass S bounds", criterion3},
        {"table 1 thresholds", criterion4},
        {"table 2 thresholds and closed-form mixed bounds", criterion5},
        {"discord monogamy", criterion6},
        {"visibility thresholds", criterion7},
        {"detection example 0.966|000> + 0.259|111>", criterion8},
        {"noisy-channel claims", criterion9},
        {"polytope consistency", criterion10},
        {"property suites", criterion11},
    };
    int unexpected = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool known = kKnownFailures.count(id) > 0;
        std::printf("%s  criterion %2d: %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, secs,
                    !o.pass && known ? " [known failure]" : "");
        for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
        std::fflush(stdout);
        if (!o.pass && !known) ++unexpected;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("total %.1f s, %d unexpected failure(s)\n", total, unexpected);
    return unexpected == 0 ? 0 : 1;
}
