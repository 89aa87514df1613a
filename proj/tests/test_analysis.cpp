#include "trinl/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace trinl;

namespace {

FamilyParams family(Family f) {
    FamilyParams fp;
    fp.family = f;
    return fp;
}

// Root of g on [lo, hi] by plain bisection, g(lo) < 0 < g(hi).
template <class G>
double bisect(G g, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(FormatNumber, Examples) {
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(1 + 2 * std::sqrt(2.0)), "3.828427125");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(-1e-12), "0");
    EXPECT_EQ(format_number(-0.25), "-0.25");
    EXPECT_THROW(format_number(std::nan("")), InvalidArgument);
    EXPECT_THROW(format_number(INFINITY), InvalidArgument);
}

TEST(ExtSLambdas, ReproduceInvariants) {
    for (double tau : {0.0, 0.2, 0.5, 0.9})
        for (double c2 : {0.0, 0.05, 0.1}) {
            const auto l = ext_s_lambdas(tau, c2);
            EXPECT_NEAR(l[0] * l[0] + l[1] * l[1] + l[2] * l[2], 1.0, 1e-14);
            EXPECT_GE(l[0] * l[0], 0.5 - 1e-14);
            const PureInvariants inv = pure_invariants(extended_ghz(l[0], l[1], l[2]));
            EXPECT_NEAR(inv.tau, tau, 1e-10);
            EXPECT_NEAR(inv.c12sq, c2, 1e-10);
        }
    EXPECT_THROW(ext_s_lambdas(0.8, 0.3), InvalidArgument);
}

TEST(ClosedFormBound, Dispatch) {
    FamilyParams g = family(Family::GGHZ);
    g.eta = kPi / 8;
    EXPECT_NEAR(*closed_form_bound(g, OperatorKind::NS99), bound_b1_b3(0.5), 1e-12);
    EXPECT_NEAR(*closed_form_bound(g, OperatorKind::SVETLICHNY), bound_b2(0.5), 1e-12);
    EXPECT_NEAR(*closed_form_bound(family(Family::GHZ), OperatorKind::NS99), 1 + 2 * std::sqrt(2.0), 1e-15);
    FamilyParams m = family(Family::MS);
    m.eta = 0.6;
    EXPECT_NEAR(*closed_form_bound(m, OperatorKind::NS99), 1 + 2 * std::sqrt(1 + std::pow(std::sin(0.6), 2)), 1e-9);
    FamilyParams r = family(Family::RHO6);
    r.p = 0.9;
    EXPECT_NEAR(*closed_form_bound(r, OperatorKind::NS99), bound_table2(Table2Family::RHO6, 0.9), 0.0);
    EXPECT_FALSE(closed_form_bound(r, OperatorKind::SVETLICHNY).has_value());
    EXPECT_FALSE(closed_form_bound(family(Family::RHO2), OperatorKind::NS99).has_value());
    EXPECT_FALSE(closed_form_bound(g, OperatorKind::CHSH).has_value());
}

TEST(Threshold, MatchesClosedFormRoot) {
    FamilyParams r = family(Family::RHO5);
    ThresholdQuery q = table_query();
    q.family = r;
    q.op = OperatorKind::NS99;
    const ThresholdResult t = find_threshold(q);
    const double oracle = bisect([](double p) { return bound_rho5(p) - 3.0; }, 0.5, 1.0);
    EXPECT_NEAR(t.p, oracle, 2e-4);
    EXPECT_TRUE(t.monotone);
}

TEST(Threshold, RejectsNonBracketingInterval) {
    ThresholdQuery q = table_query();
    q.family = family(Family::RHO4);
    q.op = OperatorKind::NS99;
    q.hi = 0.6;  // no violation anywhere below 0.6
    EXPECT_THROW(find_threshold(q), NumericalFailure);
}

TEST(ReferenceTables, Shape) {
    EXPECT_EQ(reference_table(1).size(), 4u);
    EXPECT_EQ(reference_table(2).size(), 5u);
    EXPECT_THROW(reference_table(3), InvalidArgument);
}

TEST(ChannelExamples, Shape) {
    const auto ex = channel_examples();
    EXPECT_EQ(ex.size(), 4u);
    for (const auto& e : ex) EXPECT_FALSE(e.name.empty());
}

TEST(Visibility, GhzCheckConfirms) {
    const VisibilityCheck v = check_visibility(named_pure(NamedState::GHZ), VisibilityFamily::GGHZ, OperatorKind::SVETLICHNY);
    ASSERT_TRUE(v.alpha.has_value());
    EXPECT_NEAR(*v.alpha, 1 / std::sqrt(2.0), 1e-12);
    EXPECT_TRUE(v.confirmed());
}

TEST(Sweep, ColumnNamesRoundTrip) {
    for (SweepColumn c : {SweepColumn::NS_BOUND, SweepColumn::SVET_BOUND, SweepColumn::NS_OPT, SweepColumn::SVET_OPT,
                          SweepColumn::TAU, SweepColumn::C12SQ, SweepColumn::DELTA_D, SweepColumn::VISIBILITY_NS,
                          SweepColumn::VISIBILITY_SVET})
        EXPECT_EQ(parse_sweep_column(sweep_column_name(c)), c);
    EXPECT_FALSE(parse_sweep_column("bogus").has_value());
}

TEST(Sweep, TauParameterization) {
    SweepSpec s;
    s.parameter = "tau";
    for (Family f : {Family::GGHZ, Family::MS}) {
        s.family = family(f);
        for (double tau : {0.1, 0.5, 0.9}) EXPECT_NEAR(pure_invariants(pure_family(sweep_point(s, tau))).tau, tau, 1e-10);
    }
    s.family = family(Family::EXT_S);
    s.c12sq = 0.05;
    const PureInvariants inv = pure_invariants(pure_family(sweep_point(s, 0.4)));
    EXPECT_NEAR(inv.tau, 0.4, 1e-10);
    EXPECT_NEAR(inv.c12sq, 0.05, 1e-10);
    s.family = family(Family::RHO4);
    EXPECT_THROW(sweep_point(s, 0.4), InvalidArgument);
}

TEST(Sweep, Csv) {
    SweepSpec s;
    s.family = family(Family::GGHZ);
    s.parameter = "eta";
    s.from = 0.0;
    s.to = kPi / 4;
    s.steps = 3;
    s.columns = {SweepColumn::TAU, SweepColumn::NS_BOUND, SweepColumn::DELTA_D};
    const std::string csv = run_sweep(s);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "eta,tau,ns_bound,delta_d");
    EXPECT_NE(csv.find("\n0,0,3,0\n"), std::string::npos);
    EXPECT_NE(csv.find("0.785398163,1,3.828427125,1\n"), std::string::npos);
}

TEST(Sweep, RejectsBadSpecs) {
    SweepSpec s;
    s.family = family(Family::GGHZ);
    s.parameter = "eta";
    s.to = 0.5;
    s.columns = {SweepColumn::TAU};
    s.steps = 1;
    EXPECT_THROW(run_sweep(s), InvalidArgument);
    s.steps = 3;
    s.from = 0.6;
    EXPECT_THROW(run_sweep(s), InvalidArgument);
    s.from = 0.0;
    s.columns.clear();
    EXPECT_THROW(run_sweep(s), InvalidArgument);
    s.columns = {SweepColumn::TAU};
    s.parameter = "p";
    EXPECT_THROW(run_sweep(s), InvalidArgument);
}
