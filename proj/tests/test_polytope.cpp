#include "support.hpp"
#include "trinl/bell.hpp"
#include "trinl/polytope.hpp"
#include "trinl/states.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace trinl;

namespace {

MeasurementScenario random_scenario(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    std::vector<double> a(12);
    for (double& x : a) x = u(rng);
    return MeasurementScenario(3, a);
}

// PR box on (A, B) times a deterministic C = 0.
Behavior pr_box_behavior() {
    std::array<double, Behavior::kSize> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int a = 0; a < 2; ++a) p[Behavior::index(a, a ^ (x & y), 0, x, y, z)] = 0.5;
    return Behavior(p);
}

Behavior mix(const Behavior& a, const Behavior& b, double w) {
    std::array<double, Behavior::kSize> p{};
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = w * a.data()[i] + (1 - w) * b.data()[i];
    return Behavior(p);
}

void expect_valid_decomposition(const Behavior& beh, const Membership& m, const std::vector<Behavior>& verts) {
    double sum = 0.0;
    std::array<double, Behavior::kSize> rebuilt{};
    for (const auto& [idx, w] : m.decomposition) {
        EXPECT_GT(w, 0.0);
        sum += w;
        for (std::size_t i = 0; i < rebuilt.size(); ++i) rebuilt[i] += w * verts[idx].data()[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (std::size_t i = 0; i < rebuilt.size(); ++i) EXPECT_NEAR(rebuilt[i], beh.data()[i], 1e-8);
}

class Vertices : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        local_ = new std::vector<Behavior>(enumerate_vertices(ModelKind::FULLY_LOCAL));
        ns2_ = new std::vector<Behavior>(enumerate_vertices(ModelKind::NS2));
        s2_ = new std::vector<Behavior>(enumerate_vertices(ModelKind::S2));
    }
    static void TearDownTestSuite() {
        delete local_;
        delete ns2_;
        delete s2_;
    }
    static const std::vector<Behavior>& verts(ModelKind k) {
        return k == ModelKind::FULLY_LOCAL ? *local_ : k == ModelKind::NS2 ? *ns2_ : *s2_;
    }
    static std::vector<Behavior>* local_;
    static std::vector<Behavior>* ns2_;
    static std::vector<Behavior>* s2_;
};

std::vector<Behavior>* Vertices::local_ = nullptr;
std::vector<Behavior>* Vertices::ns2_ = nullptr;
std::vector<Behavior>* Vertices::s2_ = nullptr;

}  // namespace

TEST(Behavior, RejectsInvalidTables) {
    std::array<double, Behavior::kSize> p{};
    EXPECT_THROW(Behavior{p}, InvalidArgument);
    p.fill(1.0 / 8);
    EXPECT_NO_THROW(Behavior{p});
    p[0] = -0.1;
    p[1] += 0.1;
    EXPECT_THROW(Behavior{p}, InvalidArgument);
}

TEST(QuantumBehavior, Examples) {
    std::mt19937_64 rng(41);
    const Behavior u = quantum_behavior(DensityMatrix::maximally_mixed(8), random_scenario(rng));
    for (double v : u.data()) EXPECT_NEAR(v, 1.0 / 8, 1e-15);
    const Behavior z = quantum_behavior(DensityMatrix(StateVector::from_terms(8, {{0, 1.0}})), MeasurementScenario::all_z());
    for (int s = 0; s < 8; ++s) {
        EXPECT_NEAR(z(0, 0, 0, s >> 2, (s >> 1) & 1, s & 1), 1.0, 1e-15);
    }
}

TEST(QuantumBehavior, CorrelatorsMatchDirectTrace) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 20; ++i) {
        const DensityMatrix rho = testutil::random_density(rng, 8, 1 + i % 4);
        const MeasurementScenario sc = random_scenario(rng);
        const Behavior b = quantum_behavior(rho, sc);
        EXPECT_LE(b.signaling_defect(), 1e-10);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int z = 0; z < 2; ++z) {
                    EXPECT_NEAR(b.correlator({x, y, z}), correlator(rho, {sc.vector(0, x), sc.vector(1, y), sc.vector(2, z)}),
                                1e-12);
                    EXPECT_NEAR(b.correlator({x, -1, z}), correlator(rho, {sc.vector(0, x), std::nullopt, sc.vector(2, z)}),
                                1e-12);
                }
        for (const BellOperator* op : {&ns99_operator(), &svetlichny_operator()})
            EXPECT_NEAR(operator_value(b, *op), operator_value(rho, sc, *op), 1e-12);
    }
}

TEST(NsBipartite, CachedTableMatchesEnumeration) {
    const auto fresh = enumerate_ns_bipartite_vertices();
    const auto cached = ns_bipartite_vertices();
    ASSERT_EQ(fresh.size(), 24u);
    ASSERT_EQ(cached.size(), 24u);
    for (std::size_t i = 0; i < fresh.size(); ++i)
        for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(fresh[i][j], cached[i][j], 1e-12);
    int nonlocal = 0;
    for (const auto& v : cached) {
        bool deterministic = true;
        for (double x : v) deterministic = deterministic && (x == 0.0 || x == 1.0);
        nonlocal += deterministic ? 0 : 1;
    }
    EXPECT_EQ(nonlocal, 8);
}

TEST_F(Vertices, Counts) {
    EXPECT_EQ(verts(ModelKind::FULLY_LOCAL).size(), 64u);
    EXPECT_EQ(deterministic_signaling_boxes().size(), 256u);
    EXPECT_EQ(verts(ModelKind::NS2).size(), 160u);
    EXPECT_EQ(verts(ModelKind::S2).size(), 2944u);
}

TEST_F(Vertices, AreNormalizedAndRespectBounds) {
    for (ModelKind k : {ModelKind::FULLY_LOCAL, ModelKind::NS2, ModelKind::S2})
        for (const Behavior& v : verts(k)) {
            for (int s = 0; s < 8; ++s) {
                double sum = 0.0;
                for (int o = 0; o < 8; ++o) sum += v.data()[static_cast<std::size_t>(s * 8 + o)];
                EXPECT_EQ(sum, 1.0);
            }
            if (k != ModelKind::S2) EXPECT_LE(operator_value(v, ns99_operator()), 3.0 + 1e-12);
            EXPECT_LE(operator_value(v, svetlichny_operator()), 4.0 + 1e-12);
        }
    double best = 0.0;
    for (const Behavior& v : verts(ModelKind::FULLY_LOCAL)) best = std::max(best, operator_value(v, ns99_operator()));
    EXPECT_EQ(best, 3.0);
}

TEST_F(Vertices, UniformIsLocal) {
    std::array<double, Behavior::kSize> p;
    p.fill(1.0 / 8);
    const Behavior u(p);
    const Membership m = membership(u, verts(ModelKind::FULLY_LOCAL));
    EXPECT_EQ(m.status, MembershipStatus::Inside);
    expect_valid_decomposition(u, m, verts(ModelKind::FULLY_LOCAL));
}

TEST_F(Vertices, PrBoxIsNs2ButNotLocal) {
    const Behavior pr = pr_box_behavior();
    EXPECT_EQ(membership(pr, verts(ModelKind::FULLY_LOCAL)).status, MembershipStatus::Outside);
    const Membership m = membership(pr, verts(ModelKind::NS2));
    EXPECT_EQ(m.status, MembershipStatus::Inside);
    expect_valid_decomposition(pr, m, verts(ModelKind::NS2));
}

TEST_F(Vertices, GhzAtNs99OptimumIsOutsideNs2) {
    const DensityMatrix ghz(named_pure(NamedState::GHZ));
    const ViolationReport r = optimize_operator(ghz, ns99_operator());
    const Behavior b = quantum_behavior(ghz, r.scenario);
    EXPECT_NEAR(operator_value(b, ns99_operator()), r.value, 1e-10);
    EXPECT_EQ(membership(b, verts(ModelKind::FULLY_LOCAL)).status, MembershipStatus::Outside);
    EXPECT_EQ(membership(b, verts(ModelKind::NS2)).status, MembershipStatus::Outside);
}

TEST_F(Vertices, NestingAndFacetValidity) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Behavior pr = pr_box_behavior();
    int inside_ns2 = 0;
    for (int i = 0; i < 30; ++i) {
        const DensityMatrix rho = white_noise_mix(testutil::random_density(rng, 8, 1 + i % 3), 0.4 + 0.6 * u(rng));
        Behavior b = quantum_behavior(rho, random_scenario(rng));
        if (i % 3 == 0) b = mix(b, pr, u(rng));
        const Membership l = membership(b, verts(ModelKind::FULLY_LOCAL));
        const Membership n = membership(b, verts(ModelKind::NS2));
        const Membership s = membership(b, verts(ModelKind::S2));
        ASSERT_NE(l.status, MembershipStatus::NumericalFailure);
        ASSERT_NE(n.status, MembershipStatus::NumericalFailure);
        ASSERT_NE(s.status, MembershipStatus::NumericalFailure);
        if (l.status == MembershipStatus::Inside) EXPECT_EQ(n.status, MembershipStatus::Inside);
        if (n.status == MembershipStatus::Inside) {
            ++inside_ns2;
            EXPECT_EQ(s.status, MembershipStatus::Inside);
            EXPECT_LE(operator_value(b, ns99_operator()), 3.0 + 1e-7);
            expect_valid_decomposition(b, n, verts(ModelKind::NS2));
        }
        if (s.status == MembershipStatus::Inside) EXPECT_LE(operator_value(b, svetlichny_operator()), 4.0 + 1e-7);
    }
    EXPECT_GT(inside_ns2, 0);
}

TEST(ParseModel, Names) {
    EXPECT_EQ(parse_model("local"), ModelKind::FULLY_LOCAL);
    EXPECT_EQ(parse_model("ns2"), ModelKind::NS2);
    EXPECT_EQ(parse_model("s2"), ModelKind::S2);
    EXPECT_FALSE(parse_model("t2").has_value());
}

TEST(BehaviorText, RoundTrip) {
    std::mt19937_64 rng(44);
    const Behavior b = quantum_behavior(testutil::random_density(rng, 8), random_scenario(rng));
    const std::string text = write_behavior(b);
    EXPECT_EQ(text.rfind("# x y z a b c probability", 0), 0u);
    const Behavior back = read_behavior(text);
    for (std::size_t i = 0; i < Behavior::kSize; ++i) EXPECT_EQ(back.data()[i], b.data()[i]);
}

TEST(BehaviorText, RejectsIncompleteTables) {
    EXPECT_THROW(read_behavior("# x y z a b c probability\n0 0 0 0 0 0 1\n"), InvalidArgument);
    std::string dup = write_behavior(pr_box_behavior());
    dup += "0 0 0 0 0 0 0.5\n";
    EXPECT_THROW(read_behavior(dup), InvalidArgument);
}
