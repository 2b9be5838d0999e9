#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "clusterepi/degree_models.hpp"

using namespace clusterepi;

namespace {

constexpr Count kSupport = 80;  // truncation for brute-force sums over Poisson families

struct BruteMoments {
    double mass = 0, mean_s = 0, mean_t = 0, ex2_s = 0, ex2_t = 0, cross = 0;
};

BruteMoments brute_moments(const JointDegreeModel& m) {
    BruteMoments b;
    for (Count s = 0; s < kSupport; ++s)
        for (Count t = 0; t < kSupport; ++t) {
            const double q = m.pmf(s, t);
            b.mass += q;
            b.mean_s += q * s;
            b.mean_t += q * t;
            b.ex2_s += q * s * s;
            b.ex2_t += q * t * t;
            b.cross += q * s * t;
        }
    return b;
}

// Series form of the three generating-function sums.
PgfTerms brute_pgf(const JointDegreeModel& m, double a, double b) {
    const auto mom = brute_moments(m);
    double g = 0, e = 0, tr = 0;
    for (Count s = 0; s < kSupport; ++s)
        for (Count t = 0; t < kSupport; ++t) {
            const double q = m.pmf(s, t);
            if (q == 0.0) continue;
            g += q * std::pow(a, s) * std::pow(b, t);
            if (s > 0) e += s * q * std::pow(a, s - 1.0) * std::pow(b, t);
            if (t > 0) tr += t * q * std::pow(a, s) * std::pow(b, t - 1.0);
        }
    return {g, mom.mean_s > 0 ? e / mom.mean_s : 1.0, mom.mean_t > 0 ? tr / mom.mean_t : 1.0};
}

Table random_table(std::mt19937_64& rng) {
    std::uniform_int_distribution<Count> cnt(0, 6);
    std::uniform_real_distribution<double> w(0.01, 1.0);
    Table t;
    std::set<std::pair<Count, Count>> used;
    double total = 0;
    for (int k = 0; k < 8; ++k) {
        const Count s = cnt(rng), tt = cnt(rng);
        if (!used.emplace(s, tt).second) continue;
        t.rows.push_back({s, tt, w(rng)});
        total += t.rows.back().p;
    }
    for (auto& r : t.rows) r.p /= total;
    return t;
}

}  // namespace

TEST(Pmf, DoublyPoissonOrigin) {
    JointDegreeModel m(DoublyPoisson{1.0, 1.0});
    EXPECT_NEAR(m.pmf(0, 0), std::exp(-2.0), 1e-15);
    EXPECT_NEAR(m.pmf(0, 0), 0.13534, 1e-5);
}

TEST(Pmf, DegeneratePoissonIsPointMass) {
    JointDegreeModel m(DoublyPoisson{0.0, 0.0});
    EXPECT_EQ(m.pmf(0, 0), 1.0);
    EXPECT_EQ(m.pmf(1, 0), 0.0);
}

TEST(Pmf, ClusterTunableOddSingleEdgesImpossible) {
    JointDegreeModel m(ClusterTunable{1.0, 2.0});
    EXPECT_EQ(m.pmf(1, 0), 0.0);
    EXPECT_GT(m.pmf(2, 0), 0.0);
}

TEST(Pmf, SumsToOneOverSupport) {
    for (const auto& m : {JointDegreeModel(DoublyPoisson{2.0, 3.0}),
                          JointDegreeModel(ClusterTunable{1.5, 1.0})}) {
        EXPECT_NEAR(brute_moments(m).mass, 1.0, 1e-12);
    }
}

TEST(Moments, DoublyPoissonFactorialMoments) {
    const auto m = JointDegreeModel(DoublyPoisson{2.0, 3.0}).moments();
    EXPECT_DOUBLE_EQ(m.mean_s, 2.0);
    EXPECT_DOUBLE_EQ(m.ex2_s - m.mean_s, 4.0);
    EXPECT_DOUBLE_EQ(m.cross, 6.0);
    EXPECT_DOUBLE_EQ(m.ex2_t - m.mean_t, 9.0);
}

TEST(Moments, PointMassTable) {
    const auto m = JointDegreeModel(Table{{{2, 1, 1.0}}}).moments();
    EXPECT_DOUBLE_EQ(m.mean_s, 2.0);
    EXPECT_DOUBLE_EQ(m.mean_t, 1.0);
    EXPECT_DOUBLE_EQ(m.cross, 2.0);
}

TEST(Moments, ClusterTunableDegreeMeanAndVarianceIndependentOfC) {
    const double lambda = 1.3;
    for (double c = 0.0; c <= 4.0; c += 0.25) {
        const JointDegreeModel model(ClusterTunable{lambda, c});
        const auto m = model.moments();
        const double mean_deg = m.mean_s + 2.0 * m.mean_t;
        const double var_deg = (m.ex2_s - m.mean_s * m.mean_s) +
                               4.0 * (m.ex2_t - m.mean_t * m.mean_t) +
                               4.0 * (m.cross - m.mean_s * m.mean_t);
        EXPECT_NEAR(mean_deg, 4.0 * lambda, 1e-12) << "c=" << c;
        EXPECT_NEAR(var_deg, 8.0 * lambda, 1e-12) << "c=" << c;

        const auto b = brute_moments(model);
        EXPECT_NEAR(b.mean_s, m.mean_s, 1e-10);
        EXPECT_NEAR(b.ex2_s, m.ex2_s, 1e-9);
        EXPECT_NEAR(b.mean_t, m.mean_t, 1e-10);
        EXPECT_NEAR(b.ex2_t, m.ex2_t, 1e-9);
        EXPECT_NEAR(b.cross, m.cross, 1e-9);
    }
}

TEST(Moments, TableMatchesWeightedSums) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const Table t = random_table(rng);
        const auto m = JointDegreeModel(t).moments();
        const auto b = brute_moments(JointDegreeModel(t));
        EXPECT_NEAR(m.mean_s, b.mean_s, 1e-12);
        EXPECT_NEAR(m.mean_t, b.mean_t, 1e-12);
        EXPECT_NEAR(m.ex2_s, b.ex2_s, 1e-12);
        EXPECT_NEAR(m.ex2_t, b.ex2_t, 1e-12);
        EXPECT_NEAR(m.cross, b.cross, 1e-12);
        // Jensen and Cauchy-Schwarz
        EXPECT_GE(m.ex2_s + 1e-12, m.mean_s * m.mean_s);
        EXPECT_GE(m.ex2_t + 1e-12, m.mean_t * m.mean_t);
        EXPECT_LE(m.cross * m.cross, m.ex2_s * m.ex2_t + 1e-12);
    }
}

TEST(Sample, PointMassAlwaysReturned) {
    JointDegreeModel m(Table{{{0, 1, 1.0}}});
    std::mt19937_64 rng(1);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(m.sample(rng), (DegreePair{0, 1}));
}

TEST(Sample, ZeroRateTriangles) {
    JointDegreeModel m(DoublyPoisson{5.0, 0.0});
    std::mt19937_64 rng(2);
    for (int k = 0; k < 1000; ++k) EXPECT_EQ(m.sample(rng).t, 0u);
}

TEST(Sample, ClusterTunableSingleEdgesEven) {
    JointDegreeModel m(ClusterTunable{2.0, 1.0});
    std::mt19937_64 rng(3);
    for (int k = 0; k < 1000; ++k) EXPECT_EQ(m.sample(rng).s % 2, 0u);
}

TEST(Sample, LawOfLargeNumbers) {
    JointDegreeModel m(DoublyPoisson{1.0, 1.0});
    std::mt19937_64 rng(4);
    double acc = 0;
    const int draws = 1'000'000;
    for (int k = 0; k < draws; ++k) acc += m.sample(rng).s;
    EXPECT_NEAR(acc / draws, 1.0, 0.01);
}

TEST(Sample, TableFrequencies) {
    JointDegreeModel m(Table{{{0, 0, 0.2}, {3, 1, 0.5}, {1, 2, 0.3}}});
    std::mt19937_64 rng(5);
    int hits = 0;
    const int draws = 200'000;
    for (int k = 0; k < draws; ++k) hits += (m.sample(rng) == DegreePair{3, 1});
    EXPECT_NEAR(static_cast<double>(hits) / draws, 0.5, 0.005);
}

TEST(PgfTerms, NormalizedAtOne) {
    std::mt19937_64 rng(8);
    for (const auto& m : {JointDegreeModel(DoublyPoisson{1.0, 2.0}),
                          JointDegreeModel(ClusterTunable{1.0, 3.0}),
                          JointDegreeModel(random_table(rng))}) {
        const auto p = m.pgf_terms(1.0, 1.0);
        EXPECT_NEAR(p.G, 1.0, 1e-12);
        EXPECT_NEAR(p.edge, 1.0, 1e-12);
        EXPECT_NEAR(p.tri, 1.0, 1e-12);
    }
}

TEST(PgfTerms, DoublyPoissonAtZero) {
    EXPECT_NEAR(JointDegreeModel(DoublyPoisson{1.0, 1.0}).pgf_terms(0.0, 0.0).G, std::exp(-2.0), 1e-15);
}

TEST(PgfTerms, IsolatedNodes) {
    JointDegreeModel m(Table{{{0, 0, 1.0}}});
    for (double a : {0.0, 0.3, 1.0}) {
        const auto p = m.pgf_terms(a, 0.5);
        EXPECT_EQ(p.G, 1.0);
        EXPECT_EQ(p.edge, 1.0);
        EXPECT_EQ(p.tri, 1.0);
    }
}

TEST(PgfTerms, ZeroMeanSizeBiasedTermIsOne) {
    const auto p = JointDegreeModel(DoublyPoisson{2.0, 0.0}).pgf_terms(0.3, 0.4);
    EXPECT_EQ(p.tri, 1.0);
    EXPECT_LT(p.edge, 1.0);
}

TEST(PgfTerms, ClosedFormsMatchSeries) {
    for (const auto& m : {JointDegreeModel(DoublyPoisson{1.7, 0.6}),
                          JointDegreeModel(ClusterTunable{1.2, 0.01}),
                          JointDegreeModel(ClusterTunable{1.2, 2.0}),
                          JointDegreeModel(ClusterTunable{1.2, 3.99})}) {
        for (double a : {0.0, 0.25, 0.6, 0.95})
            for (double b : {0.0, 0.4, 0.8, 1.0}) {
                const auto got = m.pgf_terms(a, b);
                const auto want = brute_pgf(m, a, b);
                EXPECT_NEAR(got.G, want.G, 1e-10);
                EXPECT_NEAR(got.edge, want.edge, 1e-10);
                EXPECT_NEAR(got.tri, want.tri, 1e-10);
            }
    }
}

TEST(PgfTerms, MonotoneOnGrid) {
    std::mt19937_64 rng(9);
    for (const auto& m : {JointDegreeModel(DoublyPoisson{1.0, 2.0}),
                          JointDegreeModel(ClusterTunable{0.7, 1.5}),
                          JointDegreeModel(random_table(rng))}) {
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const double a = i / 10.0, b = j / 10.0;
                const auto base = m.pgf_terms(a, b);
                const auto up_a = m.pgf_terms(a + 0.1, b);
                const auto up_b = m.pgf_terms(a, b + 0.1);
                for (const auto& up : {up_a, up_b}) {
                    EXPECT_LE(base.G, up.G + 1e-15);
                    EXPECT_LE(base.edge, up.edge + 1e-15);
                    EXPECT_LE(base.tri, up.tri + 1e-15);
                }
                EXPECT_GE(base.G, 0.0);
                EXPECT_LE(base.G, 1.0);
            }
    }
}

TEST(PgfTerms, RejectsOutOfRange) {
    JointDegreeModel m(DoublyPoisson{1.0, 1.0});
    EXPECT_THROW(m.pgf_terms(-0.1, 0.5), std::domain_error);
    EXPECT_THROW(m.pgf_terms(0.5, 1.1), std::domain_error);
    EXPECT_THROW(m.pgf_terms(std::nan(""), 0.5), std::domain_error);
}

TEST(Validation, RejectsInvalidModels) {
    EXPECT_THROW(JointDegreeModel(DoublyPoisson{-1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(JointDegreeModel(ClusterTunable{1.0, 4.5}), std::invalid_argument);
    EXPECT_THROW(JointDegreeModel(ClusterTunable{0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(JointDegreeModel(Table{{{1, 1, 0.5}, {1, 1, 0.5}}}), std::invalid_argument);
    EXPECT_THROW(JointDegreeModel(Table{{{1, 1, 0.5}, {2, 1, 0.4}}}), std::invalid_argument);
    EXPECT_THROW(JointDegreeModel(Table{{{1, 1, 1.5}, {2, 1, -0.5}}}), std::invalid_argument);
    EXPECT_THROW(JointDegreeModel(Table{}), std::invalid_argument);
}

TEST(TableCsv, ParsesAndRenormalizes) {
    std::istringstream in("s,t,p\n0,1,0.25\n2,0,0.7500000001\n");
    const Table t = parse_table_csv(in);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1].s, 2u);
    EXPECT_NEAR(t.rows[0].p + t.rows[1].p, 1.0, 1e-15);
    EXPECT_NO_THROW(JointDegreeModel{t});
}

TEST(TableCsv, RejectsBadMassAndHeader) {
    std::istringstream bad_mass("s,t,p\n0,1,0.5\n1,0,0.49\n");
    EXPECT_THROW(parse_table_csv(bad_mass), std::invalid_argument);
    std::istringstream bad_header("a,b,c\n0,1,1\n");
    EXPECT_THROW(parse_table_csv(bad_header), std::invalid_argument);
    std::istringstream bad_value("s,t,p\n0,x,1\n");
    EXPECT_THROW(parse_table_csv(bad_value), std::invalid_argument);
    std::istringstream negative("s,t,p\n-1,0,1\n");
    EXPECT_THROW(parse_table_csv(negative), std::invalid_argument);
}
