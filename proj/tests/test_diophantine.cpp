#include <gtest/gtest.h>

#include "oracles.hpp"
#include "syracuse/diophantine.hpp"

using namespace syracuse;

TEST(PartialQuotients, MatchFrozenValues) {
    for (const auto& [a, expect] : oracle_data::kPartialQuotients) {
        const auto got = partial_quotients(Integer(a), expect.size());
        ASSERT_EQ(got.size(), expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(got[i], expect[i]) << "a=" << a << " i=" << i;
    }
}

TEST(PartialQuotients, DirectAgreesWithEnclosure) {
    // Exact powers stay cheap while q_12 is below about 5e5.
    for (long a : {3, 5, 9, 11, 15, 33, 65, 127}) {
        EXPECT_EQ(partial_quotients_direct(a, 12), partial_quotients_enclosure(a, 12)) << a;
    }
}

TEST(PartialQuotients, RejectsBadBases) {
    EXPECT_THROW(partial_quotients(1, 5), Error);
    EXPECT_THROW(partial_quotients(4, 5), Error);
}

TEST(Convergents, DenominatorsForThree) {
    const auto cs = convergents(3, oracle_data::kQ3.size());
    for (std::size_t n = 0; n < cs.size(); ++n) {
        EXPECT_EQ(cs[n].index, n);
        EXPECT_EQ(cs[n].q, Integer(oracle_data::kQ3[n])) << n;
    }
    EXPECT_EQ(cs[4].p, 19);
    EXPECT_EQ(cs[19].q, Integer("397573379"));
    EXPECT_EQ(cs[20].q, Integer("6189245291"));
}

TEST(Convergents, DeterminantAndAlternation) {
    for (long a : {3, 5, 7, 9, 33}) {
        const auto cs = convergents(a, 30);
        for (std::size_t n = 1; n < cs.size(); ++n) {
            const Integer det = cs[n].p * cs[n - 1].q - cs[n - 1].p * cs[n].q;
            EXPECT_EQ(det, (n % 2 == 1) ? 1 : -1) << a << " " << n;
            EXPECT_EQ(compare_pow2_apow(cs[n].p, cs[n].q, a), (n % 2 == 0) ? -1 : 1);
        }
    }
}

TEST(ComparePow2, Examples) {
    EXPECT_EQ(compare_pow2_apow(3, 2, 3), -1);  // 8 < 9
    EXPECT_EQ(compare_pow2_apow(8, 5, 3), 1);   // 256 > 243
    EXPECT_EQ(compare_pow2_apow(19, 12, 3), -1);
}

TEST(XiEnclosure, TwelveBudget) {
    const auto e = xi_enclosure(3, 12);
    EXPECT_EQ(e.lower, Rational(19, 12));
    EXPECT_EQ(e.upper, Rational(8, 5));
    EXPECT_EQ(e.width, Rational(1, 60));
    EXPECT_THROW(xi_enclosure(3, 0), Error);
}

TEST(XiEnclosure, TightensWithBudget) {
    Rational last = 10;
    for (long budget : {2, 5, 12, 41, 53, 306, 665, 15601}) {
        const auto e = xi_enclosure(3, budget);
        EXPECT_LE(e.width, last);
        last = e.width;
        EXPECT_LT(compare_pow2_apow(e.lower.get_num(), e.lower.get_den(), 3), 0);
        EXPECT_GT(compare_pow2_apow(e.upper.get_num(), e.upper.get_den(), 3), 0);
    }
}

// Records of min_p |q xi - p| over q = 1..Q occur exactly at convergent denominators.
TEST(BestApproximation, RecordsAreConvergents) {
    const Integer a = 3;
    const long Q = 10000;
    struct Best {
        Integer p;
        long q;
        int side;  // sign of q xi - p
    };
    auto nearest = [&](long q) {
        const Integer f = floor_xi_multiple(a, q);
        // q xi - f - 1/2 decides which neighbour is closer
        const bool up = sign_linear_form(Rational(-f) - Rational(1, 2), Rational(q), a) > 0;
        const Integer p = up ? Integer(f + 1) : f;
        return Best{p, q, up ? -1 : 1};
    };
    auto closer = [&](const Best& x, const Best& y) {
        // |x| < |y| as side_y (q_y xi - p_y) - side_x (q_x xi - p_x) > 0
        const Rational A(-y.side * y.p + x.side * x.p);
        const Rational B(y.side * y.q - x.side * x.q);
        return sign_linear_form(A, B, a) > 0;
    };
    std::vector<long> records;
    Best best = nearest(1);
    records.push_back(1);
    for (long q = 2; q <= Q; ++q) {
        const Best cand = nearest(q);
        if (closer(cand, best)) {
            best = cand;
            records.push_back(q);
        }
    }
    std::vector<long> expect;
    for (const auto& c : convergents(a, 12))
        if (c.q <= Q && (expect.empty() || expect.back() != c.q.get_si())) expect.push_back(c.q.get_si());
    EXPECT_EQ(records, expect);
}

TEST(BestApproxGap, CertifiedForEarlyIndices) {
    for (long a : {3, 5, 7}) {
        for (std::size_t n = 0; n <= 15; ++n) {
            const auto g = best_approx_gap(a, n);
            EXPECT_TRUE(g.certified) << a << " " << n;
            EXPECT_EQ(g.side, (n % 2 == 0) ? -1 : 1);
            EXPECT_EQ(g.gap, Rational(1) / Rational(g.q_n + g.q_next));
        }
    }
}

TEST(ConvergentsPast, StopsAfterLimit) {
    const auto cs = convergents_past(3, 100);
    EXPECT_EQ(cs.back().q, 306);
    EXPECT_EQ(cs[cs.size() - 2].q, 53);
}
