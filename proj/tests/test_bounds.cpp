#include <gtest/gtest.h>

#include "oracles.hpp"
#include "syracuse/bounds.hpp"
#include "syracuse/census.hpp"

using namespace syracuse;

namespace {

const Integer kN0 = Integer(5) * pow2(60);

bool encloses(const Interval& e, const char* decimal) {
    const Rational v = parse_rational(decimal);
    const Rational slack(1, Integer("1" + std::string(38, '0')));
    return e.lo <= v + slack && v - slack <= e.hi;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::BadArgument;
}

} // namespace

TEST(Constants, EnclosuresContainTheOracle) {
    const auto c0 = c0_enclosure(new_map(3, 1), Rational(1, 100000));
    EXPECT_TRUE(encloses(c0, oracle_data::k3Ln2));
    EXPECT_LE(c0.width(), Rational(1, 100000));
    const auto c53 = c0_enclosure(new_map(5, 3));
    EXPECT_TRUE(encloses(c53, oracle_data::k5Ln2Over3));
    EXPECT_LE(c53.width(), Rational(1, 1000000));
    const auto c1 = c1_enclosure(new_map(3, 1), Rational(1, Integer("1000000000000")));
    EXPECT_TRUE(encloses(c1, "0.6931471805599453094172321214581765680755"));
}

TEST(Constants, Rejections) {
    EXPECT_EQ(code_of([] { c0_enclosure(new_map(3, -1)); }), ErrorCode::NonPositiveB);
    EXPECT_EQ(code_of([] { c1_enclosure(new_map(1, 1)); }), ErrorCode::DegenerateA);
}

TEST(DefectCheck, NineteenInThreeFive) {
    const auto map = new_map(3, 5);
    const auto c = canonicalize(map, std::vector<Integer>{19, 31, 49, 76, 38});
    const auto d = defect_check(map, c);
    EXPECT_TRUE(d.holds());
    // 5 - 3 log2 3 = 0.2451...
    EXPECT_TRUE(d.defect.lo > Rational(245, 1000) && d.defect.hi < Rational(246, 1000));
}

TEST(DefectCheck, HoldsForEveryCensusCycle) {
    for (auto [a, b] : {std::pair{3L, 1L}, {3L, 5L}, {5L, 3L}, {7L, 9L}, {3L, 7L}, {5L, 11L}}) {
        const auto map = new_map(a, b);
        Caps caps;
        caps.max_steps = 20000;
        const auto r = census(map, 3000, caps);
        for (const auto& [w, c] : r.cycles) {
            if (c.K == 0) continue;
            EXPECT_TRUE(defect_check(map, c).holds()) << map.label() << " " << w;
            for (const auto& row : bound_consistency(map, c, 10))
                EXPECT_TRUE(row.length_ok && row.odd_ok) << map.label() << " " << w << " n=" << row.n;
        }
    }
}

TEST(LengthBound, RowsMatchIndependentEvaluation) {
    const auto cert = min_length_bound(new_map(3, 1), kN0, 25);
    ASSERT_EQ(cert.rows.size(), 25u);
    for (std::size_t i = 0; i < 25; ++i) {
        EXPECT_EQ(cert.rows[i].n, i + 1);
        EXPECT_EQ(cert.rows[i].bound, Integer(oracle_data::kRowsC0[i])) << "n=" << i + 1;
        EXPECT_TRUE(cert.rows[i].exact_floor);
    }
    EXPECT_EQ(cert.bound, Integer("938251748"));
    EXPECT_EQ(cert.n, 20u);
    EXPECT_EQ(cert.constant_name, "c0");
}

TEST(OscillationBound, RowsMatchIndependentEvaluation) {
    const auto cert = oscillation_bound(new_map(3, 1), kN0, 25);
    ASSERT_EQ(cert.rows.size(), 25u);
    for (std::size_t i = 0; i < 25; ++i)
        EXPECT_EQ(cert.rows[i].bound, Integer(oracle_data::kRowsC1[i])) << "n=" << i + 1;
    EXPECT_EQ(cert.constant_name, "c1");
    EXPECT_EQ(cert.bound, Integer("397573379"));
}

TEST(MuBound, RowsMatchIndependentEvaluation) {
    const auto cert = mu_length_bound(new_map(3, 1), kN0, 14, 25);
    ASSERT_EQ(cert.rows.size(), 25u);
    for (std::size_t i = 0; i < 25; ++i) EXPECT_EQ(cert.rows[i].bound, oracle_data::kRowsMu14[i]) << "n=" << i + 1;
    EXPECT_EQ(cert.bound, 12);
    EXPECT_TRUE(verify_certificate(cert).accepted);
    EXPECT_FALSE(cert.assumptions.empty());
}

// Every row floors to 0 when N0 = 1; only the trivial #Omega >= 1 survives, and it is not part of the bound.
TEST(LengthBound, SmallestFloorGivesZero) {
    EXPECT_EQ(min_length_bound(new_map(3, 1), 1, 25).bound, 0);
}

TEST(LengthBound, MonotoneInFloor) {
    const auto map = new_map(3, 1);
    Integer last = 0;
    for (unsigned e = 0; e <= 90; e += 6) {
        const auto cert = min_length_bound(map, pow2(e), 30);
        EXPECT_GE(cert.bound, last) << e;
        last = cert.bound;
    }
}

TEST(Certificate, RoundTripsAndVerifies) {
    const auto cert = min_length_bound(new_map(5, 3), kN0, 20, FloorKind::MinOmegaOdd);
    const auto j = to_json(cert);
    const auto back = certificate_from_json(j);
    EXPECT_EQ(to_json(back), j);
    const auto check = verify_certificate(back);
    EXPECT_TRUE(check.accepted) << (check.problems.empty() ? "" : check.problems.front());
}

TEST(Certificate, TamperingIsDetected) {
    const auto cert = min_length_bound(new_map(3, 1), kN0, 22);
    ASSERT_TRUE(verify_certificate(cert).accepted);

    auto inflated = cert;
    inflated.rows[19].second_term += 1;
    inflated.rows[19].bound += 1;
    inflated.bound += 1;
    EXPECT_FALSE(verify_certificate(inflated).accepted);

    auto wrong_constant = cert;
    wrong_constant.constant = Interval(Rational(21, 10), Rational(22, 10));
    EXPECT_FALSE(verify_certificate(wrong_constant).accepted);

    auto wrong_q = cert;
    wrong_q.rows[3].q_n += 1;
    EXPECT_FALSE(verify_certificate(wrong_q).accepted);

    auto wrong_witness = cert;
    wrong_witness.n = 3;
    EXPECT_FALSE(verify_certificate(wrong_witness).accepted);
}

TEST(Bounds, Rejections) {
    EXPECT_EQ(code_of([] { mu_length_bound(new_map(3, 1), kN0, Rational(3, 2), 5); }), ErrorCode::MuTooSmall);
    EXPECT_EQ(code_of([] { min_length_bound(new_map(3, -1), kN0, 5); }), ErrorCode::NonPositiveB);
    EXPECT_EQ(code_of([] { oscillation_bound(new_map(1, 3), kN0, 5); }), ErrorCode::DegenerateA);
    EXPECT_EQ(code_of([] { min_length_bound(new_map(3, 1), 0, 5); }), ErrorCode::BadArgument);
    EXPECT_EQ(default_mu(3), Rational(14));
    EXPECT_FALSE(default_mu(5).has_value());
}
