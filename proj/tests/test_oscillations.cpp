#include <gtest/gtest.h>

#include "oracles.hpp"
#include "syracuse/census.hpp"
#include "syracuse/oscillations.hpp"

using namespace syracuse;

namespace {

std::vector<Integer> ints(std::initializer_list<long> xs) { return {xs.begin(), xs.end()}; }

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

TEST(Decompose, NineteenIsOneOscillation) {
    const auto map = new_map(3, 5);
    const auto d = decompose(map, canonicalize(map, ints({19, 31, 49, 76, 38})));
    EXPECT_EQ(d.m, 1u);
    EXPECT_EQ(d.x, ints({19}));
    EXPECT_EQ(d.y, ints({76}));
    EXPECT_EQ(d.k, (std::vector<std::size_t>{3}));
    EXPECT_EQ(d.l, (std::vector<std::size_t>{2}));
}

TEST(Decompose, TwentyThreeIsTwoOscillations) {
    const auto map = new_map(3, 5);
    const auto d = decompose(map, canonicalize(map, ints({23, 37, 58, 29, 46})));
    EXPECT_EQ(d.m, 2u);
    EXPECT_EQ(d.x, ints({23, 29}));
    EXPECT_EQ(d.y, ints({58, 46}));
    EXPECT_EQ(d.k, (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(d.l, (std::vector<std::size_t>{1, 1}));
    EXPECT_EQ(d.K, 3u);
    EXPECT_EQ(d.L, 2u);
}

TEST(Decompose, TrivialCycleOneRiseTwoFalls) {
    const auto map = new_map(3, 5);
    const auto d = decompose(map, canonicalize(map, ints({1, 4, 2})));
    EXPECT_EQ(d.m, 1u);
    EXPECT_EQ(d.k[0], 1u);
    EXPECT_EQ(d.l[0], 2u);
}

TEST(RiseValue, ClosedForm) {
    EXPECT_EQ(rise_value(new_map(3, 5), 19, 3), Rational(76));
    EXPECT_EQ(rise_value(new_map(3, 1), 7, 0), Rational(7));
    // one step from odd x is (a x + b)/2
    for (long x = 1; x < 200; x += 2) EXPECT_EQ(rise_value(new_map(7, 9), x, 1), ratio(7 * x + 9, 2));
}

TEST(Decompose, RoundTripOverCensusCycles) {
    for (auto [a, b] : {std::pair{3L, 5L}, {5L, 3L}, {3L, 1L}, {7L, 9L}, {3L, -1L}, {5L, -1L}, {3L, 7L}}) {
        const auto map = new_map(a, b);
        Caps caps;
        caps.max_steps = 20000;
        const auto r = census(map, 3000, caps);
        for (const auto& [w, c] : r.cycles) {
            if (c.K == 0 || c.L == 0) continue;
            const auto d = decompose(map, c);
            EXPECT_EQ(d.K, c.K);
            EXPECT_EQ(d.L, c.L);
            EXPECT_EQ(canonical_form(reassemble(map, d)), c) << map.label() << " " << w;
            if (map.b() >= 1) {
                EXPECT_TRUE(oscillation_defect_check(map, d).holds()) << map.label() << " " << w;
            }
        }
    }
}

TEST(Decompose, Rejections) {
    EXPECT_EQ(code_of([] {
                  const auto m = new_map(1, 1);
                  decompose(m, canonicalize(m, ints({1})));
              }),
              ErrorCode::DegenerateA);
    EXPECT_EQ(code_of([] {
                  const auto m = new_map(3, -1);
                  decompose(m, canonicalize(m, ints({1})));
              }),
              ErrorCode::DegenerateCycle);
    EXPECT_EQ(code_of([] { decompose(new_map(3, 1), canonical_form(ints({1, 4, 2}))); }),
              ErrorCode::RelationViolation);
}

TEST(KCap, MatchesIndependentEvaluation) {
    for (std::size_t i = 0; i < oracle_data::kKCap.size(); ++i) {
        const long mu = static_cast<long>(i) + 2;
        EXPECT_EQ(k_cap_from_mu(mu), oracle_data::kKCap[i]) << "mu=" << mu;
    }
    EXPECT_EQ(code_of([] { k_cap_from_mu(Rational(19, 10)); }), ErrorCode::MuTooSmall);
}

TEST(CircuitSearch, NoneForThreeOne) {
    const auto r = one_oscillation_search(new_map(3, 1), 14);
    EXPECT_EQ(r.k_cap, 91u);
    EXPECT_TRUE(r.no_nontrivial_circuit());
    EXPECT_FALSE(r.assumptions.empty());
    EXPECT_EQ(to_json(r).at("verdict"), "NoNontrivialCircuit");
}

TEST(CircuitSearch, FindsTheKnownCircuitOfFiveThree) {
    // Omega(3) = {3, 9, 24, 12, 6} is a single oscillation with K = 2, L = 3.
    const auto r = one_oscillation_search(new_map(5, 3), 14);
    ASSERT_FALSE(r.candidates.empty());
    EXPECT_EQ(r.candidates.front().K, 2u);
    EXPECT_EQ(r.candidates.front().L, 3);
    EXPECT_EQ(r.candidates.front().x0, 3);
    EXPECT_TRUE(r.candidates.front().two_power_divides);
    for (const auto& c : r.candidates) {
        // every reported x0 starts a genuine circuit of K odd then L even steps
        const auto map = new_map(5, 3);
        Integer v = c.x0;
        for (unsigned long s = 0; s < c.K; ++s) {
            ASSERT_TRUE(is_odd(v));
            v = step(map, v);
        }
        for (long s = 0; s < c.L; ++s) {
            ASSERT_TRUE(is_even(v));
            v = step(map, v);
        }
        EXPECT_EQ(v, c.x0);
    }
}

TEST(CircuitSearch, WrongFamily) {
    EXPECT_EQ(code_of([] { one_oscillation_search(new_map(3, 5), 14); }), ErrorCode::WrongFamily);
}

TEST(CircuitSizeCondition, Examples) {
    EXPECT_TRUE(circuit_size_condition(5, 2));   // 31 ln2 = 21.5 <= 25
    EXPECT_FALSE(circuit_size_condition(6, 2));  // 63 ln2 = 43.7 > 36
}
