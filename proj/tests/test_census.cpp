#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "syracuse/census.hpp"
#include "syracuse/cycle.hpp"

using namespace syracuse;

namespace {

std::vector<Integer> ints(std::initializer_list<long> xs) { return {xs.begin(), xs.end()}; }

Integer from_i128(oracle_data::i128 v) {
    std::string s;
    do {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v > 0);
    return Integer(s);
}

} // namespace

TEST(DetectCycle, FindsTheTrivialCycleFromFour) {
    const auto r = detect_cycle(new_map(3, 5), 4);
    ASSERT_TRUE(r.resolution.converged);
    EXPECT_EQ(r.resolution.omega, 1);
    ASSERT_TRUE(r.cycle.has_value());
    EXPECT_EQ(r.cycle->elements, ints({1, 4, 2}));
}

TEST(DetectCycle, NineteenInThreeFive) {
    const auto r = detect_cycle(new_map(3, 5), 19);
    ASSERT_TRUE(r.cycle.has_value());
    EXPECT_EQ(r.cycle->elements, ints({19, 31, 49, 76, 38}));
    EXPECT_EQ(r.cycle->K, 3u);
    EXPECT_EQ(r.cycle->L, 2u);
    EXPECT_EQ(r.cycle->min_odd, 19);
    EXPECT_EQ(r.cycle->max, 76);
}

TEST(DetectCycle, CapsLeaveItUnresolved) {
    Caps caps;
    caps.max_value = 100;
    const auto r = detect_cycle(new_map(5, 3), 7, caps);
    EXPECT_FALSE(r.resolution.converged);
    EXPECT_EQ(r.resolution.reason, UnresolvedReason::ValueCap);
    caps = Caps{};
    caps.max_steps = 3;
    EXPECT_EQ(detect_cycle(new_map(3, -1), 17, caps).resolution.reason, UnresolvedReason::StepCap);
}

TEST(Canonicalize, RotatesToMinimum) {
    const auto m = new_map(3, -1);
    const auto c = canonicalize(m, ints({10, 5, 7}));
    EXPECT_EQ(c.elements, ints({5, 7, 10}));
    EXPECT_EQ(c.omega, 5);
    EXPECT_EQ(c.K, 2u);
    EXPECT_EQ(c.L, 1u);
}

TEST(Canonicalize, RejectsNonCycles) {
    const auto m = new_map(3, 1);
    try {
        canonicalize(m, ints({1, 3}));
        FAIL() << "accepted a non-cycle";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotACycle);
    }
    EXPECT_THROW(canonicalize(m, ints({1, 2, 1, 2})), Error);
    EXPECT_THROW(canonicalize(m, std::vector<Integer>{}), Error);
}

TEST(Canonicalize, IdempotentOnRotations) {
    const auto m = new_map(3, -1);
    std::vector<Integer> cyc;
    for (Integer v = 17;;) {
        cyc.push_back(v);
        v = step(m, v);
        if (v == 17) break;
    }
    const auto base = canonicalize(m, cyc);
    for (std::size_t r = 0; r < cyc.size(); ++r) {
        std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
        EXPECT_EQ(canonicalize(m, cyc), base);
    }
}

TEST(Census, ThreeMinusOne) {
    const auto r = census(new_map(3, -1), 100000);
    EXPECT_EQ(r.omegas(), ints({1, 5, 17}));
    EXPECT_EQ(r.cycles.at(1).length(), 1u);
    EXPECT_EQ(r.cycles.at(5).length(), 3u);
    EXPECT_EQ(r.cycles.at(17).length(), 11u);
    EXPECT_EQ(r.unresolved_count, 0u);
}

TEST(Census, BasinsPartitionTheRange) {
    for (auto [a, b] : {std::pair{3L, 1L}, {3L, 5L}, {5L, 3L}, {7L, 9L}, {9L, -7L}, {5L, -1L}}) {
        Caps caps;
        caps.max_steps = 5000;
        caps.max_value = pow2(80);
        const std::uint64_t N = 5000;
        const auto r = census(new_map(a, b), N, caps, {1, 777});
        std::uint64_t total = r.unresolved_count;
        for (const auto& [_, n] : r.basin_counts) total += n;
        EXPECT_EQ(total, N) << a << "," << b;
        std::uint64_t by_reason = 0;
        for (const auto& [_, n] : r.unresolved_by_reason) by_reason += n;
        EXPECT_EQ(by_reason, r.unresolved_count);
        for (const auto& [w, c] : r.cycles) {
            EXPECT_TRUE(verify_cycle(r.map, c.elements));
            EXPECT_EQ(c.omega, w);
        }
    }
}

TEST(Census, AgreesWithBruteForceWalk) {
    // Maps whose orbits all settle quickly, so every n is classified.
    for (auto [a, b] : {std::pair{3L, 1L}, {3L, 5L}, {3L, -1L}, {3L, 7L}, {1L, 5L}, {3L, 11L}}) {
        const auto map = new_map(a, b);
        const std::uint64_t N = 3000;
        const auto r = census(map, N, {}, {1, 512});
        ASSERT_EQ(r.unresolved_count, 0u) << a << "," << b;
        std::map<Integer, std::uint64_t> expect;
        for (std::uint64_t n = 1; n <= N; ++n) {
            const auto w = oracle_data::brute_cycle_min(a, b, n);
            ASSERT_TRUE(w.has_value());
            ++expect[from_i128(*w)];
        }
        EXPECT_EQ(r.basin_counts, expect) << a << "," << b;
    }
}

TEST(Census, RandomizedAgreementAndDeterminism) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 12; ++t) {
        const long a = 2 * std::uniform_int_distribution<long>(0, 2)(rng) + 1;
        long b = 2 * std::uniform_int_distribution<long>(-8, 20)(rng) + 1;
        if (a + b <= 0) b = 1;
        const auto map = new_map(a, b);
        Caps caps;
        caps.max_steps = 20000;
        caps.max_value = pow2(100);
        const std::uint64_t N = std::uniform_int_distribution<std::uint64_t>(100, 4000)(rng);
        const auto one = census(map, N, caps, {1, 333});
        const auto many = census(map, N, caps, {4, 97});
        EXPECT_EQ(render_json(one), render_json(many)) << map.label();
        for (std::uint64_t n = 1; n <= N; n += 37) {
            const auto w = oracle_data::brute_cycle_min(a, b, n, 20000);
            const auto d = detect_cycle(map, n, caps);
            if (w && d.resolution.converged) {
                EXPECT_EQ(d.resolution.omega, from_i128(*w));
            }
        }
    }
}

TEST(Census, SevenCyclesForFiveThree) {
    const auto r = census(new_map(5, 3), 4000);
    for (long w : {1, 3, 39, 43, 51, 53, 61})
        EXPECT_TRUE(r.cycles.count(w)) << w;
    EXPECT_GT(r.unresolved_count, 0u);
}

TEST(Census, RenderingIsStable) {
    const auto r = census(new_map(3, 5), 1000);
    const auto csv = render_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega,length,K,L,basin_count");
    const auto j = nlohmann::json::parse(render_json(r));
    EXPECT_EQ(j.at("N"), 1000);
    EXPECT_EQ(j.at("map").at("a"), 3);
    EXPECT_EQ(j.at("cycles").size(), r.cycles.size());
    const auto back = cycle_from_json(j.at("cycles").at(0));
    EXPECT_EQ(back, r.cycles.begin()->second);
}

TEST(ShardRanges, TileTheRange) {
    const auto rs = shard_ranges(10, 3);
    ASSERT_EQ(rs.size(), 4u);
    EXPECT_EQ(rs.front(), (std::pair<std::uint64_t, std::uint64_t>{1, 3}));
    EXPECT_EQ(rs.back(), (std::pair<std::uint64_t, std::uint64_t>{10, 10}));
    EXPECT_THROW(shard_ranges(10, 0), Error);
}
