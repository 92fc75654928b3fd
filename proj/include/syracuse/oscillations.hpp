#pragma once

// m-oscillation structure of cycles and the one-oscillation exclusion search
// for the b = a - 2 family.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "syracuse/bounds.hpp"
#include "syracuse/cycle.hpp"
#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/interval.hpp"
#include "syracuse/map.hpp"

namespace syracuse {

/// A cycle as m rises (k_i odd elements starting at x_i, ending in the even
/// y_i) and m falls (l_i even elements, y_i = 2^l_i x_{i+1}).
struct OscillationDecomposition {
    std::size_t m = 0;
    std::vector<Integer> x;
    std::vector<Integer> y;
    std::vector<std::size_t> k;
    std::vector<std::size_t> l;
    std::size_t K = 0;
    std::size_t L = 0;
    Integer omega;
};

/// y = (a/2)^k x + (b/(a-2)) ((a/2)^k - 1), in exact rationals.
inline Rational rise_value(const MapParams& map, const Integer& x, std::size_t k) {
    const Rational half_a = ratio(map.a(), 2);
    Rational power = 1;
    for (std::size_t i = 0; i < k; ++i) power *= half_a;
    return power * Rational(x) + ratio(map.b(), map.a() - 2) * (power - 1);
}

inline OscillationDecomposition decompose(const MapParams& map, const Cycle& cycle) {
    if (map.a() < 3) throw Error(ErrorCode::DegenerateA, "odd steps only rise for a >= 3");
    if (cycle.K == 0 || cycle.L == 0)
        throw Error(ErrorCode::DegenerateCycle, "a decomposition needs both odd and even elements");
    const auto& e = cycle.elements;
    const std::size_t len = e.size();
    std::size_t start = 0;
    while (!(is_odd(e[start]) && is_even(e[(start + len - 1) % len]))) ++start;

    OscillationDecomposition d;
    d.omega = cycle.omega;
    std::size_t i = start, visited = 0;
    while (visited < len) {
        d.x.push_back(e[i % len]);
        std::size_t rise = 0, fall = 0;
        while (visited < len && is_odd(e[i % len])) ++rise, ++i, ++visited;
        d.y.push_back(e[i % len]);
        while (visited < len && is_even(e[i % len])) ++fall, ++i, ++visited;
        d.k.push_back(rise);
        d.l.push_back(fall);
    }
    d.m = d.x.size();
    for (std::size_t j = 0; j < d.m; ++j) {
        d.K += d.k[j];
        d.L += d.l[j];
        const Integer& next_x = d.x[(j + 1) % d.m];
        if (rise_value(map, d.x[j], d.k[j]) != Rational(d.y[j]) || d.y[j] != next_x * pow2(d.l[j]))
            throw Error(ErrorCode::RelationViolation, "rise relation fails at oscillation " + std::to_string(j));
    }
    return d;
}

/// Rebuilds the cycle from x_0 by k_i odd steps then l_i halvings.
inline std::vector<Integer> reassemble(const MapParams& map, const OscillationDecomposition& d) {
    std::vector<Integer> out;
    Integer v = d.x.empty() ? Integer(0) : d.x.front();
    for (std::size_t j = 0; j < d.m; ++j) {
        for (std::size_t s = 0; s < d.k[j]; ++s) {
            if (!is_odd(v)) throw Error(ErrorCode::RelationViolation, "expected an odd element in a rise");
            out.push_back(v);
            v = step(map, v);
        }
        for (std::size_t s = 0; s < d.l[j]; ++s) {
            if (!is_even(v)) throw Error(ErrorCode::RelationViolation, "expected an even element in a fall");
            out.push_back(v);
            v = step(map, v);
        }
    }
    return out;
}

struct OscillationDefectCheck {
    Interval defect;      // (K+L) - K xi
    Interval rhs_sum;     // b/((a-2) ln2) * sum 1/x_i
    Interval rhs_coarse;  // m b/((a-2) ln2 min(Omega))
    bool positive = false;
    bool sum_holds = false;
    bool coarse_holds = false;

    bool holds() const { return positive && sum_holds && coarse_holds; }
};

inline OscillationDefectCheck oscillation_defect_check(const MapParams& map, const OscillationDecomposition& d) {
    detail::require_b_positive(map);
    if (map.a() < 3) throw Error(ErrorCode::DegenerateA, "needs a >= 3");
    Rational inverse_sum = 0;
    for (const auto& x : d.x) inverse_sum += ratio(1, x);
    const Rational scale = ratio(map.b(), map.a() - 2);
    const Rational sum_factor = scale * inverse_sum;
    const Rational coarse_factor = scale * ratio(Integer(static_cast<unsigned long>(d.m)), d.omega);
    const unsigned magnitude = static_cast<unsigned>(bit_length(Integer(static_cast<unsigned long>(d.K + d.L))));
    const unsigned cap = kRefinementCapBits + magnitude;
    OscillationDefectCheck c;
    for (unsigned bits = 64;; bits *= 2) {
        const unsigned b = std::min(bits, cap);
        c.defect = Rational(static_cast<unsigned long>(d.K + d.L)) -
                   log2_enclosure(map.a(), b + magnitude) * Rational(static_cast<unsigned long>(d.K));
        const Interval inv_ln2 = reciprocal(ln2_enclosure(b));
        c.rhs_sum = inv_ln2 * sum_factor;
        c.rhs_coarse = inv_ln2 * coarse_factor;
        const auto pos = detail::less(Interval::point(0), c.defect);
        const auto sum = detail::less(c.defect, c.rhs_sum);
        const auto coarse = detail::less(c.defect, c.rhs_coarse);
        if (pos != detail::Verdict::Undecided && sum != detail::Verdict::Undecided &&
            coarse != detail::Verdict::Undecided) {
            c.positive = pos == detail::Verdict::Holds;
            c.sum_holds = sum == detail::Verdict::Holds;
            c.coarse_holds = coarse == detail::Verdict::Holds;
            return c;
        }
        if (b >= cap) throw Error(ErrorCode::InconclusivePrecision, "oscillation defect check did not separate");
    }
}

/// Whether 2^K - 1 <= K^mu / ln 2, decided on certified enclosures.
inline bool circuit_size_condition(unsigned long K, const Rational& mu) {
    const Integer lhs_int = pow2(K) - 1;
    const Interval rhs = detail::power_enclosure(Integer(K), mu);
    for (unsigned bits = 64 + static_cast<unsigned>(K);; bits *= 2) {
        const Interval lhs = ln2_enclosure(bits) * Rational(lhs_int);  // (2^K - 1) ln 2 <= K^mu
        const auto v = detail::leq(lhs, rhs);
        if (v == detail::Verdict::Holds) return true;
        if (v == detail::Verdict::Violated) return false;
        if (bits > 4096 + K) throw Error(ErrorCode::InconclusivePrecision, "circuit size condition");
    }
}

/// Largest K with 2^K - 1 <= K^mu / ln 2.
inline unsigned long k_cap_from_mu(const Rational& mu) {
    if (mu < 2) throw Error(ErrorCode::MuTooSmall, "mu must be >= 2");
    // 2^K / K^mu increases once K > mu / ln 2, so past 2 mu a failure is final.
    const Integer tail_start = ceil_of(mu * 2);
    unsigned long last = 0;
    for (unsigned long K = 1;; ++K) {
        const bool ok = circuit_size_condition(K, mu);
        if (ok) last = K;
        else if (Integer(K) > tail_start) break;
    }
    return last;
}

struct CircuitCandidate {
    unsigned long K = 0;
    long L = 0;
    Integer x0;
    bool two_power_divides = false;  // 2^K | x0 + 1
};

struct CircuitSearchReport {
    Integer a, b;
    Rational mu;
    unsigned long k_cap = 0;
    std::vector<CircuitCandidate> candidates;
    std::vector<CircuitCandidate> trivial;          // integral x0 <= 2, excluded
    std::vector<unsigned long> structurally_impossible;  // 2^(K+L) - a^K <= 0
    std::vector<std::string> assumptions;

    bool no_nontrivial_circuit() const { return candidates.empty(); }
};

/// For K in [2, K_cap]: L = 1 - K + floor(xi K), x0 = (a^K - 2^K)/(2^(K+L) - a^K); reports integral x0.
inline CircuitSearchReport one_oscillation_search(const MapParams& map, const Rational& mu) {
    if (map.b() != map.a() - 2) throw Error(ErrorCode::WrongFamily, "needs b = a - 2, got " + map.label());
    CircuitSearchReport r;
    r.a = map.a();
    r.b = map.b();
    r.mu = mu;
    r.k_cap = k_cap_from_mu(mu);
    r.assumptions.push_back("the size condition 2^K - 1 <= K^mu/ln2 is applied for every K >= 2; "
                            "the threshold n0 beyond which mu is valid is not computed");
    for (unsigned long K = 2; K <= r.k_cap; ++K) {
        const Integer K_int(K);
        const Integer floor_xk = floor_xi_multiple(map.a(), K_int);
        const Integer L = 1 - K_int + floor_xk;
        const Integer aK = ipow(map.a(), K);
        const Integer den = pow2(Integer(K_int + L).get_ui()) - aK;
        if (sgn(den) <= 0) {
            r.structurally_impossible.push_back(K);
            continue;
        }
        const Integer num = aK - pow2(K);
        if (mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()) == 0) continue;
        CircuitCandidate c;
        c.K = K;
        c.L = L.get_si();
        c.x0 = num / den;
        c.two_power_divides = mpz_divisible_2exp_p(Integer(c.x0 + 1).get_mpz_t(), K) != 0;
        (c.x0 <= 2 ? r.trivial : r.candidates).push_back(std::move(c));
    }
    return r;
}

inline nlohmann::json to_json(const CircuitSearchReport& r) {
    auto list = [](const std::vector<CircuitCandidate>& cs) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& c : cs)
            out.push_back({{"K", c.K}, {"L", c.L}, {"x0", to_string(c.x0)}, {"two_power_divides", c.two_power_divides}});
        return out;
    };
    return {{"map", {{"a", to_string(r.a)}, {"b", to_string(r.b)}}},
            {"mu", to_string(r.mu)},
            {"K_cap", r.k_cap},
            {"K_range", {2, r.k_cap}},
            {"candidates", list(r.candidates)},
            {"excluded_trivial", list(r.trivial)},
            {"structurally_impossible", r.structurally_impossible},
            {"verdict", r.no_nontrivial_circuit() ? "NoNontrivialCircuit" : "CandidatesFound"},
            {"assumptions", r.assumptions}};
}

inline nlohmann::json to_json(const OscillationDecomposition& d) {
    nlohmann::json x = nlohmann::json::array(), y = nlohmann::json::array();
    for (const auto& v : d.x) x.push_back(to_string(v));
    for (const auto& v : d.y) y.push_back(to_string(v));
    return {{"m", d.m}, {"x", x}, {"y", y}, {"k", d.k}, {"l", d.l}, {"K", d.K}, {"L", d.L}};
}

} // namespace syracuse
