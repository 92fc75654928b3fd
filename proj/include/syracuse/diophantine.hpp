#pragma once

// Continued fraction of xi = log2(a) for odd a >= 3.
//
// Strategy. The primary engine expands both endpoints of a certified
// enclosure of xi (integer fixed point, one square-and-compare per bit; see
// interval.hpp) and keeps the common prefix, doubling the precision until
// enough partial quotients agree. A second engine works directly with exact
// powers (largest k with B^k <= A, then (A, B) <- (B, A / B^k)); it is only
// practical while the powers stay small and serves as a cross-check.
// Comparisons 2^p vs a^q are exact on the integers while a^q has fewer than
// 2^22 bits and fall back to the enclosure otherwise.

#include <cstddef>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/interval.hpp"

namespace syracuse {

struct Convergent {
    std::size_t index = 0;
    Integer partial_quotient;
    Integer p;
    Integer q;
};

enum class PowerCompare { Auto, Direct, Enclosure };

inline constexpr std::size_t kDirectPowerBits = std::size_t{1} << 22;

namespace detail {
inline void require_xi_base(const Integer& a) {
    if (a < 3 || is_even(a)) throw Error(ErrorCode::BadArgument, "xi = log2(a) needs odd a >= 3");
}
} // namespace detail

/// Sign of 2^p - a^q, i.e. the sign of p - q*xi. Never zero for odd a >= 3 and q >= 1.
inline int compare_pow2_apow(const Integer& p, const Integer& q, const Integer& a,
                             PowerCompare how = PowerCompare::Auto) {
    detail::require_xi_base(a);
    const bool direct_ok = p.fits_ulong_p() && q.fits_ulong_p() && sgn(p) >= 0 && sgn(q) >= 0 &&
                           p.get_ui() <= kDirectPowerBits &&
                           q.get_ui() * bit_length(a) <= kDirectPowerBits;
    if (how == PowerCompare::Direct || (how == PowerCompare::Auto && direct_ok)) {
        if (!direct_ok) throw Error(ErrorCode::BadArgument, "direct power comparison out of range");
        const int c = cmp(pow2(p.get_ui()), ipow(a, q.get_ui()));
        if (c == 0 && sgn(q) != 0) throw Error(ErrorCode::RelationViolation, "2^p == a^q for odd a");
        return c > 0 ? 1 : (c < 0 ? -1 : 0);
    }
    return sign_linear_form(Rational(p), Rational(-q), a);
}

/// Partial quotients of log2(a) via the certified enclosure (uncached).
inline std::vector<Integer> partial_quotients_enclosure(const Integer& a, std::size_t count) {
    detail::require_xi_base(a);
    for (unsigned bits = 64 + 8 * static_cast<unsigned>(count);; bits *= 2) {
        const Interval x = log2_enclosure(a, bits);
        Rational lo = x.lo, hi = x.hi;
        std::vector<Integer> out;
        while (out.size() < count) {
            const Integer f = floor_of(lo);
            if (floor_of(hi) != f) break;
            out.push_back(f);
            Rational r_lo = lo - f, r_hi = hi - f;
            if (sgn(r_lo) == 0) break;
            lo = 1 / r_hi;
            hi = 1 / r_lo;
        }
        if (out.size() >= count) return out;
    }
}

/// Partial quotients of log2(a) by exact power comparisons. Cost grows like
/// q_n * log2(a) bits, so keep count small (n <= 12 is instant for a <= 33).
inline std::vector<Integer> partial_quotients_direct(const Integer& a, std::size_t count) {
    detail::require_xi_base(a);
    Rational A(a), B(2);
    std::vector<Integer> out;
    while (out.size() < count) {
        Integer k = 0;
        Rational power = 1;
        while (power * B <= A) {
            power *= B;
            ++k;
        }
        out.push_back(k);
        Rational next = A / power;
        next.canonicalize();
        if (next == 1) throw Error(ErrorCode::RelationViolation, "log2(a) turned out rational");
        A = B;
        B = next;
    }
    return out;
}

/// Exact partial quotients a_0, a_1, ... of log2(a) (a_0 = floor(log2 a)).
/// Results are memoized per a; concurrent readers share the table.
inline std::vector<Integer> partial_quotients(const Integer& a, std::size_t count) {
    detail::require_xi_base(a);
    static std::shared_mutex mutex;
    static std::map<std::string, std::vector<Integer>> memo;
    const std::string key = a.get_str(16);
    {
        std::shared_lock lock(mutex);
        if (auto it = memo.find(key); it != memo.end() && it->second.size() >= count)
            return {it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(count)};
    }
    auto fresh = partial_quotients_enclosure(a, std::max<std::size_t>(count, 32));
    std::unique_lock lock(mutex);
    auto& slot = memo[key];
    if (slot.size() < fresh.size()) slot = fresh;
    return {slot.begin(), slot.begin() + static_cast<std::ptrdiff_t>(count)};
}

/// Convergents p_n/q_n from p_n = a_n p_{n-1} + p_{n-2} (seeds p_-2=0, p_-1=1, q_-2=1, q_-1=0).
inline std::vector<Convergent> convergents(const Integer& a, std::size_t count) {
    const auto quotients = partial_quotients(a, count);
    std::vector<Convergent> out;
    Integer p2 = 0, p1 = 1, q2 = 1, q1 = 0;
    for (std::size_t n = 0; n < quotients.size(); ++n) {
        Convergent c{n, quotients[n], quotients[n] * p1 + p2, quotients[n] * q1 + q2};
        Integer g;
        mpz_gcd(g.get_mpz_t(), c.p.get_mpz_t(), c.q.get_mpz_t());
        if (g != 1) throw Error(ErrorCode::RelationViolation, "convergent not in lowest terms");
        if (n >= 2 && !(c.q > out.back().q)) throw Error(ErrorCode::RelationViolation, "q_n not increasing");
        p2 = p1;
        p1 = c.p;
        q2 = q1;
        q1 = c.q;
        out.push_back(std::move(c));
    }
    return out;
}

/// Convergents up to and including the first whose denominator exceeds `q_limit`.
inline std::vector<Convergent> convergents_past(const Integer& a, const Integer& q_limit) {
    for (std::size_t count = 8;; count *= 2) {
        auto cs = convergents(a, count);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (cs[i].q > q_limit) {
                cs.resize(i + 1);
                return cs;
            }
        }
    }
}

/// Rational bracket lower < xi < upper from consecutive convergents.
struct XiEnclosure {
    std::size_t n = 0;  // convergents n and n+1
    Rational lower;
    Rational upper;
    Rational width;
};

/// Tightest bracket whose denominators stay within `denominator_budget`.
inline XiEnclosure xi_enclosure(const Integer& a, const Integer& denominator_budget) {
    detail::require_xi_base(a);
    const auto cs = convergents_past(a, denominator_budget);
    // cs.back().q exceeds the budget; everything before it fits.
    if (cs.size() < 3) throw Error(ErrorCode::BudgetTooSmall, "need q_1 <= budget");
    const std::size_t n = cs.size() - 3;
    const auto& c0 = cs[n];
    const auto& c1 = cs[n + 1];
    Rational r0(c0.p, c0.q), r1(c1.p, c1.q);
    const int s0 = compare_pow2_apow(c0.p, c0.q, a);
    const int s1 = compare_pow2_apow(c1.p, c1.q, a);
    if (s0 == s1) throw Error(ErrorCode::RelationViolation, "consecutive convergents on the same side of xi");
    XiEnclosure e;
    e.n = n;
    e.lower = s0 < 0 ? r0 : r1;
    e.upper = s0 < 0 ? r1 : r0;
    e.width = e.upper - e.lower;
    return e;
}

struct ApproxGap {
    std::size_t n = 0;
    Integer p_n, q_n, q_next;
    Rational gap;           // 1/(q_n + q_{n+1})
    int side = 0;           // sign of p_n - q_n*xi; (-1)^(n+1)
    bool certified = false; // |p_n - q_n xi| > gap confirmed by enclosure
};

/// Certified lower bound 1/(q_n + q_{n+1}) < |p_n - q_n xi|.
inline ApproxGap best_approx_gap(const Integer& a, std::size_t n) {
    const auto cs = convergents(a, n + 2);
    ApproxGap g;
    g.n = n;
    g.p_n = cs[n].p;
    g.q_n = cs[n].q;
    g.q_next = cs[n + 1].q;
    g.gap = Rational(1, g.q_n + g.q_next);
    g.side = compare_pow2_apow(g.p_n, g.q_n, a);
    const int expected = (n % 2 == 0) ? -1 : 1;
    if (g.side != expected) throw Error(ErrorCode::RelationViolation, "convergent sign pattern broken");
    // side*(p - q xi) - gap > 0
    const int s = sign_linear_form(Rational(g.side * g.p_n) - g.gap, Rational(-g.side * g.q_n), a);
    g.certified = s > 0;
    return g;
}

} // namespace syracuse
