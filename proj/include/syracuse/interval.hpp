#pragma once

// Rational interval arithmetic and certified enclosures of ln(2) and log2(a).
//
// Nothing in this header touches floating point. Both enclosures are built in
// integer fixed point with outward rounding, so every interval returned here
// provably contains the real number it names.

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"

namespace syracuse {

struct Interval {
    Rational lo;
    Rational hi;

    Interval() = default;
    Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {}
    static Interval point(const Rational& v) { return {v, v}; }

    Rational width() const { return hi - lo; }
    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    bool positive() const { return sgn(lo) > 0; }
    bool negative() const { return sgn(hi) < 0; }
};

inline Interval operator+(const Interval& x, const Interval& y) { return {x.lo + y.lo, x.hi + y.hi}; }
inline Interval operator-(const Interval& x, const Interval& y) { return {x.lo - y.hi, x.hi - y.lo}; }
inline Interval operator+(const Interval& x, const Rational& c) { return {x.lo + c, x.hi + c}; }
inline Interval operator+(const Rational& c, const Interval& x) { return x + c; }
inline Interval operator-(const Rational& c, const Interval& x) { return {c - x.hi, c - x.lo}; }

inline Interval operator*(const Interval& x, const Rational& c) {
    if (sgn(c) >= 0) return {x.lo * c, x.hi * c};
    return {x.hi * c, x.lo * c};
}
inline Interval operator*(const Rational& c, const Interval& x) { return x * c; }

inline Interval operator*(const Interval& x, const Interval& y) {
    Rational p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

inline Interval reciprocal(const Interval& x) {
    if (sgn(x.lo) <= 0 && sgn(x.hi) >= 0)
        throw Error(ErrorCode::InconclusivePrecision, "reciprocal of an interval containing zero");
    return {1 / x.hi, 1 / x.lo};
}

inline Interval operator/(const Interval& x, const Interval& y) { return x * reciprocal(y); }
inline Interval operator/(const Interval& x, const Rational& c) { return x * Rational(1 / c); }

/// Refinement cap for certified comparisons, in bits of enclosure width.
inline constexpr unsigned kRefinementCapBits = 256;

namespace detail {

inline std::mutex& enclosure_mutex() {
    static std::mutex m;
    return m;
}

// ln 2 = sum_{k>=1} 1/(k 2^k); the tail after K terms is below 1/((K+1) 2^K).
inline Interval compute_ln2(unsigned bits) {
    const unsigned terms = bits + 2;
    const unsigned frac = bits + 8 + static_cast<unsigned>(bit_length(Integer(terms)));
    const Integer one = pow2(frac);
    Integer sum = 0;
    for (unsigned k = 1; k <= terms; ++k) {
        Integer den = Integer(k) * pow2(k);
        Integer term;
        mpz_fdiv_q(term.get_mpz_t(), one.get_mpz_t(), den.get_mpz_t());
        sum += term;
    }
    const Rational scale(1, one);
    Rational lo = Rational(sum) * scale;
    Rational hi = Rational(sum + terms) * scale + Rational(1, Integer(terms + 1) * pow2(terms));
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

// Certified binary digits of log2(a) for odd a >= 3 by repeated squaring:
// with y = a / 2^floor(log2 a) in [1,2), the next bit is 1 iff y^2 >= 2, in
// which case y <- y^2 / 2. Lower and upper fixed-point bounds on y are
// carried separately; an ambiguous bit restarts with more guard bits.
inline Interval compute_log2(const Integer& a, unsigned bits) {
    const unsigned long int_part = bit_length(a) - 1;
    unsigned guard = 64;
    for (;;) {
        const unsigned long fbits = bits + guard + int_part;
        Integer lo = a << (fbits - int_part);
        Integer hi = lo;
        const Integer two = pow2(fbits + 1);
        Integer digits = 0;
        bool ok = true;
        for (unsigned i = 0; i < bits; ++i) {
            Integer sq_lo = lo * lo;
            Integer sq_hi = hi * hi;
            mpz_fdiv_q_2exp(sq_lo.get_mpz_t(), sq_lo.get_mpz_t(), fbits);
            mpz_cdiv_q_2exp(sq_hi.get_mpz_t(), sq_hi.get_mpz_t(), fbits);
            digits <<= 1;
            if (sq_lo >= two) {
                digits += 1;
                mpz_fdiv_q_2exp(lo.get_mpz_t(), sq_lo.get_mpz_t(), 1);
                mpz_cdiv_q_2exp(hi.get_mpz_t(), sq_hi.get_mpz_t(), 1);
            } else if (sq_hi < two) {
                lo = sq_lo;
                hi = sq_hi;
            } else {
                ok = false;
                break;
            }
        }
        if (ok) {
            const Integer base = (Integer(int_part) << bits) + digits;
            Rational l(base, pow2(bits));
            Rational h(base + 1, pow2(bits));
            l.canonicalize();
            h.canonicalize();
            return {l, h};
        }
        guard *= 2;
    }
}

} // namespace detail

/// Enclosure of ln 2 of width at most 2^-bits.
inline Interval ln2_enclosure(unsigned bits) {
    static std::map<unsigned, Interval> cache;
    std::lock_guard lock(detail::enclosure_mutex());
    auto it = cache.lower_bound(bits);
    if (it != cache.end()) return it->second;
    return cache.emplace(bits, detail::compute_ln2(bits)).first->second;
}

/// Enclosure of xi = log2(a) of width at most 2^-bits, for odd a >= 1.
/// For a == 1 the result is the exact point 0.
inline Interval log2_enclosure(const Integer& a, unsigned bits) {
    if (a == 1) return Interval::point(0);
    if (sgn(a) <= 0 || is_even(a)) throw Error(ErrorCode::BadArgument, "log2_enclosure needs odd a >= 1");
    static std::map<std::pair<std::string, unsigned>, Interval> cache;
    const std::string key = a.get_str(16);
    {
        std::lock_guard lock(detail::enclosure_mutex());
        auto it = cache.lower_bound({key, bits});
        if (it != cache.end() && it->first.first == key) return it->second;
    }
    Interval v = detail::compute_log2(a, bits);
    std::lock_guard lock(detail::enclosure_mutex());
    return cache.emplace(std::make_pair(key, bits), v).first->second;
}

/// Calls `make(bits)` with increasing precision until the returned interval
/// excludes zero; returns its sign. Throws InconclusivePrecision past `cap_bits`.
template <class MakeInterval>
int decide_sign(MakeInterval&& make, unsigned cap_bits = kRefinementCapBits, unsigned start_bits = 64) {
    for (unsigned bits = std::min(start_bits, cap_bits);; bits *= 2) {
        const unsigned b = std::min(bits, cap_bits);
        const Interval v = make(b);
        if (v.positive()) return 1;
        if (v.negative()) return -1;
        if (b >= cap_bits) break;
    }
    throw Error(ErrorCode::InconclusivePrecision, "enclosure could not separate from zero");
}

/// Sign of A + B*log2(a). Exact zero happens only for A == B == 0 (or a == 1, B arbitrary, A == 0).
inline int sign_linear_form(const Rational& A, const Rational& B, const Integer& a,
                            unsigned cap_bits = 1u << 14) {
    if (sgn(B) == 0 || a == 1) return sgn(A);
    const unsigned magnitude = static_cast<unsigned>(bit_length(floor_of(abs(B))) + bit_length(floor_of(abs(A))));
    return decide_sign([&](unsigned bits) { return A + B * log2_enclosure(a, bits + magnitude); }, cap_bits);
}

/// floor(k * log2(a)) decided from refined enclosures.
inline Integer floor_xi_multiple(const Integer& a, const Integer& k) {
    if (a == 1 || sgn(k) == 0) return 0;
    for (unsigned bits = 64 + static_cast<unsigned>(bit_length(k));; bits *= 2) {
        const Interval v = log2_enclosure(a, bits) * Rational(k);
        const Integer f = floor_of(v.lo);
        if (sgn(k) > 0 ? v.hi <= Rational(f + 1) : floor_of(v.hi) == f) return f;
    }
}

} // namespace syracuse
