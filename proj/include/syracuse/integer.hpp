#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "syracuse/error.hpp"

namespace syracuse {

using Integer = mpz_class;
using Rational = mpq_class;
using u128 = unsigned __int128;

inline Integer pow2(unsigned long e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline bool is_odd(const Integer& n) { return mpz_odd_p(n.get_mpz_t()) != 0; }
inline bool is_even(const Integer& n) { return mpz_even_p(n.get_mpz_t()) != 0; }

/// Number of bits in |n|; 0 for n == 0.
inline std::size_t bit_length(const Integer& n) {
    return sgn(n) == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2);
}

/// Exponent e with n == 2^e, if n is a positive power of two.
inline std::optional<unsigned long> exact_log2(const Integer& n) {
    if (sgn(n) <= 0) return std::nullopt;
    const auto low = mpz_scan1(n.get_mpz_t(), 0);
    if (low + 1 != mpz_sizeinbase(n.get_mpz_t(), 2)) return std::nullopt;
    return static_cast<unsigned long>(low);
}

inline bool fits_u64(const Integer& n) {
    return sgn(n) >= 0 && bit_length(n) <= 64;
}

inline std::uint64_t to_u64(const Integer& n) {
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n.get_mpz_t());
    return out;
}

inline Integer from_u128(u128 v) {
    Integer r;
    const std::uint64_t limbs[2] = {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
    mpz_import(r.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, limbs);
    return r;
}

inline bool fits_u128(const Integer& n) { return sgn(n) >= 0 && bit_length(n) <= 128; }

inline u128 to_u128(const Integer& n) {
    std::uint64_t limbs[2] = {0, 0};
    mpz_export(limbs, nullptr, -1, sizeof(std::uint64_t), 0, 0, n.get_mpz_t());
    return (static_cast<u128>(limbs[1]) << 64) | limbs[0];
}

/// n/d in lowest terms (the two-argument mpq_class constructor does not reduce).
inline Rational ratio(const Integer& n, const Integer& d) {
    if (sgn(d) == 0) throw Error(ErrorCode::BadArgument, "zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

inline Integer floor_of(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer ceil_of(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline std::string to_string(const Integer& n) { return n.get_str(10); }
inline std::string to_string(const Rational& q) { return q.get_str(10); }

/// Parses a decimal integer or the forms "2^k" and "c*2^k" (used for caps and floors).
inline Integer parse_integer(std::string_view text) {
    const std::string s(text);
    auto parse_plain = [&](const std::string& part) {
        Integer v;
        if (part.empty() || v.set_str(part, 10) != 0)
            throw Error(ErrorCode::BadArgument, "not an integer: '" + s + "'");
        return v;
    };
    const auto caret = s.find('^');
    if (caret == std::string::npos) return parse_plain(s);
    const auto star = s.find('*');
    Integer coeff = 1;
    std::string base_part = s.substr(0, caret);
    if (star != std::string::npos && star < caret) {
        coeff = parse_plain(s.substr(0, star));
        base_part = s.substr(star + 1, caret - star - 1);
    }
    const Integer base = parse_plain(base_part);
    const Integer exponent = parse_plain(s.substr(caret + 1));
    if (sgn(exponent) < 0 || !exponent.fits_ulong_p())
        throw Error(ErrorCode::BadArgument, "bad exponent in '" + s + "'");
    return coeff * ipow(base, exponent.get_ui());
}

/// Parses "p/q", a decimal fraction "14.5", or an integer.
inline Rational parse_rational(std::string_view text) {
    const std::string s(text);
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        const std::string whole = s.substr(0, dot);
        const std::string frac = s.substr(dot + 1);
        Integer num;
        if (num.set_str((whole.empty() ? "0" : whole) + frac, 10) != 0)
            throw Error(ErrorCode::BadArgument, "not a number: '" + s + "'");
        Rational r(num, ipow(10, frac.size()));
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(s, 10) != 0) throw Error(ErrorCode::BadArgument, "not a rational: '" + s + "'");
    r.canonicalize();
    return r;
}

struct IntegerHash {
    std::size_t operator()(const Integer& n) const noexcept {
        std::size_t h = static_cast<std::size_t>(mpz_size(n.get_mpz_t())) ^ (sgn(n) < 0 ? 0x9e3779b97f4a7c15ull : 0);
        const auto limbs = mpz_size(n.get_mpz_t());
        for (std::size_t i = 0; i < limbs; ++i) {
            h ^= static_cast<std::size_t>(mpz_getlimbn(n.get_mpz_t(), i)) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace syracuse
