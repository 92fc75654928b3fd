#pragma once

// The generalized Syracuse map T(n) = n/2 (n even), (a n + b)/2 (n odd).

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"

namespace syracuse {

struct Nu1Delta {
    unsigned nu1;
    int delta;  // +1 or -1, with a = 2^nu1 - delta

    friend bool operator==(const Nu1Delta&, const Nu1Delta&) = default;
};

/// Validated parameters (a, b). Only `new_map` constructs one.
class MapParams {
public:
    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    std::optional<unsigned> nu0() const { return nu0_; }
    std::optional<Nu1Delta> nu1_delta() const { return nu1_delta_; }

    /// The values as int64 when both fit, which enables the fixed-width fast paths.
    bool small() const { return small_; }
    std::int64_t a64() const { return a64_; }
    std::int64_t b64() const { return b64_; }

    std::string label() const { return "(" + to_string(a_) + "," + to_string(b_) + ")"; }

    friend bool operator==(const MapParams& x, const MapParams& y) { return x.a_ == y.a_ && x.b_ == y.b_; }

private:
    friend MapParams new_map(const Integer& a, const Integer& b);
    MapParams() = default;

    Integer a_, b_;
    std::optional<unsigned> nu0_;
    std::optional<Nu1Delta> nu1_delta_;
    bool small_ = false;
    std::int64_t a64_ = 0, b64_ = 0;
};

inline MapParams new_map(const Integer& a, const Integer& b) {
    if (is_even(a) || is_even(b))
        throw Error(ErrorCode::EvenParameter, "a and b must both be odd, got " + to_string(a) + "," + to_string(b));
    if (a + b <= 0)
        throw Error(ErrorCode::NonPositiveSum, "need a > -b, got " + to_string(a) + "," + to_string(b));
    if (sgn(a) <= 0)
        throw Error(ErrorCode::NonPositiveMultiplier, "need a >= 1, got " + to_string(a));

    MapParams m;
    m.a_ = a;
    m.b_ = b;
    m.nu0_ = exact_log2(a + b);

    // a = 2^nu1 - delta. Only a = 3 admits both signs; prefer the one with delta*b > 0.
    std::optional<Nu1Delta> plus, minus;
    if (auto e = exact_log2(a + 1); e && *e >= 1) plus = Nu1Delta{static_cast<unsigned>(*e), +1};
    if (auto e = exact_log2(a - 1); e && *e >= 1) minus = Nu1Delta{static_cast<unsigned>(*e), -1};
    if (plus && minus) m.nu1_delta_ = sgn(b) < 0 ? minus : plus;
    else m.nu1_delta_ = plus ? plus : minus;

    m.small_ = a.fits_slong_p() && b.fits_slong_p() && bit_length(a) < 62 && bit_length(b) < 62;
    if (m.small_) {
        m.a64_ = a.get_si();
        m.b64_ = b.get_si();
    }
    return m;
}

inline MapParams new_map(long a, long b) { return new_map(Integer(a), Integer(b)); }

inline Integer step(const MapParams& map, const Integer& n) {
    Integer r;
    if (is_even(n)) {
        mpz_fdiv_q_2exp(r.get_mpz_t(), n.get_mpz_t(), 1);
    } else {
        r = map.a() * n + map.b();
        mpz_fdiv_q_2exp(r.get_mpz_t(), r.get_mpz_t(), 1);
    }
    return r;
}

inline Integer iterate(const MapParams& map, Integer n, std::uint64_t k) {
    for (std::uint64_t i = 0; i < k; ++i) n = step(map, n);
    return n;
}

struct Caps {
    std::uint64_t max_steps = 1'000'000;
    Integer max_value = pow2(128);

    friend bool operator==(const Caps& x, const Caps& y) {
        return x.max_steps == y.max_steps && x.max_value == y.max_value;
    }
};

enum class CapKind { StepCap, ValueCap };

inline std::string_view to_string(CapKind k) { return k == CapKind::StepCap ? "StepCap" : "ValueCap"; }

struct EnteredCycle {
    std::size_t index;  // first index of the value that repeated
};
struct CapExceeded {
    CapKind kind;
};

struct Trajectory {
    Integer start;
    std::vector<Integer> steps;  // steps[0] == start; the last entry is the repeat or the capped value
    std::variant<EnteredCycle, CapExceeded> terminal;

    bool entered_cycle() const { return std::holds_alternative<EnteredCycle>(terminal); }
};

/// Follows n until a value repeats (EnteredCycle) or a cap trips. Never claims divergence.
inline Trajectory trajectory(const MapParams& map, const Integer& n, const Caps& caps = {}) {
    if (sgn(n) <= 0) throw Error(ErrorCode::BadArgument, "trajectory needs n >= 1");
    Trajectory t{n, {n}, CapExceeded{CapKind::StepCap}};
    std::unordered_map<Integer, std::size_t, IntegerHash> seen;
    seen.emplace(n, 0);
    Integer v = n;
    if (v > caps.max_value) {
        t.terminal = CapExceeded{CapKind::ValueCap};
        return t;
    }
    for (std::uint64_t k = 0; k < caps.max_steps; ++k) {
        v = step(map, v);
        t.steps.push_back(v);
        if (auto it = seen.find(v); it != seen.end()) {
            t.terminal = EnteredCycle{it->second};
            return t;
        }
        if (v > caps.max_value) {
            t.terminal = CapExceeded{CapKind::ValueCap};
            return t;
        }
        seen.emplace(v, t.steps.size() - 1);
    }
    t.terminal = CapExceeded{CapKind::StepCap};
    return t;
}

struct TrivialCycleSpec {
    Integer omega;
    unsigned length;
    std::vector<Integer> elements;  // omega, omega*2^(length-1), ..., omega*2
};

struct TrivialCycles {
    std::vector<TrivialCycleSpec> cycles;
    bool power_structure = true;  // false when a+b is not a power of two
};

namespace detail {
inline TrivialCycleSpec power_cycle(const Integer& omega, unsigned length) {
    TrivialCycleSpec s{omega, length, {omega}};
    for (unsigned e = length - 1; e >= 1; --e) s.elements.push_back(omega * pow2(e));
    return s;
}
} // namespace detail

/// Omega(1) of length nu0 when a+b = 2^nu0; additionally Omega(delta*b) of
/// length nu1 when a = 2^nu1 - delta and delta*b > 0 (merged when delta*b == 1).
inline TrivialCycles trivial_cycles(const MapParams& map) {
    TrivialCycles out;
    if (!map.nu0()) {
        out.power_structure = false;
        return out;
    }
    out.cycles.push_back(detail::power_cycle(1, *map.nu0()));
    if (auto nd = map.nu1_delta()) {
        const Integer db = nd->delta * map.b();
        if (sgn(db) > 0 && db != 1) out.cycles.push_back(detail::power_cycle(db, nd->nu1));
    }
    return out;
}

/// True iff b > 1 and b | n; then every iterate of n stays divisible by b.
inline bool divisibility_obstruction(const MapParams& map, const Integer& n) {
    return map.b() > 1 && mpz_divisible_p(n.get_mpz_t(), map.b().get_mpz_t()) != 0;
}

} // namespace syracuse
