#pragma once

// Cycle-length and oscillation-count lower bounds with auditable certificates.
//
// ln 2 and xi = log2(a) only ever appear as rational enclosures. Each
// inequality is decided at enclosure level, refining until it separates or
// the cap is reached (InconclusivePrecision).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "syracuse/cycle.hpp"
#include "syracuse/diophantine.hpp"
#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/interval.hpp"
#include "syracuse/map.hpp"

namespace syracuse {

namespace detail {

inline void require_b_positive(const MapParams& map) {
    if (map.b() < 1) throw Error(ErrorCode::NonPositiveB, "bounds assume b >= 1, got b = " + to_string(map.b()));
}

inline unsigned bits_for_width(const Rational& factor, const Rational& width) {
    // smallest bits with factor * 2^-bits <= width
    const Rational scale = abs(factor) / width;
    return static_cast<unsigned>(bit_length(ceil_of(scale))) + 1;
}

// Three-way decision of x <= y for enclosures that may still overlap.
enum class Verdict { Holds, Violated, Undecided };

inline Verdict leq(const Interval& x, const Interval& y) {
    if (x.hi <= y.lo) return Verdict::Holds;
    if (x.lo > y.hi) return Verdict::Violated;
    return Verdict::Undecided;
}

inline Verdict less(const Interval& x, const Interval& y) {
    if (x.hi < y.lo) return Verdict::Holds;
    if (x.lo >= y.hi) return Verdict::Violated;
    return Verdict::Undecided;
}

} // namespace detail

/// Enclosure of factor * ln 2 with width at most `width`.
inline Interval scaled_ln2(const Rational& factor, const Rational& width) {
    return ln2_enclosure(detail::bits_for_width(factor, width)) * factor;
}

/// c0 = a ln2 / b.
inline Interval c0_enclosure(const MapParams& map, const Rational& width = Rational(1, 1000000)) {
    detail::require_b_positive(map);
    return scaled_ln2(ratio(map.a(), map.b()), width);
}

/// c1 = (a - 2) ln2 / b.
inline Interval c1_enclosure(const MapParams& map, const Rational& width = Rational(1, 1000000)) {
    detail::require_b_positive(map);
    if (map.a() < 3) throw Error(ErrorCode::DegenerateA, "c1 needs a >= 3");
    return scaled_ln2(ratio(map.a() - 2, map.b()), width);
}

struct DefectCheck {
    std::size_t K = 0, L = 0;
    Integer min_odd, min_all;
    Interval defect;      // (K+L) - K xi
    Interval rhs_tight;   // b K / (a ln2 min(odd elements))
    Interval rhs_coarse;  // b #cycle / (a ln2 min(cycle))
    bool positive = false;
    bool tight_holds = false;
    bool coarse_holds = false;
    unsigned bits = 0;

    bool holds() const { return positive && tight_holds && coarse_holds; }
};

/// Both inequalities 0 < (K+L) - K xi <= bK/(a ln2 min odd) and the coarse
/// #Omega/min(Omega) form, decided on enclosures.
inline DefectCheck defect_check(const MapParams& map, const Cycle& cycle) {
    detail::require_b_positive(map);
    DefectCheck d;
    d.K = cycle.K;
    d.L = cycle.L;
    d.min_odd = cycle.min_odd;
    d.min_all = cycle.omega;
    const Rational tight_factor = ratio(map.b() * Integer(static_cast<unsigned long>(cycle.K)), map.a() * cycle.min_odd);
    const Rational coarse_factor =
        ratio(map.b() * Integer(static_cast<unsigned long>(cycle.length())), map.a() * cycle.omega);
    const unsigned magnitude = static_cast<unsigned>(bit_length(Integer(static_cast<unsigned long>(cycle.length()))));
    const unsigned cap = kRefinementCapBits + magnitude;
    for (unsigned bits = 64;; bits *= 2) {
        const unsigned b = std::min(bits, cap);
        const Rational total(static_cast<unsigned long>(cycle.length()));
        d.defect = total - log2_enclosure(map.a(), b + magnitude) * Rational(static_cast<unsigned long>(cycle.K));
        const Interval inv_ln2 = reciprocal(ln2_enclosure(b));
        d.rhs_tight = inv_ln2 * tight_factor;
        d.rhs_coarse = inv_ln2 * coarse_factor;
        d.bits = b;
        const auto pos = detail::less(Interval::point(0), d.defect);
        const auto tight = detail::leq(d.defect, d.rhs_tight);
        const auto coarse = detail::leq(d.defect, d.rhs_coarse);
        if (pos != detail::Verdict::Undecided && tight != detail::Verdict::Undecided &&
            coarse != detail::Verdict::Undecided) {
            d.positive = pos == detail::Verdict::Holds;
            d.tight_holds = tight == detail::Verdict::Holds;
            d.coarse_holds = coarse == detail::Verdict::Holds;
            return d;
        }
        if (b >= cap) throw Error(ErrorCode::InconclusivePrecision, "defect check did not separate");
    }
}

/// One row of the length-bound consistency check for a concrete cycle.
struct ConsistencyRow {
    std::size_t n = 0;
    bool length_ok = false;  // #Omega >= min(q_n, c0 min(Omega)/(q_n+q_{n+1}))
    bool odd_ok = false;     // K >= min(q_n, c0 min(odd)/(q_n+q_{n+1}))
};

/// For n = 1..n_max, confirms that a concrete cycle satisfies the convergent-pair bounds.
inline std::vector<ConsistencyRow> bound_consistency(const MapParams& map, const Cycle& cycle, std::size_t n_max) {
    detail::require_b_positive(map);
    const auto cs = convergents(map.a(), n_max + 2);
    std::vector<ConsistencyRow> rows;
    auto check = [&](std::size_t have, const Integer& q_n, const Integer& q_next, const Integer& floor_value) {
        const Integer h(static_cast<unsigned long>(have));
        if (h >= q_n) return true;
        for (unsigned bits = 64;; bits *= 2) {
            const Interval rhs = ln2_enclosure(bits) * ratio(map.a() * floor_value, map.b() * (q_n + q_next));
            const auto v = detail::leq(rhs, Interval::point(Rational(h)));
            if (v == detail::Verdict::Holds) return true;
            if (v == detail::Verdict::Violated) return false;
            if (bits >= kRefinementCapBits) throw Error(ErrorCode::InconclusivePrecision, "consistency row");
        }
    };
    for (std::size_t n = 1; n <= n_max; ++n) {
        ConsistencyRow r;
        r.n = n;
        r.length_ok = check(cycle.length(), cs[n].q, cs[n + 1].q, cycle.omega);
        r.odd_ok = check(cycle.K, cs[n].q, cs[n + 1].q, cycle.min_odd);
        rows.push_back(r);
    }
    return rows;
}

enum class BoundMode { ConvergentPair, IrrationalityMeasure };
enum class BoundTarget { CycleLengthK, OscillationCountM };
enum class FloorKind { MinOmega, MinOmegaOdd };

inline std::string_view to_string(BoundMode m) {
    return m == BoundMode::ConvergentPair ? "ConvergentPair" : "IrrationalityMeasure";
}
inline std::string_view to_string(BoundTarget t) {
    return t == BoundTarget::CycleLengthK ? "CycleLengthK" : "OscillationCountM";
}
inline std::string_view to_string(FloorKind f) { return f == FloorKind::MinOmega ? "min_omega" : "min_omega_odd"; }

struct BoundRow {
    std::size_t n = 0;
    Integer q_n, q_next;
    Integer second_term;  // floor of the certified lower enclosure of the second term
    bool exact_floor = false;
    Integer bound;        // min(q_n, second_term)
};

struct BoundCertificate {
    Integer a, b;
    Integer N0;
    FloorKind floor_kind = FloorKind::MinOmega;
    BoundMode mode = BoundMode::ConvergentPair;
    std::optional<Rational> mu;
    BoundTarget target = BoundTarget::CycleLengthK;
    std::string constant_name;  // "c0" or "c1"
    Interval constant;          // enclosure used for every row
    std::size_t n = 0;          // witnessing index
    Integer q_n, q_next;
    Integer bound;
    std::vector<BoundRow> rows;
    std::vector<std::string> assumptions;
};

/// mu = 14 is the known irrationality exponent for log2(3); other a need a user value.
inline std::optional<Rational> default_mu(const Integer& a) {
    if (a == 3) return Rational(14);
    return std::nullopt;
}

namespace detail {

// Enclosure of q^mu for rational mu = r/s via integer s-th roots of q^r.
inline Interval power_enclosure(const Integer& q, const Rational& mu) {
    if (!mu.get_num().fits_ulong_p() || !mu.get_den().fits_ulong_p())
        throw Error(ErrorCode::BadArgument, "mu too large");
    const Integer qr = ipow(q, mu.get_num().get_ui());
    const unsigned long s = mu.get_den().get_ui();
    Integer root;
    const bool exact = mpz_root(root.get_mpz_t(), qr.get_mpz_t(), s) != 0;
    return {Rational(root), Rational(exact ? root : root + 1)};
}

struct RowInputs {
    std::size_t n;
    Integer q_n, q_next;
};

// Second term enclosure: constant * N0 / denominator, denominator given as an enclosure.
inline BoundRow evaluate_row(const RowInputs& in, const Interval& constant, const Integer& N0,
                             const Interval& denominator) {
    const Interval second = constant * Rational(N0) / denominator;
    BoundRow r;
    r.n = in.n;
    r.q_n = in.q_n;
    r.q_next = in.q_next;
    r.second_term = floor_of(second.lo);
    r.exact_floor = floor_of(second.hi) == r.second_term;
    r.bound = std::min(in.q_n, r.second_term);
    return r;
}

inline BoundCertificate build_certificate(const MapParams& map, const Integer& N0, std::size_t n_max,
                                          BoundMode mode, std::optional<Rational> mu, BoundTarget target,
                                          FloorKind floor_kind) {
    if (N0 < 1) throw Error(ErrorCode::BadArgument, "N0 must be >= 1");
    if (n_max < 1) throw Error(ErrorCode::BadArgument, "n_max must be >= 1");
    const Rational factor = target == BoundTarget::CycleLengthK ? ratio(map.a(), map.b())
                                                                 : ratio(map.a() - 2, map.b());
    const auto cs = convergents(map.a(), n_max + 2);

    BoundCertificate cert;
    cert.a = map.a();
    cert.b = map.b();
    cert.N0 = N0;
    cert.floor_kind = floor_kind;
    cert.mode = mode;
    cert.mu = mu;
    cert.target = target;
    cert.constant_name = target == BoundTarget::CycleLengthK ? "c0" : "c1";
    if (mode == BoundMode::IrrationalityMeasure) {
        cert.assumptions.push_back("irrationality measure mu = " + to_string(*mu) +
                                   " assumed valid for every convergent used; the threshold n0 is not computed");
    }
    cert.assumptions.push_back(std::string("N0 is a lower bound on ") + std::string(to_string(floor_kind)) +
                               " of any nontrivial cycle");

    const unsigned magnitude = static_cast<unsigned>(bit_length(N0));
    for (unsigned bits = 96 + magnitude;; bits *= 2) {
        cert.constant = ln2_enclosure(bits) * factor;
        cert.rows.clear();
        bool all_exact = true;
        for (std::size_t n = 1; n <= n_max; ++n) {
            const RowInputs in{n, cs[n].q, cs[n + 1].q};
            const Interval den = mode == BoundMode::ConvergentPair ? Interval::point(Rational(in.q_n + in.q_next))
                                                                   : power_enclosure(in.q_n, *mu);
            cert.rows.push_back(evaluate_row(in, cert.constant, N0, den));
            // Rows where q_n already wins do not need an exact floor.
            if (!cert.rows.back().exact_floor && cert.rows.back().second_term < in.q_n) all_exact = false;
        }
        if (all_exact || bits >= kRefinementCapBits + magnitude) break;
    }
    const auto best = std::max_element(cert.rows.begin(), cert.rows.end(),
                                       [](const BoundRow& x, const BoundRow& y) { return x.bound < y.bound; });
    cert.n = best->n;
    cert.q_n = best->q_n;
    cert.q_next = best->q_next;
    cert.bound = best->bound;
    return cert;
}

} // namespace detail

/// max over 1 <= n <= n_max of min(q_n, floor(c0 N0 / (q_n + q_{n+1}))).
inline BoundCertificate min_length_bound(const MapParams& map, const Integer& N0, std::size_t n_max,
                                         FloorKind floor_kind = FloorKind::MinOmega) {
    detail::require_b_positive(map);
    detail::require_xi_base(map.a());
    return detail::build_certificate(map, N0, n_max, BoundMode::ConvergentPair, std::nullopt,
                                     BoundTarget::CycleLengthK, floor_kind);
}

/// max over n of min(q_n, floor(c0 N0 / q_n^mu)); mu is an assumption recorded in the certificate.
inline BoundCertificate mu_length_bound(const MapParams& map, const Integer& N0, const Rational& mu,
                                        std::size_t n_max, FloorKind floor_kind = FloorKind::MinOmega) {
    detail::require_b_positive(map);
    detail::require_xi_base(map.a());
    if (mu < 2) throw Error(ErrorCode::MuTooSmall, "mu must be >= 2");
    return detail::build_certificate(map, N0, n_max, BoundMode::IrrationalityMeasure, mu,
                                     BoundTarget::CycleLengthK, floor_kind);
}

/// Same maximization with c1 = (a-2) ln2 / b, bounding the number of oscillations m.
inline BoundCertificate oscillation_bound(const MapParams& map, const Integer& N0, std::size_t n_max) {
    detail::require_b_positive(map);
    if (map.a() < 3) throw Error(ErrorCode::DegenerateA, "oscillation bound needs a >= 3");
    return detail::build_certificate(map, N0, n_max, BoundMode::ConvergentPair, std::nullopt,
                                     BoundTarget::OscillationCountM, FloorKind::MinOmega);
}

// ---- certificate serialization and independent re-verification ----

inline nlohmann::json to_json(const BoundCertificate& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows) {
        rows.push_back({{"n", r.n},
                        {"q_n", to_string(r.q_n)},
                        {"q_next", to_string(r.q_next)},
                        {"second_term", to_string(r.second_term)},
                        {"exact_floor", r.exact_floor},
                        {"bound", to_string(r.bound)}});
    }
    return {{"map", {{"a", to_string(c.a)}, {"b", to_string(c.b)}}},
            {"N0", to_string(c.N0)},
            {"floor", std::string(to_string(c.floor_kind))},
            {"mode", std::string(to_string(c.mode))},
            {"mu", c.mu ? nlohmann::json(to_string(*c.mu)) : nlohmann::json(nullptr)},
            {"target", std::string(to_string(c.target))},
            {"constant", {{"name", c.constant_name}, {"lo", to_string(c.constant.lo)}, {"hi", to_string(c.constant.hi)}}},
            {"n", c.n},
            {"q_n", to_string(c.q_n)},
            {"q_next", to_string(c.q_next)},
            {"bound", to_string(c.bound)},
            {"rows", rows},
            {"assumptions", c.assumptions}};
}

inline BoundCertificate certificate_from_json(const nlohmann::json& j) {
    BoundCertificate c;
    c.a = parse_integer(j.at("map").at("a").get<std::string>());
    c.b = parse_integer(j.at("map").at("b").get<std::string>());
    c.N0 = parse_integer(j.at("N0").get<std::string>());
    c.floor_kind = j.at("floor").get<std::string>() == "min_omega" ? FloorKind::MinOmega : FloorKind::MinOmegaOdd;
    c.mode = j.at("mode").get<std::string>() == "ConvergentPair" ? BoundMode::ConvergentPair
                                                                  : BoundMode::IrrationalityMeasure;
    if (!j.at("mu").is_null()) c.mu = parse_rational(j.at("mu").get<std::string>());
    c.target = j.at("target").get<std::string>() == "CycleLengthK" ? BoundTarget::CycleLengthK
                                                                    : BoundTarget::OscillationCountM;
    c.constant_name = j.at("constant").at("name").get<std::string>();
    c.constant = {parse_rational(j.at("constant").at("lo").get<std::string>()),
                  parse_rational(j.at("constant").at("hi").get<std::string>())};
    c.n = j.at("n").get<std::size_t>();
    c.q_n = parse_integer(j.at("q_n").get<std::string>());
    c.q_next = parse_integer(j.at("q_next").get<std::string>());
    c.bound = parse_integer(j.at("bound").get<std::string>());
    for (const auto& r : j.at("rows")) {
        c.rows.push_back({r.at("n").get<std::size_t>(), parse_integer(r.at("q_n").get<std::string>()),
                          parse_integer(r.at("q_next").get<std::string>()),
                          parse_integer(r.at("second_term").get<std::string>()), r.at("exact_floor").get<bool>(),
                          parse_integer(r.at("bound").get<std::string>())});
    }
    for (const auto& s : j.at("assumptions")) c.assumptions.push_back(s.get<std::string>());
    return c;
}

namespace detail {

// ln 2 = 2 atanh(1/3) = 2 sum_k 1/((2k+1) 9^k 3); independent of ln2_enclosure.
inline Interval ln2_atanh(unsigned bits) {
    Rational sum = 0;
    unsigned k = 0;
    Rational tail;
    for (;; ++k) {
        const Integer den = Integer(2 * k + 1) * ipow(3, 2 * k + 1);
        sum += Rational(2, den);
        // remaining terms < 2/((2k+3) 3^(2k+3)) * 9/8
        tail = ratio(Integer(9), Integer(4) * Integer(2 * k + 3) * ipow(3, 2 * k + 3));
        if (tail < Rational(1, pow2(bits))) break;
    }
    sum.canonicalize();
    return {sum, sum + tail};
}

} // namespace detail

struct CertificateCheck {
    bool accepted = false;
    std::vector<std::string> problems;
};

/// Recomputes the inequality chain of a certificate from its stated inputs.
inline CertificateCheck verify_certificate(const BoundCertificate& cert) {
    CertificateCheck out;
    auto fail = [&](std::string why) { out.problems.push_back(std::move(why)); };
    try {
        const MapParams map = new_map(cert.a, cert.b);
        if (map.b() < 1) {
            fail("b < 1");
            return out;
        }
        const Rational factor = cert.target == BoundTarget::CycleLengthK ? ratio(cert.a, cert.b)
                                                                          : ratio(cert.a - 2, cert.b);
        // constant enclosure must contain factor * ln 2
        for (unsigned bits = 64;; bits *= 2) {
            const Interval truth = detail::ln2_atanh(bits) * factor;
            if (cert.constant.lo <= truth.lo && truth.hi <= cert.constant.hi) break;
            if (truth.hi < cert.constant.lo || truth.lo > cert.constant.hi || bits > 4096) {
                fail("constant enclosure does not contain the constant");
                break;
            }
        }
        const auto cs = convergents(cert.a, cert.rows.size() + 2);
        Integer best = 0;
        for (const auto& r : cert.rows) {
            if (r.q_n != cs[r.n].q || r.q_next != cs[r.n + 1].q)
                fail("row " + std::to_string(r.n) + ": denominators are not consecutive convergents");
            Interval den;
            if (cert.mode == BoundMode::ConvergentPair) {
                den = Interval::point(Rational(r.q_n + r.q_next));
            } else {
                if (!cert.mu || *cert.mu < 2) { fail("mu missing or < 2"); continue; }
                den = detail::power_enclosure(r.q_n, *cert.mu);
            }
            // second_term must not exceed the true value: second_term <= constant.lo * N0 / den.hi
            const Rational lower = cert.constant.lo * Rational(cert.N0) / den.hi;
            if (Rational(r.second_term) > lower) fail("row " + std::to_string(r.n) + ": second term too large");
            if (r.bound != std::min(r.q_n, r.second_term)) fail("row " + std::to_string(r.n) + ": bound != min");
            best = std::max(best, r.bound);
        }
        if (cert.bound != best) fail("certificate bound is not the maximum row");
        if (cert.n < 1 || cert.n > cert.rows.size() || cert.rows[cert.n - 1].bound != cert.bound ||
            cert.rows[cert.n - 1].q_n != cert.q_n || cert.rows[cert.n - 1].q_next != cert.q_next)
            fail("witness row does not match");
    } catch (const Error& e) {
        fail(e.what());
    }
    out.accepted = out.problems.empty();
    return out;
}

} // namespace syracuse
